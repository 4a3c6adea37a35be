//! The three planar sl(2) Lie–Hamilton classes and the linear Poisson
//! structure on sl(2)* they come from.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    hamiltonian_vector_field, Domain, PoissonTensor, ScalarField, ScalarField2D, ScalarField3D,
    SymplecticForm2D, VectorField2D, DEFAULT_GUARD,
};
use crate::jet::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    P2,
    I4,
    I5,
}

impl ClassTag {
    pub const ALL: [ClassTag; 3] = [ClassTag::P2, ClassTag::I4, ClassTag::I5];

    /// Casimir constant of the tabulated representative.
    pub fn default_c(self) -> f64 {
        match self {
            ClassTag::P2 => 4.0,
            ClassTag::I4 => -1.0,
            ClassTag::I5 => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::P2 => "P2",
            ClassTag::I4 => "I4",
            ClassTag::I5 => "I5",
        }
    }

    fn accepts(self, c: f64) -> bool {
        match self {
            ClassTag::P2 => c > 0.0,
            ClassTag::I4 => c < 0.0,
            ClassTag::I5 => c == 0.0,
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P2" => Ok(ClassTag::P2),
            "I4" => Ok(ClassTag::I4),
            "I5" => Ok(ClassTag::I5),
            other => Err(Error::InvalidConfiguration(format!(
                "unknown class '{other}', expected P2, I4 or I5"
            ))),
        }
    }
}

/// A planar sl(2) Lie–Hamilton system: symplectic form, Hamiltonian functions
/// closing `{h1,h2} = −h1, {h1,h3} = −2h2, {h2,h3} = −h3`, and their
/// Hamiltonian vector fields.
#[derive(Clone, Debug)]
pub struct Sl2ClassSystem {
    pub tag: ClassTag,
    pub c: f64,
    pub omega: SymplecticForm2D,
    pub h: [ScalarField2D; 3],
    pub x: [VectorField2D; 3],
    pub domain: Domain<2>,
    pub guard: f64,
}

/// The tabulated system for `tag`, optionally with a different Casimir constant
/// of the same sign class.
pub fn make_class(tag: ClassTag, c_override: Option<f64>) -> Result<Sl2ClassSystem> {
    make_class_with_guard(tag, c_override, DEFAULT_GUARD)
}

pub fn make_class_with_guard(
    tag: ClassTag,
    c_override: Option<f64>,
    guard: f64,
) -> Result<Sl2ClassSystem> {
    if !(guard >= 0.0 && guard.is_finite()) {
        return Err(Error::InvalidConfiguration(format!(
            "guard band must be finite and >= 0, got {guard}"
        )));
    }
    let c = match c_override {
        None => tag.default_c(),
        Some(c) if !c.is_finite() => {
            return Err(Error::InvalidConfiguration(format!(
                "Casimir constant must be finite, got {c}"
            )))
        }
        Some(c) if !tag.accepts(c) => {
            return Err(Error::InvalidConfiguration(format!(
                "class {tag} needs c {} but got c = {c}",
                match tag {
                    ClassTag::P2 => "> 0",
                    ClassTag::I4 => "< 0",
                    ClassTag::I5 => "= 0",
                }
            )))
        }
        Some(c) => c,
    };

    let domain = match tag {
        ClassTag::P2 | ClassTag::I5 => Domain::new(move |p: &[f64; 2]| p[1] > guard),
        ClassTag::I4 => Domain::new(move |p: &[f64; 2]| p[0] - p[1] > guard),
    };
    let field = |f: fn(&[Jet; 2]) -> Jet| ScalarField::new(domain.clone(), f);
    let vector = |fx: fn(&[Jet; 2]) -> Jet, fy: fn(&[Jet; 2]) -> Jet| {
        VectorField2D::new([field(fx), field(fy)])
    };

    let (weight, h, x) = match tag {
        ClassTag::P2 => (
            field(|v| v[1].square().recip()),
            [
                field(|v| -v[1].recip()),
                field(|v| -(&v[0] / &v[1])),
                field(|v| -((v[0].square() + v[1].square()) / &v[1])),
            ],
            [
                vector(|v| v[0].constant_like(1.0), |v| v[0].constant_like(0.0)),
                vector(|v| v[0].clone(), |v| v[1].clone()),
                vector(|v| v[0].square() - v[1].square(), |v| &v[0] * &v[1] * 2.0),
            ],
        ),
        ClassTag::I4 => (
            field(|v| (&v[0] - &v[1]).square().recip()),
            [
                field(|v| (&v[0] - &v[1]).recip()),
                field(|v| (&v[0] + &v[1]) / ((&v[0] - &v[1]) * 2.0)),
                field(|v| &v[0] * &v[1] / (&v[0] - &v[1])),
            ],
            [
                vector(|v| v[0].constant_like(1.0), |v| v[0].constant_like(1.0)),
                vector(|v| v[0].clone(), |v| v[1].clone()),
                vector(|v| v[0].square(), |v| v[1].square()),
            ],
        ),
        ClassTag::I5 => (
            field(|v| (&v[1] * &v[1] * &v[1]).recip()),
            [
                field(|v| -(v[1].square() * 2.0).recip()),
                field(|v| -(&v[0] / (v[1].square() * 2.0))),
                field(|v| -(v[0].square() / (v[1].square() * 2.0))),
            ],
            [
                vector(|v| v[0].constant_like(1.0), |v| v[0].constant_like(0.0)),
                vector(|v| v[0].clone(), |v| &v[1] * 0.5),
                vector(|v| v[0].square(), |v| &v[0] * &v[1]),
            ],
        ),
    };
    let omega = SymplecticForm2D::new(weight);

    let [h1, h2, h3] = h;
    let [x1, x2, x3] = x;
    let (h3, x3) = if c == tag.default_c() {
        (h3, x3)
    } else {
        // h3 = h2²/h1 + c/(4 h1), whose Hamiltonian field is
        // 2 (h2/h1) X2 − (h2²/h1² + c/(4 h1²)) X1
        let h3 = &(&h2.square() / &h1) + &(c / &(&h1 * 4.0));
        let ratio = &h2 / &h1;
        let coef1 = -(&ratio.square() + &(c / &(&h1.square() * 4.0)));
        let x3 = &x2.scale(&(&ratio * 2.0)) + &x1.scale(&coef1);
        (h3, x3)
    };

    Ok(Sl2ClassSystem {
        tag,
        c,
        omega,
        h: [h1, h2, h3],
        x: [x1, x2, x3].map(|f| f.with_domain(domain.clone())),
        domain,
        guard,
    })
}

impl Sl2ClassSystem {
    /// `h1 h3 − h2²`, identically `c/4`.
    pub fn casimir_field(&self) -> ScalarField2D {
        &(&self.h[0] * &self.h[2]) - &self.h[1].square()
    }

    /// Hamiltonian vector fields recomputed from `h` and `ω`.
    pub fn hamiltonian_fields(&self) -> [VectorField2D; 3] {
        std::array::from_fn(|i| hamiltonian_vector_field(&self.h[i], &self.omega))
    }

    /// A random point of the working region, kept well inside the domain.
    ///
    /// P2 and I5 use `x ∈ [−2, 2], y ∈ [0.5, 2]`; I4 uses `y ∈ [−2, 2]`,
    /// `x − y ∈ [0.5, 2]`.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        match self.tag {
            ClassTag::P2 | ClassTag::I5 => [rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0)],
            ClassTag::I4 => {
                let y = rng.gen_range(-2.0..2.0);
                [y + rng.gen_range(0.5..2.0), y]
            }
        }
    }

    pub fn sample_two_copy<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 4] {
        let a = self.sample_point(rng);
        let b = self.sample_point(rng);
        [a[0], a[1], b[0], b[1]]
    }
}

/// A point of sl(2)* in the linear coordinates `(v1, v2, v3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl2DualPoint {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl Sl2DualPoint {
    pub fn new(v1: f64, v2: f64, v3: f64) -> Result<Self> {
        if [v1, v2, v3].iter().all(|v| v.is_finite()) {
            Ok(Sl2DualPoint { v1, v2, v3 })
        } else {
            Err(Error::InvalidArgument(format!(
                "non-finite sl(2)* point ({v1}, {v2}, {v3})"
            )))
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.v1, self.v2, self.v3]
    }
}

/// The Kostant–Kirillov–Souriau bivector
/// `Λ = −v1 ∂1∧∂2 − 2 v2 ∂1∧∂3 − v3 ∂2∧∂3`.
pub fn kks_tensor() -> PoissonTensor<3> {
    PoissonTensor::new(vec![
        (0, 1, -&ScalarField::coordinate(0)),
        (0, 2, &ScalarField::coordinate(1) * -2.0),
        (1, 2, -&ScalarField::coordinate(2)),
    ])
}

pub fn kks_bracket(f: &ScalarField3D, g: &ScalarField3D) -> ScalarField3D {
    kks_tensor().bracket(f, g)
}

/// `C = v1 v3 − v2²`.
pub fn kks_casimir() -> ScalarField3D {
    ScalarField::new(Domain::everywhere(), |v| &v[0] * &v[2] - v[1].square())
}

/// Darboux coordinates `(x̄, ȳ, C) = (v1, −v2/v1, v1 v3 − v2²)` on `v1 ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarbouxChart {
    pub guard: f64,
}

pub fn darboux_chart() -> DarbouxChart {
    DarbouxChart {
        guard: DEFAULT_GUARD,
    }
}

impl DarbouxChart {
    pub fn to_chart(&self, p: &Sl2DualPoint) -> Result<[f64; 3]> {
        if p.v1.abs() <= self.guard {
            return Err(Error::domain(&p.as_array()));
        }
        Ok([p.v1, -p.v2 / p.v1, p.v1 * p.v3 - p.v2 * p.v2])
    }

    pub fn from_chart(&self, chart: [f64; 3]) -> Result<Sl2DualPoint> {
        let [xb, yb, c] = chart;
        if xb.abs() <= self.guard || !chart.iter().all(|v| v.is_finite()) {
            return Err(Error::domain(&chart));
        }
        Sl2DualPoint::new(xb, -xb * yb, (c + xb * xb * yb * yb) / xb)
    }
}

/// Functions on sl(2)* closing the deformed relations under the undeformed
/// KKS bracket:
/// `v_{z,1} = v1`, `v_{z,2} = shc(2z v1) v2`,
/// `v_{z,3} = shc(2z v1) v2²/v1 + c / (4 shc(2z v1) v1)`.
pub fn deformed_dual_functions(z: f64, c: f64) -> Result<[ScalarField3D; 3]> {
    if !z.is_finite() || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "z and c must be finite, got z = {z}, c = {c}"
        )));
    }
    let guard = DEFAULT_GUARD;
    let domain = Domain::new(move |p: &[f64; 3]| p[0].abs() > guard);
    let s = move |v: &[Jet; 3]| (&v[0] * (2.0 * z)).shc();
    Ok([
        ScalarField::new(domain.clone(), |v| v[0].clone()),
        ScalarField::new(domain.clone(), move |v| s(v) * &v[1]),
        ScalarField::new(domain, move |v| {
            let s = s(v);
            &s * v[1].square() / &v[0] + c / (s * &v[0] * 4.0)
        }),
    ])
}

/// `(x, −xy, c/(4x) + x y²)`, a realization of sl(2) on the plane under the
/// canonical bracket with `φ(v1) φ(v3) − φ(v2)² = c/4`.
pub fn foliation_realization(c: f64) -> Result<[ScalarField2D; 3]> {
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must be finite, got {c}")));
    }
    let guard = DEFAULT_GUARD;
    let domain = Domain::new(move |p: &[f64; 2]| p[0].abs() > guard);
    Ok([
        ScalarField::new(domain.clone(), |v| v[0].clone()),
        ScalarField::new(domain.clone(), |v| -(&v[0] * &v[1])),
        ScalarField::new(domain, move |v| c / (&v[0] * 4.0) + &v[0] * v[1].square()),
    ])
}
