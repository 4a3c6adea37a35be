//! Deformation of a classical sl(2) Lie–Hamilton system by the non-standard
//! Poisson–Hopf deformation of sl(2).
//!
//! Given a system with Hamiltonians `h1, h2, h3` and Casimir constant `c`, the
//! deformed Hamiltonians are
//!
//! ```text
//! h_{z,1} = h1
//! h_{z,2} = shc(2z h1) h2
//! h_{z,3} = shc(2z h1) h2²/h1 + c / (4 shc(2z h1) h1)
//! ```
//!
//! and close `{h_{z,1},h_{z,2}} = −shc(2z h_{z,1}) h_{z,1}`,
//! `{h_{z,1},h_{z,3}} = −2 h_{z,2}`, `{h_{z,2},h_{z,3}} = −ch(2z h_{z,1}) h_{z,3}`.
//! The deformed vector fields are available both in closed form (in terms of
//! the classical fields) and as Hamiltonian fields of `h_{z,i}`; the two
//! routes are kept independent so each can check the other.

use crate::catalog::{ClassTag, Sl2ClassSystem};
use crate::error::{Error, Result};
use crate::geometry::{
    hamiltonian_vector_field, Domain, JetFn, ScalarField, ScalarField2D, ScalarField3D,
    VectorField2D,
};
use crate::jet::Jet;

/// A classical system together with its deformation at parameter `z`.
#[derive(Clone, Debug)]
pub struct DeformedSystem {
    pub base: Sl2ClassSystem,
    pub z: f64,
    pub h: [ScalarField2D; 3],
    pub x: [VectorField2D; 3],
}

impl DeformedSystem {
    pub fn new(base: &Sl2ClassSystem, z: f64) -> Result<Self> {
        Ok(DeformedSystem {
            h: deform_hamiltonians(base, z)?,
            x: deform_vector_fields(base, z)?,
            base: base.clone(),
            z,
        })
    }

    pub fn c(&self) -> f64 {
        self.base.c
    }

    pub fn domain(&self) -> &Domain<2> {
        &self.base.domain
    }
}

fn check_z(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "deformation parameter must be finite, got {z}"
        )))
    }
}

/// `shc(2z h1)` and `ch(2z h1)` as fields.
fn profile(sys: &Sl2ClassSystem, z: f64) -> (ScalarField2D, ScalarField2D) {
    let s = sys.h[0].map(move |h| (h * (2.0 * z)).shc());
    let ch = sys.h[0].map(move |h| (h * (2.0 * z)).cosh());
    (s, ch)
}

pub fn deform_hamiltonians(sys: &Sl2ClassSystem, z: f64) -> Result<[ScalarField2D; 3]> {
    check_z(z)?;
    if z == 0.0 {
        return Ok(sys.h.clone());
    }
    let [h1, h2, _] = &sys.h;
    let (s, _) = profile(sys, z);
    let h2z = &s * h2;
    let h3z = &(&(&s * &h2.square()) / h1) + &(sys.c / &(&(&s * h1) * 4.0));
    Ok([h1.clone(), h2z, h3z])
}

/// Closed-form deformed fields as combinations of the classical `X1, X2`.
pub fn deform_vector_fields(sys: &Sl2ClassSystem, z: f64) -> Result<[VectorField2D; 3]> {
    check_z(z)?;
    if z == 0.0 {
        return Ok(sys.x.clone());
    }
    let [h1, h2, _] = &sys.h;
    let [x1, x2, _] = &sys.x;
    let (s, ch) = profile(sys, z);
    let ratio = h2 / h1;

    let coef21 = &ratio * &(&ch - &s);
    let x2z = &x1.scale(&coef21) + &x2.scale(&s);

    let coef31 = &(&ratio.square() * &(&ch - &(&s * 2.0)))
        - &(&(sys.c * &ch) / &(&(&h1.square() * &s.square()) * 4.0));
    let coef32 = &(&ratio * &s) * 2.0;
    let x3z = &x1.scale(&coef31) + &x2.scale(&coef32);

    let domain = sys.domain.clone();
    Ok([
        x1.clone(),
        x2z.with_domain(domain.clone()),
        x3z.with_domain(domain),
    ])
}

/// Deformed fields obtained from `ι_X ω = d h_{z,i}`.
pub fn deformed_fields_from_symplectic(sys: &Sl2ClassSystem, z: f64) -> Result<[VectorField2D; 3]> {
    let h = deform_hamiltonians(sys, z)?;
    Ok(std::array::from_fn(|i| {
        hamiltonian_vector_field(&h[i], &sys.omega)
    }))
}

/// The deformed brackets as functions of formal coordinates `(v1, v2, v3)`:
/// `F12 = −shc(2z v1) v1`, `F13 = −2 v2`, `F23 = −ch(2z v1) v3`.
pub fn formal_structure_functions(z: f64) -> Result<[ScalarField3D; 3]> {
    check_z(z)?;
    let d = Domain::everywhere();
    Ok([
        ScalarField::new(d.clone(), move |v| -((&v[0] * (2.0 * z)).shc() * &v[0])),
        ScalarField::new(d.clone(), |v| &v[1] * -2.0),
        ScalarField::new(d, move |v| -((&v[0] * (2.0 * z)).cosh() * &v[2])),
    ])
}

/// Substitutes plane fields for the formal coordinates of a function on R^3.
pub fn pull_back(f: &ScalarField3D, h: &[ScalarField2D; 3]) -> ScalarField2D {
    let (f, h) = (f.clone(), h.clone());
    let domain = h[0]
        .domain()
        .intersect(h[1].domain())
        .intersect(h[2].domain());
    ScalarField::new(domain, move |v: &[Jet; 2]| {
        let args: [Jet; 3] = std::array::from_fn(|i| h[i].eval_jet(v));
        f.eval_jet(&args)
    })
}

/// `(F_{z,12}, F_{z,13}, F_{z,23})` evaluated on the deformed Hamiltonians.
pub fn structure_functions(sys: &Sl2ClassSystem, z: f64) -> Result<[ScalarField2D; 3]> {
    let h = deform_hamiltonians(sys, z)?;
    let formal = formal_structure_functions(z)?;
    Ok(std::array::from_fn(|k| pull_back(&formal[k], &h)))
}

/// Right-hand sides of `[X_{z,i}, X_{z,j}] = −Σ_k ∂F_{z,ij}/∂h_{z,k} X_{z,k}`
/// for `(i, j) = (1,2), (1,3), (2,3)`.
///
/// These expand to `ch(2z h_{z,1}) X_{z,1}`, `2 X_{z,2}` and
/// `ch(2z h_{z,1}) X_{z,3} + 4z² shc(2z h_{z,1}) h_{z,1} h_{z,3} X_{z,1}`.
pub fn predicted_commutators(sys: &Sl2ClassSystem, z: f64) -> Result<[VectorField2D; 3]> {
    let h = deform_hamiltonians(sys, z)?;
    let x = deform_vector_fields(sys, z)?;
    let formal = formal_structure_functions(z)?;
    Ok(std::array::from_fn(|k| {
        let mut acc: Option<VectorField2D> = None;
        for (m, xm) in x.iter().enumerate() {
            let coef = -&pull_back(&formal[k].partial(m), &h);
            let term = xm.scale(&coef);
            acc = Some(match acc {
                None => term,
                Some(a) => &a + &term,
            });
        }
        acc.expect("three terms").with_domain(sys.domain.clone())
    }))
}

/// The `[X_{z,2}, X_{z,3}]` right-hand side with the `z²` term carrying
/// `shc²(2z h_{z,1})`, as it is commonly printed. It differs from the exact
/// commutator whenever `z h_{z,1} h_{z,3} ≠ 0`; kept for the report only.
pub fn printed_commutator_23(sys: &Sl2ClassSystem, z: f64) -> Result<VectorField2D> {
    let h = deform_hamiltonians(sys, z)?;
    let x = deform_vector_fields(sys, z)?;
    let (s, ch) = profile(sys, z);
    let coef = &(&(&s.square() * &h[0]) * &h[2]) * (4.0 * z * z);
    Ok((&x[2].scale(&ch) + &x[0].scale(&coef)).with_domain(sys.domain.clone()))
}

/// Deformed Hamiltonians and vector fields exactly as tabulated for the
/// default representative of each class.
pub mod tabulated {
    use super::*;
    use crate::catalog::make_class;

    fn class_domain(tag: ClassTag) -> Result<Domain<2>> {
        Ok(make_class(tag, None)?.domain)
    }

    /// `(shc, ch)` of the class-specific argument: `2z/y` (P2), `2z/(x−y)` (I4), `z/y²` (I5).
    fn arg(tag: ClassTag, z: f64, v: &[Jet; 2]) -> Jet {
        match tag {
            ClassTag::P2 => v[1].recip() * (2.0 * z),
            ClassTag::I4 => (&v[0] - &v[1]).recip() * (2.0 * z),
            ClassTag::I5 => v[1].square().recip() * z,
        }
    }

    pub fn hamiltonians(tag: ClassTag, z: f64) -> Result<[ScalarField2D; 3]> {
        check_z(z)?;
        let d = class_domain(tag)?;
        let f = |e: JetFn<2>| ScalarField::new(d.clone(), e);
        Ok(match tag {
            ClassTag::P2 => [
                f(Box::new(|v| -v[1].recip())),
                f(Box::new(move |v| -(&v[0] / &v[1]) * arg(tag, z, v).shc())),
                f(Box::new(move |v| {
                    let s = arg(tag, z, v).shc();
                    -((v[0].square() * s.square() + v[1].square()) / (&v[1] * &s))
                })),
            ],
            ClassTag::I4 => [
                f(Box::new(|v| (&v[0] - &v[1]).recip())),
                f(Box::new(move |v| {
                    (&v[0] + &v[1]) * arg(tag, z, v).shc() / ((&v[0] - &v[1]) * 2.0)
                })),
                f(Box::new(move |v| {
                    let s = arg(tag, z, v).shc();
                    let d = &v[0] - &v[1];
                    ((&v[0] + &v[1]).square() * s.square() - d.square()) / (d * &s * 4.0)
                })),
            ],
            ClassTag::I5 => [
                f(Box::new(|v| -(v[1].square() * 2.0).recip())),
                f(Box::new(move |v| {
                    -(&v[0] / (v[1].square() * 2.0)) * arg(tag, z, v).shc()
                })),
                f(Box::new(move |v| {
                    -(v[0].square() / (v[1].square() * 2.0)) * arg(tag, z, v).shc()
                })),
            ],
        })
    }

    pub fn vector_fields(tag: ClassTag, z: f64) -> Result<[VectorField2D; 3]> {
        check_z(z)?;
        let d = class_domain(tag)?;
        let f = |e: JetFn<2>| ScalarField::new(d.clone(), e);
        let pair = |a, b| VectorField2D::new([f(a), f(b)]);
        Ok(match tag {
            ClassTag::P2 => [
                pair(
                    Box::new(|v| v[0].constant_like(1.0)),
                    Box::new(|v| v[0].constant_like(0.0)),
                ),
                pair(
                    Box::new(move |v| &v[0] * arg(tag, z, v).cosh()),
                    Box::new(move |v| &v[1] * arg(tag, z, v).shc()),
                ),
                pair(
                    Box::new(move |v| {
                        let a = arg(tag, z, v);
                        (v[0].square() - v[1].square() / a.shc().square()) * a.cosh()
                    }),
                    Box::new(move |v| &v[0] * &v[1] * arg(tag, z, v).shc() * 2.0),
                ),
            ],
            ClassTag::I4 => {
                // a (∂x + ∂y) + b (∂x − ∂y) has components (a + b, a − b)
                let x2 = move |v: &[Jet; 2]| {
                    let a = arg(tag, z, v);
                    let p = (&v[0] + &v[1]) * a.cosh() * 0.5;
                    let m = (&v[0] - &v[1]) * a.shc() * 0.5;
                    (p, m)
                };
                let x3 = move |v: &[Jet; 2]| {
                    let a = arg(tag, z, v);
                    let d2 = (&v[0] - &v[1]).square();
                    let p = a.cosh() * ((&v[0] + &v[1]).square() + &d2 / a.shc().square()) * 0.25;
                    let m = d2 * a.shc() * 0.5;
                    (p, m)
                };
                [
                    pair(
                        Box::new(|v| v[0].constant_like(1.0)),
                        Box::new(|v| v[0].constant_like(1.0)),
                    ),
                    pair(
                        Box::new(move |v| {
                            let (p, m) = x2(v);
                            p + m
                        }),
                        Box::new(move |v| {
                            let (p, m) = x2(v);
                            p - m
                        }),
                    ),
                    pair(
                        Box::new(move |v| {
                            let (p, m) = x3(v);
                            p + m
                        }),
                        Box::new(move |v| {
                            let (p, m) = x3(v);
                            p - m
                        }),
                    ),
                ]
            }
            ClassTag::I5 => [
                pair(
                    Box::new(|v| v[0].constant_like(1.0)),
                    Box::new(|v| v[0].constant_like(0.0)),
                ),
                pair(
                    Box::new(move |v| &v[0] * arg(tag, z, v).cosh()),
                    Box::new(move |v| &v[1] * arg(tag, z, v).shc() * 0.5),
                ),
                pair(
                    Box::new(move |v| v[0].square() * arg(tag, z, v).cosh()),
                    Box::new(move |v| &v[0] * &v[1] * arg(tag, z, v).shc()),
                ),
            ],
        })
    }
}
