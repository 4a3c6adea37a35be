//! Nonautonomous Lie systems `X_t = Σ b_i(t) X_{z,i}` and their integration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::ClassTag;

use crate::deformation::DeformedSystem;
use crate::error::{Error, Result};
use crate::geometry::{Domain, ScalarField, SymplecticForm, VectorField};
use crate::invariants::{product_form, two_copy_lift};

/// A time-dependent coefficient `b_i(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientCurve {
    Constant {
        value: f64,
    },
    /// Coefficients from low to high degree.
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// `amplitude · sin(frequency · t + phase) + offset`.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl CoefficientCurve {
    pub fn constant(value: f64) -> Self {
        CoefficientCurve::Constant { value }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CoefficientCurve::Constant { value } => *value,
            CoefficientCurve::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            CoefficientCurve::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => amplitude * (frequency * t + phase).sin() + offset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params: Vec<f64> = match self {
            CoefficientCurve::Constant { value } => vec![*value],
            CoefficientCurve::Polynomial { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidConfiguration(
                        "polynomial curve needs at least one coefficient".into(),
                    ));
                }
                coefficients.clone()
            }
            CoefficientCurve::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => vec![*amplitude, *frequency, *phase, *offset],
        };
        if params.iter().all(|p| p.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidConfiguration(format!(
                "non-finite curve parameter in {self:?}"
            )))
        }
    }
}

/// Three named coefficient triples used for conservation checks.
pub fn preset_curves() -> [(&'static str, [CoefficientCurve; 3]); 3] {
    use CoefficientCurve::*;
    [
        (
            "constant",
            [
                Constant { value: 1.0 },
                Constant { value: 0.3 },
                Constant { value: 0.05 },
            ],
        ),
        (
            "polynomial",
            [
                Polynomial {
                    coefficients: vec![0.5, 1.0],
                },
                Polynomial {
                    coefficients: vec![0.0, -0.3],
                },
                Polynomial {
                    coefficients: vec![0.02, 0.0, 0.03],
                },
            ],
        ),
        (
            "sinusoid",
            [
                Sinusoid {
                    amplitude: 1.0,
                    frequency: 2.0,
                    phase: 0.5,
                    offset: 0.0,
                },
                Sinusoid {
                    amplitude: 0.3,
                    frequency: 1.0,
                    phase: 0.0,
                    offset: 0.0,
                },
                Sinusoid {
                    amplitude: 0.03,
                    frequency: 3.0,
                    phase: 0.0,
                    offset: 0.05,
                },
            ],
        ),
    ]
}

/// A two-copy starting point well inside the domain: each copy has
/// `x ∈ [−1, 1], y ∈ [1, 2]` (P2, I5) or `y ∈ [−1, 1], x − y ∈ [1, 2]` (I4).
pub fn sample_interior_two_copy<R: Rng + ?Sized>(tag: ClassTag, rng: &mut R) -> [f64; 4] {
    let mut one = || {
        let (a, b) = (rng.gen_range(-1.0..=1.0), rng.gen_range(1.0..=2.0));
        match tag {
            ClassTag::P2 | ClassTag::I5 => [a, b],
            ClassTag::I4 => [a + b, a],
        }
    };
    let (p, q) = (one(), one());
    [p[0], p[1], q[0], q[1]]
}

#[derive(Clone, Debug)]
enum Generator<const N: usize> {
    Field(VectorField<N>),
    // evaluated from one gradient instead of component by component
    Hamiltonian(ScalarField<N>, SymplecticForm<N>),
}

impl<const N: usize> Generator<N> {
    fn domain(&self) -> Domain<N> {
        match self {
            Generator::Field(x) => x.domain().clone(),
            Generator::Hamiltonian(h, omega) => h.domain().intersect(omega.domain()),
        }
    }

    fn eval(&self, p: [f64; N]) -> Result<[f64; N]> {
        match self {
            Generator::Field(x) => Ok(x.eval_unchecked(p)),
            Generator::Hamiltonian(h, omega) => {
                let g = h.grad(p)?;
                let mut out = [0.0; N];
                for (k, w) in omega.pair_weights().iter().enumerate() {
                    let w = w.eval(p)?;
                    out[2 * k] = g[2 * k + 1] / w;
                    out[2 * k + 1] = -g[2 * k] / w;
                }
                Ok(out)
            }
        }
    }
}

/// `(t, p) ↦ Σ b_i(t) X_i(p)`.
#[derive(Clone, Debug)]
pub struct TimeDependentField<const N: usize> {
    generators: [Generator<N>; 3],
    curves: [CoefficientCurve; 3],
    domain: Domain<N>,
}

impl<const N: usize> TimeDependentField<N> {
    pub fn new(fields: [VectorField<N>; 3], curves: [CoefficientCurve; 3]) -> Self {
        Self::from_generators(fields.map(Generator::Field), curves)
    }

    /// The field `Σ b_i(t) X_{h_i}` with `ι_{X_h} ω = dh`.
    pub fn hamiltonian(
        h: [ScalarField<N>; 3],
        omega: &SymplecticForm<N>,
        curves: [CoefficientCurve; 3],
    ) -> Self {
        Self::from_generators(h.map(|h| Generator::Hamiltonian(h, omega.clone())), curves)
    }

    fn from_generators(generators: [Generator<N>; 3], curves: [CoefficientCurve; 3]) -> Self {
        let domain = generators[0]
            .domain()
            .intersect(&generators[1].domain())
            .intersect(&generators[2].domain());
        TimeDependentField {
            generators,
            curves,
            domain,
        }
    }

    pub fn domain(&self) -> &Domain<N> {
        &self.domain
    }

    pub fn curves(&self) -> &[CoefficientCurve; 3] {
        &self.curves
    }

    pub fn eval(&self, t: f64, p: [f64; N]) -> Result<[f64; N]> {
        if !self.domain.contains(&p) || p.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(&p));
        }
        let mut out = [0.0; N];
        for (generator, curve) in self.generators.iter().zip(&self.curves) {
            let b = curve.eval(t);
            if b == 0.0 {
                continue;
            }
            let v = generator.eval(p)?;
            for k in 0..N {
                out[k] += b * v[k];
            }
        }
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::domain(&p))
        }
    }
}

/// The deformed Lie system on the plane.
pub fn assemble(dsys: &DeformedSystem, b: &[CoefficientCurve; 3]) -> TimeDependentField<2> {
    TimeDependentField::new(dsys.x.clone(), b.clone())
}

/// The same coefficients driving the Hamiltonian fields of the lifted
/// functions `h_{z,i}^(2)` under ω⊕ω.
pub fn assemble_two_copy(
    dsys: &DeformedSystem,
    b: &[CoefficientCurve; 3],
) -> TimeDependentField<4> {
    TimeDependentField::hamiltonian(two_copy_lift(dsys), &product_form(dsys), b.clone())
}

/// A sampled solution curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Named invariant values, one per stored state.
    pub invariant_samples: Vec<(String, Vec<f64>)>,
    /// Set when a stage point left the domain before `t1` was reached.
    pub truncated: bool,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> [f64; N] {
        *self
            .states
            .last()
            .expect("trajectory holds the initial point")
    }

    /// Evaluates `inv` along the trajectory and stores it under `name`.
    pub fn track(&mut self, name: &str, inv: &ScalarField<N>) -> Result<()> {
        let values = self
            .states
            .iter()
            .map(|p| inv.eval(*p))
            .collect::<Result<Vec<_>>>()?;
        self.invariant_samples.push((name.to_string(), values));
        Ok(())
    }
}

fn axpy<const N: usize>(p: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| p[i] + h * k[i])
}

/// Classical fixed-step RK4 from `t0` to `t1`; the final step is shortened to
/// land on `t1`. A stage outside the domain stops the run and marks the
/// trajectory truncated.
pub fn integrate_rk4<const N: usize>(
    field: &TimeDependentField<N>,
    p0: [f64; N],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory<N>> {
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidArgument(format!(
            "need finite t0 < t1, got [{t0}, {t1}]"
        )));
    }
    if !(dt > 0.0 && dt <= t1 - t0) {
        return Err(Error::InvalidArgument(format!(
            "step {dt} must lie in (0, {}]",
            t1 - t0
        )));
    }
    if field.eval(t0, p0).is_err() {
        return Err(Error::InvalidArgument(format!(
            "initial point {p0:?} is outside the domain"
        )));
    }
    let span = t1 - t0;
    // tolerate representation error in span/dt so no sliver step is taken
    let steps = ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        invariant_samples: Vec::new(),
        truncated: false,
    };
    traj.times.push(t0);
    traj.states.push(p0);
    let mut p = p0;
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        let t_next = if n + 1 == steps {
            t1
        } else {
            t0 + (n + 1) as f64 * dt
        };
        let h = t_next - t;
        let step = || -> Result<[f64; N]> {
            let k1 = field.eval(t, p)?;
            let k2 = field.eval(t + 0.5 * h, axpy(&p, 0.5 * h, &k1))?;
            let k3 = field.eval(t + 0.5 * h, axpy(&p, 0.5 * h, &k2))?;
            let k4 = field.eval(t + h, axpy(&p, h, &k3))?;
            let next: [f64; N] =
                std::array::from_fn(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]));
            if field.domain().contains(&next) && next.iter().all(|v| v.is_finite()) {
                Ok(next)
            } else {
                Err(Error::domain(&next))
            }
        };
        match step() {
            Ok(next) => {
                p = next;
                traj.times.push(t_next);
                traj.states.push(p);
            }
            Err(_) => {
                traj.truncated = true;
                break;
            }
        }
    }
    Ok(traj)
}

/// How far an invariant wandered along a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftReport {
    pub name: String,
    pub initial: f64,
    pub max_abs: f64,
    /// `max_abs / |initial|`, or `max_abs` itself when the initial value is zero.
    pub max_rel: f64,
    pub time_of_max: f64,
}

pub fn invariant_drift<const N: usize>(
    traj: &Trajectory<N>,
    inv: &ScalarField<N>,
    name: &str,
) -> Result<DriftReport> {
    let (&p0, &t0) = traj
        .states
        .first()
        .zip(traj.times.first())
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let initial = inv.eval(p0)?;
    let mut max_abs = 0.0;
    let mut time_of_max = t0;
    for (p, t) in traj.states.iter().zip(&traj.times) {
        let d = (inv.eval(*p)? - initial).abs();
        if d > max_abs {
            max_abs = d;
            time_of_max = *t;
        }
    }
    let max_rel = if initial == 0.0 {
        max_abs
    } else {
        max_abs / initial.abs()
    };
    Ok(DriftReport {
        name: name.to_string(),
        initial,
        max_abs,
        max_rel,
        time_of_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_class;
    use crate::invariants::{casimir_level, coupled_invariant};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dsys(tag: ClassTag, z: f64) -> DeformedSystem {
        DeformedSystem::new(&make_class(tag, None).unwrap(), z).unwrap()
    }

    fn consts(a: f64, b: f64, c: f64) -> [CoefficientCurve; 3] {
        [
            CoefficientCurve::constant(a),
            CoefficientCurve::constant(b),
            CoefficientCurve::constant(c),
        ]
    }

    #[test]
    fn curve_evaluation() {
        assert_eq!(CoefficientCurve::constant(2.5).eval(7.0), 2.5);
        let p = CoefficientCurve::Polynomial {
            coefficients: vec![1.0, -2.0, 3.0],
        };
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 12.0);
        let s = CoefficientCurve::Sinusoid {
            amplitude: 2.0,
            frequency: 3.0,
            phase: 0.5,
            offset: 1.0,
        };
        assert_relative_eq!(s.eval(0.2), 2.0 * (1.1f64).sin() + 1.0);
        assert!(CoefficientCurve::Polynomial {
            coefficients: vec![]
        }
        .validate()
        .is_err());
        assert!(CoefficientCurve::constant(f64::NAN).validate().is_err());
    }

    #[test]
    fn curves_deserialize_from_toml() {
        #[derive(Deserialize)]
        struct W {
            b: CoefficientCurve,
        }
        let w: W = toml::from_str("b = { kind = \"sinusoid\", amplitude = 1.0, frequency = 2.0 }")
            .unwrap();
        assert_eq!(
            w.b,
            CoefficientCurve::Sinusoid {
                amplitude: 1.0,
                frequency: 2.0,
                phase: 0.0,
                offset: 0.0
            }
        );
    }

    #[test]
    fn assembled_field_examples() {
        let d = dsys(ClassTag::P2, 0.2);
        let b = [
            CoefficientCurve::constant(1.0),
            CoefficientCurve::zero(),
            CoefficientCurve::Sinusoid {
                amplitude: 1.0,
                frequency: 1.0,
                phase: std::f64::consts::FRAC_PI_2,
                offset: 0.0,
            },
        ];
        let f = assemble(&d, &b);
        let v = f.eval(0.0, [0.0, 1.0]).unwrap();
        let (x1, x3) = (
            d.x[0].eval([0.0, 1.0]).unwrap(),
            d.x[2].eval([0.0, 1.0]).unwrap(),
        );
        assert_relative_eq!(v[0], x1[0] + x3[0], max_relative = 1e-14);
        assert_relative_eq!(v[1], x1[1] + x3[1], max_relative = 1e-14);
        assert!(f.eval(0.0, [0.0, -1.0]).is_err());
    }

    #[test]
    fn translation_flow_is_exact() {
        let d = dsys(ClassTag::P2, 0.0);
        let traj = integrate_rk4(
            &assemble(&d, &consts(1.0, 0.0, 0.0)),
            [0.0, 1.0],
            0.0,
            1.0,
            0.1,
        )
        .unwrap();
        assert!(!traj.truncated);
        assert_eq!(traj.len(), 11);
        for (t, p) in traj.times.iter().zip(&traj.states) {
            assert_relative_eq!(p[0], *t, epsilon = 1e-14);
            assert_eq!(p[1], 1.0);
        }
        assert_eq!(*traj.times.last().unwrap(), 1.0);
    }

    #[test]
    fn final_step_is_shortened() {
        let d = dsys(ClassTag::I5, 0.1);
        let traj = integrate_rk4(
            &assemble(&d, &consts(1.0, 0.0, 0.0)),
            [0.0, 1.0],
            0.0,
            1.0,
            0.3,
        )
        .unwrap();
        assert_eq!(traj.len(), 5);
        assert_eq!(*traj.times.last().unwrap(), 1.0);
        assert_relative_eq!(traj.last_state()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_field_gives_constant_trajectory() {
        let d = dsys(ClassTag::I4, 0.3);
        let zero = consts(0.0, 0.0, 0.0);
        let traj = integrate_rk4(
            &assemble_two_copy(&d, &zero),
            [1.0, 0.0, 0.5, -1.0],
            0.0,
            1.0,
            0.25,
        )
        .unwrap();
        assert!(traj.states.iter().all(|p| *p == [1.0, 0.0, 0.5, -1.0]));
        let rep = invariant_drift(&traj, &coupled_invariant(&d), "F2").unwrap();
        assert_eq!(rep.max_abs, 0.0);
        assert_eq!(rep.max_rel, 0.0);
    }

    #[test]
    fn bad_arguments() {
        let d = dsys(ClassTag::P2, 0.1);
        let f = assemble(&d, &consts(1.0, 0.0, 0.0));
        assert!(matches!(
            integrate_rk4(&f, [0.0, -1.0], 0.0, 1.0, 0.1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(integrate_rk4(&f, [0.0, 1.0], 0.0, 1.0, 0.0).is_err());
        assert!(integrate_rk4(&f, [0.0, 1.0], 0.0, 1.0, 2.0).is_err());
        assert!(integrate_rk4(&f, [0.0, 1.0], 1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn domain_exit_truncates() {
        // with b2 = −5 the P2 flow contracts y like e^{−5t}, which the guard catches
        let sys = crate::catalog::make_class_with_guard(ClassTag::P2, None, 0.1).unwrap();
        let d = DeformedSystem::new(&sys, 0.0).unwrap();
        let traj = integrate_rk4(
            &assemble(&d, &consts(0.0, -5.0, 0.0)),
            [0.0, 1.0],
            0.0,
            1.0,
            0.01,
        )
        .unwrap();
        assert!(traj.truncated);
        assert!(*traj.times.last().unwrap() < 1.0);
        assert!(traj.states.iter().all(|p| p[1] > 0.1));
    }

    #[test]
    fn single_copy_casimir_is_flat() {
        let d = dsys(ClassTag::P2, 0.5);
        let (_, b) = preset_curves()[2].clone();
        let traj = integrate_rk4(&assemble(&d, &b), [0.3, 1.2], 0.0, 1.0, 1e-2).unwrap();
        let rep = invariant_drift(&traj, &casimir_level(&d), "F").unwrap();
        assert!(rep.max_abs < 1e-10);
        assert_relative_eq!(rep.initial, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn two_copy_drift_example() {
        let d = dsys(ClassTag::P2, 0.1);
        let mut traj = integrate_rk4(
            &assemble_two_copy(&d, &consts(1.0, 0.0, 1.0)),
            [0.2, 1.1, -0.4, 0.7],
            0.0,
            1.0,
            1e-3,
        )
        .unwrap();
        assert!(!traj.truncated);
        let f2 = coupled_invariant(&d);
        let rep = invariant_drift(&traj, &f2, "F_z2").unwrap();
        assert!(rep.max_rel < 1e-8, "{rep:?}");
        traj.track("F_z2", &f2).unwrap();
        assert_eq!(traj.invariant_samples[0].1.len(), traj.len());
    }

    #[test]
    fn presets_conserve_coupled_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for tag in ClassTag::ALL {
            for z in [0.0, 0.1, 0.5] {
                let d = dsys(tag, z);
                let f2 = coupled_invariant(&d);
                for (name, b) in preset_curves() {
                    let q = sample_interior_two_copy(tag, &mut rng);
                    let traj =
                        integrate_rk4(&assemble_two_copy(&d, &b), q, 0.0, 1.0, 1e-2).unwrap();
                    assert!(!traj.truncated, "{tag} z={z} {name} from {q:?}");
                    let rep = invariant_drift(&traj, &f2, "F_z2").unwrap();
                    assert!(rep.max_rel < 1e-5, "{tag} z={z} {name} {rep:?}");
                }
            }
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let d = dsys(ClassTag::P2, 0.3);
        let (_, b) = preset_curves()[2].clone();
        let f = assemble(&d, &b);
        let end = |dt: f64| {
            integrate_rk4(&f, [0.3, 1.2], 0.0, 1.0, dt)
                .unwrap()
                .last_state()
        };
        let reference = end(0.1 / 64.0);
        let err = |dt: f64| {
            let p = end(dt);
            ((p[0] - reference[0]).powi(2) + (p[1] - reference[1]).powi(2)).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 4.0, "{ratio}");
    }

    #[test]
    fn classical_limit_of_trajectories() {
        let b = preset_curves()[1].1.clone();
        let run = |z: f64| {
            let d = dsys(ClassTag::I5, z);
            integrate_rk4(&assemble(&d, &b), [0.4, 1.1], 0.0, 1.0, 1e-2).unwrap()
        };
        let base = run(0.0);
        let gap = |z: f64| {
            run(z)
                .states
                .iter()
                .zip(&base.states)
                .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
                .fold(0.0, f64::max)
        };
        let (g1, g2) = (gap(1e-2), gap(5e-3));
        assert!(gap(1e-4) < 1e-6);
        assert!((g1 / g2 - 4.0).abs() < 0.4, "{g1} {g2}");
    }
}
