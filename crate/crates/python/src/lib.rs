//! Python bindings: class systems, their deformations, the two-copy invariant,
//! integration, verification and the classical-limit scan.

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lhdef::catalog::{make_class, ClassTag, Sl2ClassSystem};
use lhdef::deformation::{self, DeformedSystem};
use lhdef::dynamics::{self, CoefficientCurve};
use lhdef::geometry::lie_bracket;
use lhdef::invariants;
use lhdef::report::{self, Status};
use lhdef::scan::{self, GridSpec};
use lhdef::scenario::{self, ScenarioConfig};
use lhdef::Error;

create_exception!(
    lhdef,
    DomainError,
    PyValueError,
    "Evaluation point outside the domain of a system."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain { .. } => DomainError::new_err(e.to_string()),
        Error::Io(msg) => PyOSError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn tag(s: &str) -> PyResult<ClassTag> {
    s.parse().map_err(to_py)
}

fn arr<const N: usize>(v: Vec<f64>) -> PyResult<[f64; N]> {
    let len = v.len();
    v.try_into()
        .map_err(|_| PyValueError::new_err(format!("expected {N} coordinates, got {len}")))
}

/// `sinh(x)/x`, continuous at zero.
#[pyfunction]
fn shc(x: f64) -> PyResult<f64> {
    lhdef::geometry::shc(x).map_err(to_py)
}

/// A time-dependent coefficient `b(t)`.
#[pyclass(name = "Curve", module = "lhdef", frozen, from_py_object)]
#[derive(Clone)]
struct PyCurve(CoefficientCurve);

#[pymethods]
impl PyCurve {
    #[staticmethod]
    fn constant(value: f64) -> PyResult<Self> {
        Self::checked(CoefficientCurve::Constant { value })
    }

    /// `c0 + c1 t + c2 t^2 + ...`
    #[staticmethod]
    fn polynomial(coefficients: Vec<f64>) -> PyResult<Self> {
        Self::checked(CoefficientCurve::Polynomial { coefficients })
    }

    /// `offset + amplitude * sin(frequency t + phase)`
    #[staticmethod]
    #[pyo3(signature = (amplitude, frequency, phase=0.0, offset=0.0))]
    fn sinusoid(amplitude: f64, frequency: f64, phase: f64, offset: f64) -> PyResult<Self> {
        Self::checked(CoefficientCurve::Sinusoid {
            amplitude,
            frequency,
            phase,
            offset,
        })
    }

    fn __call__(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    fn __repr__(&self) -> String {
        format!("Curve({:?})", self.0)
    }
}

impl PyCurve {
    fn checked(c: CoefficientCurve) -> PyResult<Self> {
        c.validate().map_err(to_py)?;
        Ok(PyCurve(c))
    }
}

/// The built-in coefficient sets: `(name, [b1, b2, b3])`.
#[pyfunction]
fn presets() -> Vec<(String, [PyCurve; 3])> {
    dynamics::preset_curves()
        .into_iter()
        .map(|(name, b)| (name.to_string(), b.map(PyCurve)))
        .collect()
}

/// One of the classical systems P2, I4 or I5.
#[pyclass(name = "ClassSystem", module = "lhdef", frozen)]
struct PyClassSystem(Sl2ClassSystem);

#[pymethods]
impl PyClassSystem {
    #[new]
    #[pyo3(signature = (class_tag, c=None))]
    fn new(class_tag: &str, c: Option<f64>) -> PyResult<Self> {
        Ok(PyClassSystem(
            make_class(tag(class_tag)?, c).map_err(to_py)?,
        ))
    }

    #[getter]
    fn tag(&self) -> String {
        self.0.tag.to_string()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c
    }

    fn contains(&self, p: Vec<f64>) -> PyResult<bool> {
        Ok(self.0.domain.contains(&arr(p)?))
    }

    fn hamiltonians(&self, p: Vec<f64>) -> PyResult<[f64; 3]> {
        eval3(&self.0.h, arr(p)?)
    }

    fn vector_fields(&self, p: Vec<f64>) -> PyResult<Vec<[f64; 2]>> {
        eval_fields(&self.0.x, arr(p)?)
    }

    fn casimir(&self, p: Vec<f64>) -> PyResult<f64> {
        self.0.casimir_field().eval(arr(p)?).map_err(to_py)
    }

    /// `n` seeded points from the sampling box of the class.
    #[pyo3(signature = (n, seed=0))]
    fn sample_points(&self, n: usize, seed: u64) -> Vec<[f64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.0.sample_point(&mut rng)).collect()
    }

    /// The deformation of this system at parameter `z`.
    fn deform(&self, z: f64) -> PyResult<PyDeformedSystem> {
        Ok(PyDeformedSystem(
            DeformedSystem::new(&self.0, z).map_err(to_py)?,
        ))
    }
}

fn eval3(f: &[lhdef::geometry::ScalarField2D; 3], p: [f64; 2]) -> PyResult<[f64; 3]> {
    Ok([
        f[0].eval(p).map_err(to_py)?,
        f[1].eval(p).map_err(to_py)?,
        f[2].eval(p).map_err(to_py)?,
    ])
}

fn eval_fields(x: &[lhdef::geometry::VectorField2D], p: [f64; 2]) -> PyResult<Vec<[f64; 2]>> {
    x.iter().map(|v| v.eval(p).map_err(to_py)).collect()
}

/// A classical system deformed at parameter `z`.
#[pyclass(name = "DeformedSystem", module = "lhdef", frozen)]
struct PyDeformedSystem(DeformedSystem);

#[pymethods]
impl PyDeformedSystem {
    #[new]
    #[pyo3(signature = (class_tag, z, c=None))]
    fn new(class_tag: &str, z: f64, c: Option<f64>) -> PyResult<Self> {
        let sys = make_class(tag(class_tag)?, c).map_err(to_py)?;
        Ok(PyDeformedSystem(
            DeformedSystem::new(&sys, z).map_err(to_py)?,
        ))
    }

    #[getter]
    fn tag(&self) -> String {
        self.0.base.tag.to_string()
    }

    #[getter]
    fn z(&self) -> f64 {
        self.0.z
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c()
    }

    fn hamiltonians(&self, p: Vec<f64>) -> PyResult<[f64; 3]> {
        eval3(&self.0.h, arr(p)?)
    }

    fn vector_fields(&self, p: Vec<f64>) -> PyResult<Vec<[f64; 2]>> {
        eval_fields(&self.0.x, arr(p)?)
    }

    /// `h_{z,1} h_{z,3} shc(2 z h_{z,1}) - h_{z,2}^2`, constant at `c/4`.
    fn casimir_level(&self, p: Vec<f64>) -> PyResult<f64> {
        invariants::casimir_level(&self.0)
            .eval(arr(p)?)
            .map_err(to_py)
    }

    /// Structure functions `F_12, F_13, F_23` of the deformed brackets.
    fn structure_functions(&self, p: Vec<f64>) -> PyResult<[f64; 3]> {
        eval3(
            &deformation::structure_functions(&self.0.base, self.0.z).map_err(to_py)?,
            arr(p)?,
        )
    }

    /// `[X_1,X_2], [X_1,X_3], [X_2,X_3]` from exact derivatives.
    fn commutators(&self, p: Vec<f64>) -> PyResult<Vec<[f64; 2]>> {
        let x = &self.0.x;
        let b = [
            lie_bracket(&x[0], &x[1]),
            lie_bracket(&x[0], &x[2]),
            lie_bracket(&x[1], &x[2]),
        ];
        eval_fields(&b, arr(p)?)
    }

    /// The commutators predicted by the structure functions.
    fn predicted_commutators(&self, p: Vec<f64>) -> PyResult<Vec<[f64; 2]>> {
        let b = deformation::predicted_commutators(&self.0.base, self.0.z).map_err(to_py)?;
        eval_fields(&b, arr(p)?)
    }

    /// The lifted Hamiltonians `H_1, H_2, H_3` at `(x1, y1, x2, y2)`.
    fn lifted_hamiltonians(&self, q: Vec<f64>) -> PyResult<[f64; 3]> {
        let q: [f64; 4] = arr(q)?;
        let h = invariants::two_copy_lift(&self.0);
        Ok([
            h[0].eval(q).map_err(to_py)?,
            h[1].eval(q).map_err(to_py)?,
            h[2].eval(q).map_err(to_py)?,
        ])
    }

    /// The two-copy constant of motion `F_z^(2)` at `(x1, y1, x2, y2)`.
    fn coupled_invariant(&self, q: Vec<f64>) -> PyResult<f64> {
        invariants::coupled_invariant(&self.0)
            .eval(arr(q)?)
            .map_err(to_py)
    }

    /// RK4 solution of `sum b_i(t) X_{z,i}` from `p0`; a four-coordinate `p0`
    /// integrates two copies and tracks `F_z2` along the way.
    #[pyo3(signature = (curves, p0, t1, dt, t0=0.0))]
    fn integrate(
        &self,
        curves: [PyCurve; 3],
        p0: Vec<f64>,
        t1: f64,
        dt: f64,
        t0: f64,
    ) -> PyResult<PyTrajectory> {
        let b = curves.map(|c| c.0);
        match p0.len() {
            2 => {
                let field = dynamics::assemble(&self.0, &b);
                let t = dynamics::integrate_rk4(&field, arr(p0)?, t0, t1, dt).map_err(to_py)?;
                Ok(PyTrajectory {
                    times: t.times,
                    states: t.states.into_iter().map(Vec::from).collect(),
                    truncated: t.truncated,
                    coupled: None,
                })
            }
            4 => {
                let field = dynamics::assemble_two_copy(&self.0, &b);
                let mut t = dynamics::integrate_rk4(&field, arr(p0)?, t0, t1, dt).map_err(to_py)?;
                let f2 = invariants::coupled_invariant(&self.0);
                t.track("F_z2", &f2).map_err(to_py)?;
                let drift = dynamics::invariant_drift(&t, &f2, "F_z2").map_err(to_py)?;
                Ok(PyTrajectory {
                    times: t.times,
                    states: t.states.into_iter().map(Vec::from).collect(),
                    truncated: t.truncated,
                    coupled: Some((t.invariant_samples.remove(0).1, drift.max_rel)),
                })
            }
            n => Err(PyValueError::new_err(format!(
                "initial point needs 2 or 4 coordinates, got {n}"
            ))),
        }
    }
}

#[pyclass(name = "Trajectory", module = "lhdef", frozen)]
struct PyTrajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    truncated: bool,
    coupled: Option<(Vec<f64>, f64)>,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<f64>> {
        self.states.clone()
    }

    #[getter]
    fn truncated(&self) -> bool {
        self.truncated
    }

    /// `F_z2` at every stored state (two-copy runs only).
    #[getter]
    fn coupled_invariant(&self) -> Option<Vec<f64>> {
        self.coupled.as_ref().map(|c| c.0.clone())
    }

    /// Largest relative change of `F_z2` (two-copy runs only).
    #[getter]
    fn coupled_drift(&self) -> Option<f64> {
        self.coupled.as_ref().map(|c| c.1)
    }

    fn __len__(&self) -> usize {
        self.times.len()
    }
}

type Row = (String, Option<f64>, f64, f64, usize, &'static str);

#[pyclass(name = "Report", module = "lhdef", frozen)]
struct PyReport(report::VerificationReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    /// `(check, z, max_error, tolerance, samples, status)` per row.
    #[getter]
    fn rows(&self) -> Vec<Row> {
        self.0
            .rows
            .iter()
            .map(|r| {
                (
                    r.check.clone(),
                    r.z,
                    r.max_error,
                    r.tolerance,
                    r.samples,
                    r.status.label(),
                )
            })
            .collect()
    }

    #[getter]
    fn flagged(&self) -> Vec<String> {
        self.0
            .rows
            .iter()
            .filter(|r| r.status == Status::Flagged)
            .map(|r| r.check.clone())
            .collect()
    }

    fn render(&self) -> String {
        self.0.render()
    }

    fn __str__(&self) -> String {
        self.0.render()
    }
}

/// Checks every identity of a class at seeded random points.
#[pyfunction]
#[pyo3(signature = (class_tag, z_list=vec![0.0, 0.1, 0.5], seed=42, tol_scale=1.0))]
fn verify(
    py: Python<'_>,
    class_tag: &str,
    z_list: Vec<f64>,
    seed: u64,
    tol_scale: f64,
) -> PyResult<PyReport> {
    let t = tag(class_tag)?;
    py.detach(|| report::verify(t, &z_list, seed, tol_scale))
        .map(PyReport)
        .map_err(to_py)
}

/// Sup-norm deviations from the classical system on a grid, as CSV text.
/// `grid` is `"x0,x1,y0,y1,n"`.
#[pyfunction]
#[pyo3(signature = (class_tag, z_list=None, grid=None))]
fn limit_scan(class_tag: &str, z_list: Option<Vec<f64>>, grid: Option<&str>) -> PyResult<String> {
    let t = tag(class_tag)?;
    let zs = z_list.unwrap_or_else(|| scan::halving_sequence(0.2, 0.0125));
    let grid = match grid {
        Some(s) => s.parse().map_err(to_py)?,
        None => GridSpec::default_for(t),
    };
    Ok(scan::limit_scan(t, &zs, &grid).map_err(to_py)?.to_csv())
}

/// Runs a scenario file; returns `(csv, truncated)` without writing anything.
#[pyfunction]
fn run_scenario(path: std::path::PathBuf) -> PyResult<(String, bool)> {
    let cfg = ScenarioConfig::load(&path).map_err(to_py)?;
    let s = scenario::run(&cfg).map_err(to_py)?;
    Ok((s.csv, s.truncated))
}

#[pymodule(name = "lhdef")]
fn lhdef_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DomainError", m.py().get_type::<DomainError>())?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyClassSystem>()?;
    m.add_class::<PyDeformedSystem>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(shc, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(limit_scan, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
