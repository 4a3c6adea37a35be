//! Seeded verification of every identity the library relies on, rendered as a
//! fixed-format table.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{
    deformed_dual_functions, foliation_realization, kks_bracket, make_class, ClassTag,
    Sl2ClassSystem,
};
use crate::deformation::{
    deformed_fields_from_symplectic, predicted_commutators, printed_commutator_23,
    structure_functions, tabulated, DeformedSystem,
};
use crate::dynamics::{
    assemble_two_copy, integrate_rk4, invariant_drift, preset_curves, sample_interior_two_copy,
};
use crate::error::{Error, Result};
use crate::geometry::{
    fd_bracket_oracle, lie_bracket, poisson_bracket, PoissonTensor, ScalarField2D, SymplecticForm2D,
};
use crate::invariants::{
    casimir_level, coupled_invariant, product_bracket, table_coupled_forms, table_offset,
    two_copy_lift,
};

/// Environment variable multiplying every tolerance.
pub const TOL_SCALE_VAR: &str = "LHDEF_TOL_SCALE";

/// Reads the tolerance scale from the environment; 1 when unset.
pub fn tol_scale_from_env() -> Result<f64> {
    match std::env::var(TOL_SCALE_VAR) {
        Err(_) => Ok(1.0),
        Ok(s) => {
            let v: f64 = s.trim().parse().map_err(|_| {
                Error::InvalidConfiguration(format!("{TOL_SCALE_VAR}={s:?} is not a number"))
            })?;
            check_tol_scale(v)?;
            Ok(v)
        }
    }
}

fn check_tol_scale(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfiguration(format!(
            "tolerance scale must be positive, got {v}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Exceeds tolerance on a known transcription discrepancy; reported but
    /// not counted as a failure.
    Flagged,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Flagged => "FLAGGED",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub check: String,
    pub z: Option<f64>,
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub status: Status,
}

impl ReportRow {
    pub fn new(
        check: &str,
        z: Option<f64>,
        max_error: f64,
        tolerance: f64,
        samples: usize,
        known_issue: bool,
    ) -> Self {
        let status = if max_error <= tolerance {
            Status::Pass
        } else if known_issue && max_error.is_finite() {
            Status::Flagged
        } else {
            Status::Fail
        };
        ReportRow {
            check: check.to_string(),
            z,
            max_error,
            tolerance,
            samples,
            status,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub class: ClassTag,
    pub c: f64,
    pub seed: u64,
    pub tol_scale: f64,
    pub rows: Vec<ReportRow>,
}

impl VerificationReport {
    /// True when no row failed.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn find(&self, check: &str, z: Option<f64>) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.check == check && r.z == z)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "verify class={} c={} seed={} tol_scale={}",
            self.class, self.c, self.seed, self.tol_scale
        );
        let _ = writeln!(
            out,
            "{:<40} {:>8} {:>8} {:>11} {:>10}  status",
            "check", "z", "samples", "max_error", "tolerance"
        );
        for r in &self.rows {
            let z = r.z.map_or_else(|| "-".to_string(), |z| format!("{z}"));
            let _ = writeln!(
                out,
                "{:<40} {:>8} {:>8} {:>11.3e} {:>10.1e}  {}",
                r.check,
                z,
                r.samples,
                r.max_error,
                r.tolerance,
                r.status.label()
            );
        }
        let flagged = self
            .rows
            .iter()
            .filter(|r| r.status == Status::Flagged)
            .count();
        let failed = self
            .rows
            .iter()
            .filter(|r| r.status == Status::Fail)
            .count();
        let _ = writeln!(
            out,
            "overall: {} ({} rows, {} failed, {} flagged)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.rows.len(),
            failed,
            flagged
        );
        out
    }
}

/// `|a − b| / max(1, |b|)`.
pub fn scaled_error(a: f64, b: f64) -> f64 {
    let e = (a - b).abs() / b.abs().max(1.0);
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

fn vec_error<const N: usize>(a: [f64; N], b: [f64; N]) -> f64 {
    (0..N).map(|i| scaled_error(a[i], b[i])).fold(0.0, f64::max)
}

/// Sample counts per check.
#[derive(Clone, Copy, Debug)]
pub struct SampleCounts {
    pub classical: usize,
    pub deformed: usize,
    pub casimir: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            classical: 1000,
            deformed: 100,
            casimir: 1000,
        }
    }
}

struct Checker {
    rng: ChaCha8Rng,
    tol_scale: f64,
    rows: Vec<ReportRow>,
}

impl Checker {
    /// Runs `f` on `n` samples and records the largest error; an evaluation
    /// error counts as an infinite error.
    fn run(
        &mut self,
        check: &str,
        z: Option<f64>,
        tol: f64,
        n: usize,
        known_issue: bool,
        mut f: impl FnMut(&mut ChaCha8Rng) -> Result<f64>,
    ) {
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            let e = f(&mut self.rng).unwrap_or(f64::INFINITY);
            worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
        }
        self.record(check, z, worst, tol, n, known_issue);
    }

    fn record(
        &mut self,
        check: &str,
        z: Option<f64>,
        err: f64,
        tol: f64,
        n: usize,
        known_issue: bool,
    ) {
        self.rows.push(ReportRow::new(
            check,
            z,
            err,
            tol * self.tol_scale,
            n,
            known_issue,
        ));
    }
}

/// Entries known to disagree with the generic construction.
fn known_issue(tag: ClassTag, check: &str) -> bool {
    matches!((tag, check), (ClassTag::I4, "tabulated X3 conformance"))
        || check == "commutator [X2,X3] with shc^2 factor"
}

fn bracket_relations(
    h: &[ScalarField2D; 3],
    f: &[ScalarField2D; 3],
    omega: &SymplecticForm2D,
) -> [(ScalarField2D, ScalarField2D); 3] {
    [
        (poisson_bracket(&h[0], &h[1], omega), f[0].clone()),
        (poisson_bracket(&h[0], &h[2], omega), f[1].clone()),
        (poisson_bracket(&h[1], &h[2], omega), f[2].clone()),
    ]
}

fn classical_structure(sys: &Sl2ClassSystem) -> [ScalarField2D; 3] {
    [-&sys.h[0], &sys.h[1] * -2.0, -&sys.h[2]]
}

/// Runs the identity suite for one class with its default Casimir constant.
pub fn verify(
    tag: ClassTag,
    z_list: &[f64],
    seed: u64,
    tol_scale: f64,
) -> Result<VerificationReport> {
    verify_with(tag, z_list, seed, tol_scale, SampleCounts::default())
}

pub fn verify_with(
    tag: ClassTag,
    z_list: &[f64],
    seed: u64,
    tol_scale: f64,
    n: SampleCounts,
) -> Result<VerificationReport> {
    check_tol_scale(tol_scale)?;
    if let Some(z) = z_list.iter().find(|z| !z.is_finite()) {
        return Err(Error::InvalidConfiguration(format!(
            "deformation parameter must be finite, got {z}"
        )));
    }
    let sys = make_class(tag, None)?;
    let mut ck = Checker {
        rng: ChaCha8Rng::seed_from_u64(seed),
        tol_scale,
        rows: Vec::new(),
    };
    classical_rows(&mut ck, &sys, n)?;
    for &z in z_list {
        deformed_rows(&mut ck, &sys, z, n)?;
    }
    Ok(VerificationReport {
        class: tag,
        c: sys.c,
        seed,
        tol_scale,
        rows: ck.rows,
    })
}

fn classical_rows(ck: &mut Checker, sys: &Sl2ClassSystem, n: SampleCounts) -> Result<()> {
    let brackets = bracket_relations(&sys.h, &classical_structure(sys), &sys.omega);
    ck.run(
        "classical brackets",
        None,
        1e-10,
        n.classical,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            brackets.iter().try_fold(0.0f64, |acc, (b, e)| {
                Ok(acc.max(scaled_error(b.eval(p)?, e.eval(p)?)))
            })
        },
    );

    let casimir = sys.casimir_field();
    ck.run(
        "classical Casimir",
        None,
        1e-10,
        n.classical,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            Ok(scaled_error(casimir.eval(p)?, sys.c / 4.0))
        },
    );

    let hx = sys.hamiltonian_fields();
    ck.run(
        "classical fields from Hamiltonians",
        None,
        1e-10,
        n.classical,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            (0..3).try_fold(0.0f64, |acc, i| {
                Ok(acc.max(vec_error(sys.x[i].eval(p)?, hx[i].eval(p)?)))
            })
        },
    );

    let x = &sys.x;
    let comm = [
        (lie_bracket(&x[0], &x[1]), x[0].clone()),
        (lie_bracket(&x[0], &x[2]), x[1].scale_const(2.0)),
        (lie_bracket(&x[1], &x[2]), x[2].clone()),
    ];
    ck.run(
        "classical commutators",
        None,
        1e-10,
        n.classical,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            comm.iter().try_fold(0.0f64, |acc, (a, b)| {
                Ok(acc.max(vec_error(a.eval(p)?, b.eval(p)?)))
            })
        },
    );

    let exact = poisson_bracket(&sys.h[0], &sys.h[2], &sys.omega);
    ck.run(
        "finite-difference bracket oracle",
        None,
        1e-6,
        n.deformed,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            Ok(scaled_error(
                fd_bracket_oracle(&sys.h[0], &sys.h[2], &sys.omega, p, 1e-5)?,
                exact.eval(p)?,
            ))
        },
    );

    let phi = foliation_realization(sys.c)?;
    let canonical = PoissonTensor::canonical();
    let phi_rel = [
        (canonical.bracket(&phi[0], &phi[1]), -&phi[0]),
        (canonical.bracket(&phi[0], &phi[2]), &phi[1] * -2.0),
        (canonical.bracket(&phi[1], &phi[2]), -&phi[2]),
    ];
    let sample_plane = |rng: &mut ChaCha8Rng| {
        let x: f64 = rng.gen_range(0.2..2.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        [sign * x, rng.gen_range(-2.0..2.0)]
    };
    ck.run(
        "foliation realization brackets",
        None,
        1e-10,
        n.deformed,
        false,
        |rng| {
            let p = sample_plane(rng);
            phi_rel.iter().try_fold(0.0f64, |acc, (a, b)| {
                Ok(acc.max(scaled_error(a.eval(p)?, b.eval(p)?)))
            })
        },
    );
    ck.run(
        "foliation realization constraint",
        None,
        1e-12,
        n.deformed,
        false,
        |rng| {
            let p = sample_plane(rng);
            let (a, b, c) = (phi[0].eval(p)?, phi[1].eval(p)?, phi[2].eval(p)?);
            Ok(scaled_error(a * c - b * b, sys.c / 4.0))
        },
    );
    Ok(())
}

fn deformed_rows(ck: &mut Checker, sys: &Sl2ClassSystem, z: f64, n: SampleCounts) -> Result<()> {
    let tag = sys.tag;
    let zs = Some(z);
    let d = DeformedSystem::new(sys, z)?;

    let brackets = bracket_relations(&d.h, &structure_functions(sys, z)?, &sys.omega);
    ck.run(
        "deformed bracket closure",
        zs,
        1e-9,
        n.deformed,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            brackets.iter().try_fold(0.0f64, |acc, (b, e)| {
                Ok(acc.max(scaled_error(b.eval(p)?, e.eval(p)?)))
            })
        },
    );

    let from_omega = deformed_fields_from_symplectic(sys, z)?;
    ck.run(
        "deformed fields: closed vs symplectic",
        zs,
        1e-9,
        n.deformed,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            (0..3).try_fold(0.0f64, |acc, i| {
                Ok(acc.max(vec_error(d.x[i].eval(p)?, from_omega[i].eval(p)?)))
            })
        },
    );

    let x = &d.x;
    let lhs = [
        lie_bracket(&x[0], &x[1]),
        lie_bracket(&x[0], &x[2]),
        lie_bracket(&x[1], &x[2]),
    ];
    let rhs = predicted_commutators(sys, z)?;
    ck.run("deformed commutators", zs, 1e-8, n.deformed, false, |rng| {
        let p = sys.sample_point(rng);
        (0..3).try_fold(0.0f64, |acc, k| {
            Ok(acc.max(vec_error(lhs[k].eval(p)?, rhs[k].eval(p)?)))
        })
    });

    let printed = printed_commutator_23(sys, z)?;
    let name = "commutator [X2,X3] with shc^2 factor";
    ck.run(name, zs, 1e-8, n.deformed, known_issue(tag, name), |rng| {
        let p = sys.sample_point(rng);
        Ok(vec_error(lhs[2].eval(p)?, printed.eval(p)?))
    });

    let level = casimir_level(&d);
    let mut values = Vec::with_capacity(n.casimir);
    let mut worst: f64 = 0.0;
    for _ in 0..n.casimir {
        let p = sys.sample_point(&mut ck.rng);
        match level.eval(p) {
            Ok(v) => {
                worst = worst.max(scaled_error(v, sys.c / 4.0));
                values.push(v);
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    ck.record("Casimir level", zs, worst, 1e-10, n.casimir, false);
    ck.record(
        "Casimir level spread",
        zs,
        std_dev(&values),
        1e-11,
        n.casimir,
        false,
    );

    let lifted = two_copy_lift(&d);
    let hz1 = lifted[0].clone();
    let s = hz1.map(move |h| (h * (2.0 * z)).shc());
    let ch = hz1.map(move |h| (h * (2.0 * z)).cosh());
    let lifted_rel = [
        (product_bracket(&d, &lifted[0], &lifted[1]), -&(&s * &hz1)),
        (
            product_bracket(&d, &lifted[0], &lifted[2]),
            &lifted[1] * -2.0,
        ),
        (
            product_bracket(&d, &lifted[1], &lifted[2]),
            -&(&ch * &lifted[2]),
        ),
    ];
    ck.run(
        "lifted bracket closure",
        zs,
        1e-9,
        n.deformed,
        false,
        |rng| {
            let q = sys.sample_two_copy(rng);
            lifted_rel.iter().try_fold(0.0f64, |acc, (a, b)| {
                Ok(acc.max(scaled_error(a.eval(q)?, b.eval(q)?)))
            })
        },
    );

    let f2 = coupled_invariant(&d);
    let comm2: Vec<_> = lifted.iter().map(|h| product_bracket(&d, &f2, h)).collect();
    ck.run(
        "F_z2 commutes with lifted Hamiltonians",
        zs,
        1e-8,
        n.deformed,
        false,
        |rng| {
            let q = sys.sample_two_copy(rng);
            comm2
                .iter()
                .try_fold(0.0f64, |acc, b| Ok(acc.max(b.eval(q)?.abs())))
        },
    );

    let dual = deformed_dual_functions(z, sys.c)?;
    let dual_rel = [
        (
            kks_bracket(&dual[0], &dual[1]),
            dual[0].map(move |v| -((v * (2.0 * z)).shc() * v)),
        ),
        (kks_bracket(&dual[0], &dual[2]), &dual[1] * -2.0),
        (
            kks_bracket(&dual[1], &dual[2]),
            -&dual[0].zip(&dual[2], move |a, b| (a * (2.0 * z)).cosh() * b),
        ),
    ];
    ck.run(
        "deformed dual functions under KKS",
        zs,
        1e-9,
        n.deformed,
        false,
        |rng| {
            let v1: f64 = rng.gen_range(0.2..2.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let p = [
                sign * v1,
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            dual_rel.iter().try_fold(0.0f64, |acc, (a, b)| {
                Ok(acc.max(scaled_error(a.eval(p)?, b.eval(p)?)))
            })
        },
    );

    let th = tabulated::hamiltonians(tag, z)?;
    ck.run(
        "tabulated h conformance",
        zs,
        1e-9,
        n.deformed,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            (0..3).try_fold(0.0f64, |acc, i| {
                Ok(acc.max(scaled_error(th[i].eval(p)?, d.h[i].eval(p)?)))
            })
        },
    );
    let tx = tabulated::vector_fields(tag, z)?;
    ck.run(
        "tabulated X1 X2 conformance",
        zs,
        1e-9,
        n.deformed,
        false,
        |rng| {
            let p = sys.sample_point(rng);
            (0..2).try_fold(0.0f64, |acc, i| {
                Ok(acc.max(vec_error(tx[i].eval(p)?, d.x[i].eval(p)?)))
            })
        },
    );
    let name = "tabulated X3 conformance";
    ck.run(name, zs, 1e-9, n.deformed, known_issue(tag, name), |rng| {
        let p = sys.sample_point(rng);
        Ok(vec_error(tx[2].eval(p)?, d.x[2].eval(p)?))
    });
    let table_f2 = table_coupled_forms(tag, z)?;
    let offset = table_offset(tag);
    ck.run(
        "tabulated F_z⁽²⁾ conformance",
        zs,
        1e-9,
        n.deformed,
        false,
        |rng| {
            let q = sys.sample_two_copy(rng);
            Ok(scaled_error(f2.eval(q)? - offset, table_f2.eval(q)?))
        },
    );

    let mut drift: f64 = 0.0;
    let presets = preset_curves();
    for (_, b) in &presets {
        let q = sample_interior_two_copy(tag, &mut ck.rng);
        let traj = integrate_rk4(&assemble_two_copy(&d, b), q, 0.0, 1.0, 1e-3)?;
        drift = if traj.truncated {
            f64::INFINITY
        } else {
            drift.max(invariant_drift(&traj, &f2, "F_z2")?.max_rel)
        };
    }
    ck.record(
        "F_z2 relative drift (RK4, dt=1e-3)",
        zs,
        drift,
        1e-7,
        presets.len(),
        false,
    );
    Ok(())
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}
