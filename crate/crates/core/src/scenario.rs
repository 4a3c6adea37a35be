//! Scenario files: one deformed Lie system, one initial condition, one CSV.
//!
//! ```toml
//! [system]
//! class = "P2"
//! z = 0.1
//!
//! [coefficients]
//! b1 = { kind = "constant", value = 1.0 }
//! b2 = { kind = "polynomial", coefficients = [0.0, 0.5] }
//! b3 = { kind = "sinusoid", amplitude = 0.2, frequency = 3.0 }
//!
//! [integration]
//! mode = "two_copy"
//! initial = [0.2, 1.1, -0.4, 0.7]
//! t1 = 1.0
//! dt = 1e-3
//!
//! [output]
//! csv = "p2.csv"
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{make_class, ClassTag};
use crate::deformation::DeformedSystem;
use crate::dynamics::{
    assemble, assemble_two_copy, integrate_rk4, sample_interior_two_copy, CoefficientCurve,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::invariants::{casimir_level, coupled_invariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Single,
    TwoCopy,
}

impl Mode {
    pub fn dimension(self) -> usize {
        match self {
            Mode::Single => 2,
            Mode::TwoCopy => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub class: ClassTag,
    /// Casimir constant; the class default when absent.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSection {
    pub b1: CoefficientCurve,
    pub b2: CoefficientCurve,
    pub b3: CoefficientCurve,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub mode: Mode,
    /// Starting point; drawn from the seeded interior sampler when absent.
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// CSV path, relative to the scenario file.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemSection,
    pub coefficients: CoefficientSection,
    pub integration: IntegrationSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidConfiguration(msg.into())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a scenario file; a relative `output.csv` is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(csv) = &cfg.output.csv {
            if csv.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new("."));
                cfg.output.csv = Some(base.join(csv));
            }
        }
        Ok(cfg)
    }

    pub fn curves(&self) -> [CoefficientCurve; 3] {
        let c = &self.coefficients;
        [c.b1.clone(), c.b2.clone(), c.b3.clone()]
    }

    pub fn validate(&self) -> Result<()> {
        let (sys, int) = (&self.system, &self.integration);
        if !sys.z.is_finite() {
            return Err(config_error(format!("z must be finite, got {}", sys.z)));
        }
        let class = make_class(sys.class, sys.c).map_err(|e| config_error(e.to_string()))?;
        for curve in self.curves() {
            curve.validate()?;
        }
        if !(int.t0.is_finite() && int.t1.is_finite() && int.t1 > int.t0) {
            return Err(config_error(format!(
                "need t1 > t0, got t0 = {}, t1 = {}",
                int.t0, int.t1
            )));
        }
        if !(int.dt > 0.0 && int.dt <= int.t1 - int.t0) {
            return Err(config_error(format!(
                "dt must lie in (0, t1 − t0], got {}",
                int.dt
            )));
        }
        if let Some(p) = &int.initial {
            if p.len() != int.mode.dimension() {
                return Err(config_error(format!(
                    "mode {:?} needs an initial point with {} coordinates, got {}",
                    int.mode,
                    int.mode.dimension(),
                    p.len()
                )));
            }
            for copy in p.chunks(2) {
                if !class.domain.contains(&[copy[0], copy[1]])
                    || copy.iter().any(|v| !v.is_finite())
                {
                    return Err(config_error(format!(
                        "initial point {p:?} is outside the {} domain",
                        sys.class
                    )));
                }
            }
        }
        Ok(())
    }

    /// The configured initial point, or a seeded interior sample.
    pub fn initial_point(&self) -> Vec<f64> {
        match &self.integration.initial {
            Some(p) => p.clone(),
            None => {
                let q = sample_interior_two_copy(
                    self.system.class,
                    &mut ChaCha8Rng::seed_from_u64(self.output.seed),
                );
                q[..self.integration.mode.dimension()].to_vec()
            }
        }
    }
}

/// Outcome of a scenario run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub csv: String,
    pub samples: usize,
    pub final_time: f64,
    pub truncated: bool,
    /// Largest relative change of the tracked two-copy invariant (two-copy mode only).
    pub coupled_drift: Option<f64>,
}

impl RunSummary {
    pub fn line(&self) -> String {
        let mut s = format!(
            "samples={} t_end={} truncated={}",
            self.samples, self.final_time, self.truncated
        );
        if let Some(d) = self.coupled_drift {
            let _ = write!(s, " F_z2_rel_drift={d:.3e}");
        }
        s
    }
}

fn render_csv<const N: usize>(traj: &Trajectory<N>, coords: &[&str]) -> String {
    let mut out = String::from("t");
    for c in coords {
        out.push(',');
        out.push_str(c);
    }
    for (name, _) in &traj.invariant_samples {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (k, (t, p)) in traj.times.iter().zip(&traj.states).enumerate() {
        let _ = write!(out, "{t:.16e}");
        for v in p {
            let _ = write!(out, ",{v:.16e}");
        }
        for (_, values) in &traj.invariant_samples {
            let _ = write!(out, ",{:.16e}", values[k]);
        }
        out.push('\n');
    }
    out
}

/// Integrates the scenario and renders the CSV. Nothing is written to disk.
pub fn run(cfg: &ScenarioConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let sys = make_class(cfg.system.class, cfg.system.c)?;
    let d = DeformedSystem::new(&sys, cfg.system.z)?;
    let b = cfg.curves();
    let p = cfg.initial_point();
    let int = &cfg.integration;
    let level = casimir_level(&d);
    match int.mode {
        Mode::Single => {
            let mut traj = integrate_rk4(&assemble(&d, &b), [p[0], p[1]], int.t0, int.t1, int.dt)?;
            traj.track("F_z", &level)?;
            Ok(RunSummary {
                csv: render_csv(&traj, &["x", "y"]),
                samples: traj.len(),
                final_time: *traj.times.last().expect("initial sample"),
                truncated: traj.truncated,
                coupled_drift: None,
            })
        }
        Mode::TwoCopy => {
            let mut traj = integrate_rk4(
                &assemble_two_copy(&d, &b),
                [p[0], p[1], p[2], p[3]],
                int.t0,
                int.t1,
                int.dt,
            )?;
            traj.track("F_z", &level.on_copy(0))?;
            let f2 = coupled_invariant(&d);
            traj.track("F_z2", &f2)?;
            let values = &traj.invariant_samples[1].1;
            let first = values[0];
            let drift = values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
                / if first == 0.0 { 1.0 } else { first.abs() };
            Ok(RunSummary {
                csv: render_csv(&traj, &["x1", "y1", "x2", "y2"]),
                samples: traj.len(),
                final_time: *traj.times.last().expect("initial sample"),
                truncated: traj.truncated,
                coupled_drift: Some(drift),
            })
        }
    }
}
