use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lhdef::catalog::ClassTag;
use lhdef::report::{tol_scale_from_env, verify};
use lhdef::scan::{halving_sequence, limit_scan, GridSpec};
use lhdef::scenario::{run, ScenarioConfig};
use lhdef::Error;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;

/// Poisson–Hopf deformed sl(2) Lie–Hamilton systems on the plane.
#[derive(Parser)]
#[command(name = "lhdef", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario file and write its trajectory as CSV.
    Run {
        /// Scenario file (TOML).
        config_path: Option<PathBuf>,
        #[arg(long = "config", value_name = "PATH", conflicts_with = "config_path")]
        config: Option<PathBuf>,
        /// Output CSV; overrides the scenario's `output.csv`. Stdout when neither is set.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Check every identity at seeded random points and print a report.
    Verify {
        #[command(flatten)]
        class: ClassArg,
        /// Comma-separated deformation parameters.
        #[arg(long, value_name = "LIST", default_value = "0,0.1,0.5")]
        z: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Measure convergence of the deformed system to the classical one.
    LimitScan {
        #[command(flatten)]
        class: ClassArg,
        /// Comma-separated, decreasing deformation parameters [default: 0.2 halved down to 0.0125].
        #[arg(long, value_name = "LIST")]
        z: Option<String>,
        /// Grid as "x0,x1,y0,y1,n" [default: a class-specific box inside the domain].
        #[arg(long, value_name = "SPEC")]
        grid: Option<String>,
        /// Output CSV; stdout when absent.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ClassArg {
    /// Class tag: P2, I4 or I5.
    #[arg(value_name = "CLASS")]
    class_pos: Option<String>,
    #[arg(long = "class", value_name = "CLASS", conflicts_with = "class_pos")]
    class: Option<String>,
}

impl ClassArg {
    fn tag(&self) -> Result<ClassTag, Error> {
        match self.class.as_ref().or(self.class_pos.as_ref()) {
            Some(s) => s.parse(),
            None => Err(Error::InvalidConfiguration(
                "a class (P2, I4 or I5) is required".into(),
            )),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| {
                    Error::InvalidConfiguration(format!("cannot parse {v:?} in list {s:?}"))
                })
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run {
            config_path,
            config,
            out,
        } => {
            let path = config
                .or(config_path)
                .ok_or_else(|| Error::InvalidConfiguration("a scenario file is required".into()))?;
            let cfg = ScenarioConfig::load(&path)?;
            let summary = run(&cfg)?;
            match out.or(cfg.output.csv.clone()) {
                Some(target) => {
                    write_file(&target, &summary.csv)?;
                    println!("wrote {} {}", target.display(), summary.line());
                }
                None => {
                    print!("{}", summary.csv);
                    eprintln!("{}", summary.line());
                }
            }
            if summary.truncated {
                eprintln!("trajectory left the domain at t = {}", summary.final_time);
                Ok(EXIT_TRUNCATED)
            } else {
                Ok(0)
            }
        }
        Command::Verify {
            class,
            z,
            seed,
            out,
        } => {
            let report = verify(class.tag()?, &parse_list(&z)?, seed, tol_scale_from_env()?)?;
            let text = report.render();
            print!("{text}");
            if let Some(path) = out {
                write_file(&path, &text)?;
            }
            Ok(if report.passed() {
                0
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::LimitScan {
            class,
            z,
            grid,
            out,
        } => {
            let tag = class.tag()?;
            let zs = match z {
                Some(list) => parse_list(&list)?,
                None => halving_sequence(0.2, 0.0125),
            };
            let grid = match grid {
                Some(spec) => spec.parse()?,
                None => GridSpec::default_for(tag),
            };
            let table = limit_scan(tag, &zs, &grid)?;
            let csv = table.to_csv();
            match out {
                Some(path) => {
                    write_file(&path, &csv)?;
                    println!(
                        "wrote {} ({} z values, {} grid points)",
                        path.display(),
                        table.rows.len(),
                        table.grid_points
                    );
                }
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
