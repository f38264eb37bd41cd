//! `rdx3`: check structural conditions, compute energy parameters, simulate
//! and verify three-species reaction-diffusion models.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, all conditions certified, run bounded |
//! | 1 | malformed config, usage or I/O error |
//! | 2 | some condition falsified |
//! | 3 | some condition undecided |
//! | 4 | no admissible `(θ, σ)` found |
//! | 5 | blow-up flagged during a run |
//! | 6 | `verify`: no theorem applies |

mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rdx3_core::checker::Overall;
use rdx3_core::lyapunov::{DiffusionTriple, Theorem};
use rdx3_core::pipeline::{self, CheckReport, SimulationOutput};
use rdx3_core::{zoo, Error, RunConfig};
use serde_json::Value;

use crate::output::{write_atomic, Format};

#[derive(Parser, Debug)]
#[command(name = "rdx3", version, about = "Three-species reaction-diffusion toolkit")]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify or falsify the structural conditions of the configured model.
    Check,
    /// Energy exponent, (θ, σ) and weight thresholds for a theorem.
    Params {
        /// Diffusion coefficients `d1,d2,d3`; defaults to the model's.
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<f64>>,
        /// Growth degree; defaults to the model's.
        #[arg(long)]
        m: Option<u32>,
        /// Space dimension; defaults to the grid's.
        #[arg(long = "dim", short = 'n')]
        dim: Option<u32>,
        #[arg(long, value_enum)]
        theorem: Option<TheoremArg>,
    },
    /// Run the simulator and write the trajectory CSV and monitor JSON.
    Simulate {
        /// `FIELD=V1,V2,...`: one run per value, each in its own directory.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Check, pick a theorem, compute its parameters and simulate.
    Verify,
    /// Built-in models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Subcommand, Debug)]
enum ModelsAction {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoremArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

pub(crate) const EXIT_OK: u8 = 0;
pub(crate) const EXIT_ERROR: u8 = 1;
const EXIT_FALSIFIED: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_SEARCH: u8 = 4;
pub(crate) const EXIT_BLOWUP: u8 = 5;

pub(crate) fn error_code(e: &Error) -> u8 {
    match e {
        Error::SearchFailed(_) => EXIT_SEARCH,
        _ => EXIT_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

/// Config as raw JSON with the `--seed` override applied.
fn load_config_value(cli: &Cli) -> rdx3_core::Result<Value> {
    let mut v = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::config(format!("invalid config: {e}")))?
        }
        None => Value::Object(Default::default()),
    };
    if let Some(seed) = cli.seed {
        match v.as_object_mut() {
            Some(obj) => {
                obj.insert("seed".into(), seed.into());
            }
            None => return Err(Error::config("config must be a JSON object")),
        }
    }
    Ok(v)
}

pub(crate) fn config_from_value(v: &Value) -> rdx3_core::Result<RunConfig> {
    RunConfig::from_json(&v.to_string())
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn print_json<T: serde::Serialize>(x: &T) -> rdx3_core::Result<String> {
    let mut s = serde_json::to_string_pretty(x)?;
    s.push('\n');
    print!("{s}");
    Ok(s)
}

fn run(cli: &Cli) -> rdx3_core::Result<u8> {
    if let Command::Models { action } = &cli.command {
        return models(action, cli.format);
    }
    let value = load_config_value(cli)?;
    match &cli.command {
        Command::Check => {
            let cfg = config_from_value(&value)?;
            let report = pipeline::run_check(&cfg)?;
            let text = match cli.format {
                Format::Json => print_json(&report)?,
                Format::Csv => {
                    let s = output::check_csv(&report);
                    print!("{s}");
                    s
                }
            };
            if let Some(dir) = &cli.out {
                write_atomic(&dir.join(&cfg.output.report), text.as_bytes())?;
            }
            Ok(check_code(&report))
        }
        Command::Params { d, m, dim, theorem } => {
            let cfg = config_from_value(&value)?;
            let needs_model = d.is_none() || m.is_none() || theorem.is_none();
            let model = if needs_model { Some(cfg.resolve_model()?) } else { None };
            let d = match d {
                Some(v) => match v.as_slice() {
                    [a, b, c] => DiffusionTriple::new([*a, *b, *c])?,
                    _ => return Err(Error::config("--d takes exactly three values")),
                },
                None => model.as_ref().expect("resolved").diffusion,
            };
            let m = match m {
                Some(m) => *m,
                None => rdx3_core::checker::check_growth(&model.as_ref().expect("resolved").reactions).m,
            };
            let n = dim.unwrap_or(cfg.grid.dim() as u32);
            let theorem = match theorem {
                Some(TheoremArg::One) => Theorem::One,
                Some(TheoremArg::Two) => Theorem::Two,
                None => model
                    .as_ref()
                    .and_then(|md| cfg.weights.as_ref().or(md.weights.as_ref()))
                    .map(|w| Theorem::for_branch(w.branch()))
                    .unwrap_or(Theorem::One),
            };
            let report = pipeline::run_params(&d, m, n, theorem, &cfg.search)?;
            let text = match cli.format {
                Format::Json => print_json(&report)?,
                Format::Csv => {
                    let s = output::minors_csv(&report);
                    print!("{s}");
                    s
                }
            };
            if let Some(dir) = &cli.out {
                write_atomic(&dir.join(&cfg.output.report), text.as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Command::Simulate { sweep: Some(spec) } => sweep::run_sweep(&value, spec, &out_dir(cli)),
        Command::Simulate { sweep: None } => {
            let cfg = config_from_value(&value)?;
            let sim = pipeline::run_simulate(&cfg)?;
            write_simulation(&out_dir(cli), &cfg, &sim)?;
            match cli.format {
                Format::Json => {
                    print_json(&sim.monitor)?;
                }
                Format::Csv => print!("{}", String::from_utf8_lossy(&sim.csv()?)),
            }
            Ok(if sim.monitor.blowup_suspected { EXIT_BLOWUP } else { EXIT_OK })
        }
        Command::Verify => {
            let cfg = config_from_value(&value)?;
            let verified = pipeline::run_verify(&cfg)?;
            let text = print_json(&verified.report)?;
            if let Some(dir) = &cli.out {
                write_atomic(&dir.join(&cfg.output.report), text.as_bytes())?;
                if let Some(sim) = &verified.simulation {
                    write_simulation(dir, &cfg, sim)?;
                }
            }
            Ok(verified.report.outcome.exit_code() as u8)
        }
        Command::Models { .. } => unreachable!("handled above"),
    }
}

pub(crate) fn write_simulation(dir: &Path, cfg: &RunConfig, sim: &SimulationOutput) -> rdx3_core::Result<()> {
    write_atomic(&dir.join(&cfg.output.trajectory), &sim.csv()?)?;
    let mut monitor = serde_json::to_string_pretty(&sim.monitor)?;
    monitor.push('\n');
    write_atomic(&dir.join(&cfg.output.monitor), monitor.as_bytes())
}

fn check_code(report: &CheckReport) -> u8 {
    match report.overall {
        Overall::AllCertified => EXIT_OK,
        Overall::AnyFalsified => EXIT_FALSIFIED,
        Overall::AnyUnknown => EXIT_UNKNOWN,
    }
}

fn models(action: &ModelsAction, format: Format) -> rdx3_core::Result<u8> {
    match action {
        ModelsAction::List => match format {
            Format::Json => {
                let list: Vec<Value> = zoo::registry()
                    .iter()
                    .map(|e| serde_json::json!({"name": e.name, "description": e.description}))
                    .collect();
                print_json(&list)?;
            }
            Format::Csv => {
                println!("name,description");
                for e in zoo::registry() {
                    println!("{},\"{}\"", e.name, e.description.replace('"', "\"\""));
                }
            }
        },
        ModelsAction::Show { name } => {
            print_json(&zoo::find(name)?)?;
        }
    }
    Ok(EXIT_OK)
}
