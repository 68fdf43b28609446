//! Command-line front end. Exit codes: 0 success, 1 config error, 2 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::{
    emit_plot_data, run_experiment, run_theory_suite, ExperimentConfig, ReportBundle, TheoryConfig,
};
use crate::benchmarks::{Benchmark, BenchmarkId};
use crate::error::{Error, Result};
use crate::metrics::Axis;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "parallel-thompson",
    version,
    about = "Parallel Thompson sampling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment config and write a report bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override `base_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Override `runs`.
        #[arg(long)]
        runs: Option<usize>,
        /// Output directory; falls back to the config's `output`, then `report`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the theory-validation suite and print its JSON report.
    Theory {
        /// Theory config (JSON); defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Override the concentration run count.
        #[arg(long)]
        runs: Option<usize>,
        /// Also write `theory.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write aligned per-strategy curve CSVs from report bundles.
    PlotData {
        /// Bundle directories written by `run`.
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
    },
    /// List benchmark names, dimensions, default noise and optimum values.
    ListBenchmarks,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Count,
    Time,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run_cli<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(
                if code == EXIT_OK {
                    out as &mut dyn Write
                } else {
                    err
                },
                "{e}"
            );
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch<W: Write>(command: Command, out: &mut W) -> Result<i32> {
    match command {
        Command::Run {
            config,
            seed,
            runs,
            out: dir,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(r) = runs {
                cfg.runs = r;
            }
            let dir = dir
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("report"));
            let bundle = run_experiment(&cfg)?;
            bundle.write_to(&dir)?;
            let s = bundle.summary();
            writeln!(
                out,
                "{}: {} runs, regret {} at n = {}, {} at t = {}; wrote {}",
                s.label,
                s.runs,
                fmt_opt(s.final_count_regret),
                fmt_opt(s.final_count),
                fmt_opt(s.final_time_regret),
                fmt_opt(s.final_time),
                dir.display()
            )?;
            Ok(EXIT_OK)
        }
        Command::Theory {
            config,
            seed,
            runs,
            out: dir,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::config(
                            path.display().to_string(),
                            format!("cannot read config: {e}"),
                        )
                    })?;
                    let de = &mut serde_json::Deserializer::from_str(&text);
                    serde_path_to_error::deserialize(de).map_err(|e| {
                        Error::config(e.path().to_string(), e.into_inner().to_string())
                    })?
                }
                None => TheoryConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = runs {
                cfg.concentration_runs = r;
            }
            let report = run_theory_suite(&cfg)?;
            let json = report.to_json_string();
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("theory.json"), &json)?;
            }
            out.write_all(json.as_bytes())?;
            Ok(if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_RUNTIME
            })
        }
        Command::PlotData {
            bundles,
            out: dir,
            axis,
        } => {
            let loaded = bundles
                .iter()
                .map(|b| ReportBundle::load(b))
                .collect::<Result<Vec<_>>>()?;
            let which = axis.map(|a| match a {
                AxisArg::Count => Axis::ByCount,
                AxisArg::Time => Axis::ByTime,
            });
            for path in emit_plot_data(&loaded, which, &dir)? {
                writeln!(out, "{}", path.display())?;
            }
            Ok(EXIT_OK)
        }
        Command::ListBenchmarks => {
            writeln!(out, "name,dim,noise_sd,opt_value")?;
            for id in BenchmarkId::ALL {
                let b = Benchmark::new(id);
                writeln!(
                    out,
                    "{},{},{},{}",
                    id.name(),
                    b.dim(),
                    b.noise_sd,
                    crate::sim::fmt_f64(b.opt_value())
                )?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}
