//! `xorbench`: generate planted 3R3X ensembles, run solver plans, and turn the
//! run logs into time-to-solution curves and scaling fits.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xorsat_bench::bench::{
    cmd_analyze, cmd_export, cmd_gen, cmd_solve, cmd_validate, AnalysisOptions, BenchmarkPlan, FpExpr, GridSpec,
    SolveOptions, TimeUnit,
};
use xorsat_bench::metrics::{WindowPolicy, DEFAULT_RESAMPLES};
use xorsat_bench::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "xorbench", version, about = "Planted 3-regular 3-XORSAT solver benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instance ensembles with a hash manifest.
    Gen {
        /// Comma-separated spin counts n (even, ≥ 8).
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute the pending cells of a benchmark plan.
    Solve {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        resume: bool,
        /// Stop after this many cells.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Bootstrap TTS curves and scaling fits from a run directory.
    Analyze {
        /// Run directory (or its `logs` subdirectory).
        #[arg(long)]
        logs: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        quantiles: Vec<f64>,
        /// `K`, `K/n` or `floor(K/n)`.
        #[arg(long, default_value = "1")]
        fp: String,
        /// `log:a:b:k`, `lin:a:b:k`, `list:v1,v2,..` or `auto[:k]`.
        #[arg(long, default_value = "auto")]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
        resamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `auto` or `MIN:MAX` sizes.
        #[arg(long, default_value = "auto")]
        window: String,
        #[arg(long, value_enum, default_value = "steps")]
        units: Units,
        /// Fit optima that sit on a grid endpoint.
        #[arg(long)]
        include_boundary: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check instance files and manifest hashes.
    Validate {
        #[arg(long)]
        instances: PathBuf,
        /// Exit with the data-error code when any check fails.
        #[arg(long)]
        strict: bool,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write the CSV tables of an analysis directory.
    Export {
        #[arg(long)]
        analysis: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Units {
    Steps,
    Seconds,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn parse_window(s: &str) -> Result<WindowPolicy, Failure> {
    if s == "auto" {
        return Ok(WindowPolicy::Auto);
    }
    let bad = || Failure::Usage(format!("bad window '{s}', expected auto or MIN:MAX"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok(WindowPolicy::Manual {
        min_n: a.parse().map_err(|_| bad())?,
        max_n: b.parse().map_err(|_| bad())?,
    })
}

fn run_dir(p: &Path) -> PathBuf {
    if !p.join("logs").is_dir() && p.file_name().is_some_and(|n| n == "logs") {
        if let Some(parent) = p.parent() {
            return parent.to_path_buf();
        }
    }
    p.to_path_buf()
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen {
            sizes,
            count,
            seed,
            out,
        } => {
            let m = cmd_gen(&sizes, count, seed, &out)?;
            println!("wrote {} instances to {}", m.entries.len(), out.display());
        }
        Command::Solve {
            plan,
            workers,
            resume,
            limit,
        } => {
            let p = BenchmarkPlan::read(&plan)?;
            let base = plan.parent().map(Path::to_path_buf).unwrap_or_default();
            let s = cmd_solve(&p, &base, &SolveOptions { workers, resume, limit })?;
            println!(
                "cells: {} planned, {} already done, {} executed, {} remaining, {} flagged errors",
                s.planned, s.already_done, s.executed, s.remaining, s.flagged_errors
            );
        }
        Command::Analyze {
            logs,
            quantiles,
            fp,
            grid,
            resamples,
            seed,
            window,
            units,
            include_boundary,
            out,
        } => {
            let opts = AnalysisOptions {
                quantiles,
                fp: fp.parse::<FpExpr>()?,
                grid: grid.parse::<GridSpec>()?,
                resamples,
                seed,
                window: parse_window(&window)?,
                units: match units {
                    Units::Steps => TimeUnit::Steps,
                    Units::Seconds => TimeUnit::Seconds,
                },
                include_boundary,
            };
            let rep = cmd_analyze(&run_dir(&logs), &opts, &out)?;
            for s in &rep.series {
                for f in &s.fits {
                    println!(
                        "{} {} q={}: alpha = {:.5} ± {:.5}, beta = {:.3} ± {:.3}, window {:?}",
                        s.solver_id,
                        s.params_hash,
                        f.quantile.unwrap_or(f64::NAN),
                        f.alpha,
                        f.alpha_2sigma,
                        f.beta,
                        f.beta_2sigma,
                        f.window
                    );
                }
            }
            for g in &rep.gaps {
                eprintln!(
                    "gap: {} {} size {:?} q {:?}: {}",
                    g.solver_id, g.params_hash, g.size, g.quantile, g.reason
                );
            }
            println!("analysis written to {}", out.display());
        }
        Command::Validate {
            instances,
            strict,
            json,
        } => {
            let s = cmd_validate(&instances)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&s).map_err(Error::from)?);
            } else {
                print!("{}", s.render());
            }
            if strict && !s.passed() {
                return Err(Failure::Data("validation failed".into()));
            }
        }
        Command::Export { analysis, format } => {
            cmd_export(&analysis, &format)?;
            println!("csv written to {}", analysis.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(m))) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Ok(Err(Failure::Data(m))) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_DATA)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
