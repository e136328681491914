use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dynmatch::bench::{run_reader, verify, Family, InstanceSpec, RunReport, DEFAULT_NOISE};
use dynmatch::pipeline::{Fallback, PipelineConfig};
use dynmatch::stream::Stream;
use dynmatch::Error;

/// Single-pass approximate maximum matching over dynamic graph streams.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    ErdosRenyi,
    PlantedMatching,
    HardSparseInduced,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FallbackArg {
    ParityStore,
    BestEffortMos,
    Error,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a stream file.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: u32,
        /// Approximation target shaping the hard family.
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
        /// Planted matching size (default n/4).
        #[arg(long)]
        mu: Option<u32>,
        /// Edge probability for erdos_renyi.
        #[arg(long, default_value_t = 0.01)]
        p: f64,
        /// Distractor density for hard_sparse_induced.
        #[arg(long, default_value_t = DEFAULT_NOISE)]
        noise: f64,
        #[arg(long, default_value_t = 0.0)]
        deletion_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the pipeline over a stream file and emit a JSON report.
    Run {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Space allowed for the parity-store fallback.
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long, value_enum, default_value = "parity_store")]
        fallback: FallbackArg,
        /// α at or below which only a parity store is kept.
        #[arg(long, default_value_t = 100.0)]
        small_alpha_threshold: f64,
        /// Leave per-guess bit counts out of the report.
        #[arg(long)]
        no_per_guess: bool,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
        /// Report path (stdout if absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a report against the stream it came from. Exit code 1 on failure.
    Verify {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
}

fn seed_override(seed: u64) -> Result<u64, Error> {
    match std::env::var("SKETCH_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Config(format!("SKETCH_SEED is not an integer: {s:?}"))),
        Err(_) => Ok(seed),
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Config(e.to_string());
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn open(path: &PathBuf) -> Result<File, Error> {
    File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode, Error> {
    match Cli::parse().cmd {
        Cmd::Gen { family, n, alpha, mu, p, noise, deletion_fraction, seed, out } => {
            let family = match family {
                FamilyArg::ErdosRenyi => Family::ErdosRenyi { p },
                FamilyArg::PlantedMatching => Family::PlantedMatching { mu: mu.unwrap_or(n / 4) },
                FamilyArg::HardSparseInduced => Family::HardSparseInduced { alpha, noise },
            };
            let spec = InstanceSpec { family, n, deletion_fraction, seed: seed_override(seed)? };
            emit(out.as_ref(), &spec.generate()?.stream.to_text())?;
        }
        Cmd::Run { stream, alpha, delta, seed, budget_bits, fallback, small_alpha_threshold, no_per_guess, timing, report } => {
            let cfg = PipelineConfig {
                delta,
                seed: seed_override(seed)?,
                fallback: match fallback {
                    FallbackArg::ParityStore => Fallback::ParityStore,
                    FallbackArg::BestEffortMos => Fallback::BestEffortMos,
                    FallbackArg::Error => Fallback::Error,
                },
                small_alpha_threshold,
                budget_bits,
                per_guess_report: !no_per_guess,
                ..PipelineConfig::new(2, alpha)
            };
            let out = run_reader(BufReader::new(open(&stream)?), cfg, timing)?;
            let mut text = serde_json::to_string_pretty(&out).expect("serializable");
            text.push('\n');
            emit(report.as_ref(), &text)?;
        }
        Cmd::Verify { stream, report } => {
            let text = std::fs::read_to_string(&stream).map_err(|e| Error::Config(format!("{}: {e}", stream.display())))?;
            let s = Stream::parse(&text)?;
            let r: RunReport = serde_json::from_reader(BufReader::new(open(&report)?))
                .map_err(|e| Error::Config(format!("{}: {e}", report.display())))?;
            let v = verify(&s, &r);
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            if !v.pass {
                for m in &v.messages {
                    eprintln!("FAIL: {m}");
                }
                return Ok(ExitCode::FAILURE);
            }
            eprintln!("PASS");
        }
    }
    Ok(ExitCode::SUCCESS)
}
