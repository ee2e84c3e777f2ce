use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use thermstab::channel::ThermalParams;

mod config;
mod memory;
mod oracle;
mod presets;
mod report;
mod sweep;

#[derive(Parser)]
#[command(name = "thermstab", version, about = "Thermal relaxation in stabilizer simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose one thermal relaxation channel and compare its approximations.
    Channel {
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        t2: Option<f64>,
        /// Channel duration; defaults to T1/100.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        p1: f64,
        /// Device preset supplying T1 and T2 in microseconds.
        #[arg(long)]
        preset: Option<String>,
        /// Also write the report as `quantity,value` CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write figure data as CSV.
    Sweep {
        kind: SweepKind,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Bloch meridian angles (delta_d).
        #[arg(long)]
        thetas: Option<String>,
        /// T2/T1 grid (delta_f, overhead).
        #[arg(long)]
        t2_ratios: Option<String>,
        /// tau/T1 grid (delta_f, delta_f_p1, overhead).
        #[arg(long)]
        tau_ratios: Option<String>,
        /// Equilibrium population grid (delta_f_p1).
        #[arg(long)]
        p1s: Option<String>,
        /// Fixed T2/T1 (delta_d, delta_f_p1).
        #[arg(long, default_value_t = 1.5)]
        t2_ratio: f64,
        /// Fixed tau/T1 (delta_d).
        #[arg(long, default_value_t = 1.0)]
        tau_ratio: f64,
        /// Fixed equilibrium population (delta_d, delta_f, overhead).
        #[arg(long, default_value_t = 0.0)]
        p1: f64,
        /// Number of noise sites for the overhead totals.
        #[arg(long, default_value_t = 1)]
        n_c: usize,
    },
    /// Run a memory experiment described by a TOML config.
    Memory {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        decoder: Option<String>,
        /// Worker threads; falls back to THERMSTAB_THREADS, then all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Validate and print the canonical config without running.
        #[arg(long)]
        check: bool,
    },
    /// Check decompositions against the dense oracle and the sampler against tomography.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long, default_value_t = 200_000)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    #[value(name = "delta_d")]
    DeltaD,
    #[value(name = "delta_f")]
    DeltaF,
    #[value(name = "delta_f_p1")]
    DeltaFP1,
    #[value(name = "overhead")]
    Overhead,
}

fn grid(spec: &Option<String>, default: &str) -> Result<Vec<f64>> {
    sweep::parse_grid(spec.as_deref().unwrap_or(default))
}

fn channel_params(t1: Option<f64>, t2: Option<f64>, tau: Option<f64>, p1: f64, preset: Option<&str>) -> Result<ThermalParams> {
    let preset = preset.map(presets::lookup).transpose()?;
    let t1 = t1.or(preset.map(|p| p.t1)).context("--t1 is required unless --preset is given")?;
    let t2 = t2.or(preset.map(|p| p.t2)).context("--t2 is required unless --preset is given")?;
    Ok(ThermalParams::new(t1, t2, tau.unwrap_or(t1 / 100.0), p1)?)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Channel { t1, t2, tau, p1, preset, csv } => {
            let params = channel_params(t1, t2, tau, p1, preset.as_deref())?;
            let report = report::ChannelReport::new(params);
            if let Some(name) = &preset {
                println!("preset {name}");
            }
            print!("{}", report.to_text());
            if let Some(path) = csv {
                emit(&report.to_csv(), Some(&path))?;
            }
        }
        Command::Sweep {
            kind,
            out,
            thetas,
            t2_ratios,
            tau_ratios,
            p1s,
            t2_ratio,
            tau_ratio,
            p1,
            n_c,
        } => {
            let text = match kind {
                SweepKind::DeltaD => {
                    let thetas = match &thetas {
                        Some(s) => sweep::parse_grid(s)?,
                        None => sweep::default_thetas(),
                    };
                    let params = ThermalParams::new(1.0, t2_ratio, tau_ratio, p1)?;
                    sweep::delta_d_csv(&thetas, &params)?
                }
                SweepKind::DeltaF => sweep::delta_f_csv(
                    &grid(&t2_ratios, "1.02:2:50")?,
                    &grid(&tau_ratios, "0.02:1:50")?,
                    p1,
                )?,
                SweepKind::DeltaFP1 => sweep::delta_f_p1_csv(
                    &grid(&p1s, "0.005:0.1:20")?,
                    &grid(&tau_ratios, "0.05:1:20")?,
                    t2_ratio,
                )?,
                SweepKind::Overhead => {
                    if n_c == 0 {
                        bail!("--n-c must be >= 1");
                    }
                    sweep::overhead_csv(
                        &grid(&t2_ratios, "0.05:2:40")?,
                        &grid(&tau_ratios, "0.025:1:40")?,
                        p1,
                        n_c,
                    )?
                }
            };
            emit(&text, out.as_ref())?;
        }
        Command::Memory {
            config: path,
            output_dir,
            shots,
            seed,
            decoder,
            threads,
            check,
        } => {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let mut raw = config::parse(&text)?;
            if let Some(s) = shots {
                raw.run.shots = s;
            }
            if let Some(s) = seed {
                raw.run.master_seed = s;
            }
            if decoder.is_some() {
                raw.run.decoder = decoder;
            }
            let cfg = raw.resolve()?;
            if check {
                print!("{}", cfg.canonical_text());
                return Ok(ExitCode::SUCCESS);
            }
            let dir = memory::output_dir(&cfg, output_dir);
            let summary = memory::run(&cfg, &dir, threads)?;
            println!(
                "ler = {} [{}, {}]  shots = {}  gamma_total = {}  fallbacks = {}  ({:.2} s)",
                summary.ler,
                summary.ci95[0],
                summary.ci95[1],
                summary.shots,
                summary.gamma_total,
                summary.fallback_count,
                summary.wall_time
            );
            println!("wrote {}", dir.display());
        }
        Command::OracleCheck { draws, shots, seed } => {
            if shots == 0 {
                bail!("--shots must be >= 1");
            }
            let results = oracle::run_all(draws, shots, seed);
            for r in &results {
                println!("{r}");
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
