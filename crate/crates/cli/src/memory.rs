//! The `memory` subcommand: run a configured experiment and write its artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thermstab::decoder::{Decoder, DetectorModel};
use thermstab::experiment::{run_memory, write_events};

use crate::config::Resolved;

pub const EVENTS_FILE: &str = "events.txt";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const MODEL_FILE: &str = "detector_model.txt";

#[derive(Debug, Serialize)]
pub struct Summary {
    pub ler: f64,
    pub ci95: [f64; 2],
    pub std_error: f64,
    pub shots: u64,
    pub gamma_total: f64,
    pub fallback_count: u64,
    pub negative_shots: u64,
    pub noise_sites: usize,
    pub detectors: usize,
    pub wall_time: f64,
}

#[derive(Debug, Serialize)]
struct Artifact {
    file: &'static str,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    config_sha256: String,
    master_seed: u64,
    shots: u64,
    config: String,
    artifacts: Vec<Artifact>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Runs the experiment and writes every artifact into `dir`.
pub fn run(cfg: &Resolved, dir: &Path, threads: Option<usize>) -> Result<Summary> {
    let circuit = cfg.circuit()?;
    let model = DetectorModel::from_circuit(&circuit);
    let decoder = Decoder::from_model(&model, cfg.decoder, cfg.fallback)?;
    let start = Instant::now();
    let result = run_memory(&circuit, cfg.shots, cfg.master_seed, &decoder, threads)?;
    let wall_time = start.elapsed().as_secs_f64();

    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut events = Vec::new();
    write_events(&result.records, &mut events)?;
    let config_text = cfg.canonical_text();
    let model_text = model.to_text();
    write(dir, EVENTS_FILE, &events)?;
    write(dir, CONFIG_FILE, config_text.as_bytes())?;
    write(dir, MODEL_FILE, model_text.as_bytes())?;

    let s = &result.summary;
    let summary = Summary {
        ler: s.ler,
        ci95: [s.ler_ci95.0, s.ler_ci95.1],
        std_error: s.std_error,
        shots: s.shots,
        gamma_total: s.gamma_total,
        fallback_count: s.fallback_count,
        negative_shots: s.negative_shots,
        noise_sites: circuit.num_noise_sites(),
        detectors: circuit.detectors().len(),
        wall_time,
    };
    write(dir, SUMMARY_FILE, (serde_json::to_string_pretty(&summary)? + "\n").as_bytes())?;

    let manifest = Manifest {
        tool: "thermstab",
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: cfg.hash(),
        master_seed: cfg.master_seed,
        shots: cfg.shots,
        config: config_text.clone(),
        artifacts: vec![
            Artifact { file: EVENTS_FILE, sha256: sha256_hex(&events) },
            Artifact { file: CONFIG_FILE, sha256: sha256_hex(config_text.as_bytes()) },
            Artifact { file: MODEL_FILE, sha256: sha256_hex(model_text.as_bytes()) },
        ],
    };
    write(dir, MANIFEST_FILE, (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes())?;
    Ok(summary)
}

/// Output directory: the command-line override, else the config's, else `.`.
pub fn output_dir(cfg: &Resolved, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."))
}
