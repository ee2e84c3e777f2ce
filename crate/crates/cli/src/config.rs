//! Memory-experiment configuration files.
//!
//! ```toml
//! [code]
//! kind = "surface"      # or "bb"
//! distance = 3
//! state = "zero"        # zero | one | plus
//! rounds = 3
//!
//! [noise]               # omit for a noiseless run
//! t1 = 1.0
//! t2 = 1.0
//! tau = 0.01
//! model = "exact_qpd"
//!
//! [run]
//! shots = 100000
//! master_seed = 1
//! decoder = "lookup"
//! output_dir = "out"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thermstab::channel::ThermalParams;
use thermstab::circuit::Circuit;
use thermstab::codes::{build_code_memory, BbSpec, CodeSpec, InitialState, SurfaceSpec};
use thermstab::decoder::{DecoderKind, Fallback, DICTIONARY_DETECTOR_LIMIT};
use thermstab::noise::{instrument_noise_with, ChannelModel, NoiseOptions, NoisePolicy};

use crate::presets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_a: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_b: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_layer_noise: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub shots: u64,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub code: CodeSpec,
    pub rounds: usize,
    pub noise: Option<(ThermalParams, NoiseOptions)>,
    pub shots: u64,
    pub master_seed: u64,
    pub decoder: DecoderKind,
    pub fallback: Fallback,
    pub output_dir: Option<PathBuf>,
}

/// Every validation failure found in a config, one message each.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl std::fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "invalid configuration ({} problem(s)):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    toml::from_str(text).map_err(|e| ConfigErrors(vec![e.message().to_string()]))
}

pub fn to_text(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}

fn state_from(name: &str) -> Option<InitialState> {
    match name {
        "zero" => Some(InitialState::Zero),
        "one" => Some(InitialState::One),
        "plus" => Some(InitialState::Plus),
        _ => None,
    }
}

fn state_name(s: InitialState) -> &'static str {
    match s {
        InitialState::Zero => "zero",
        InitialState::One => "one",
        InitialState::Plus => "plus",
    }
}

fn fallback_name(f: Fallback) -> &'static str {
    match f {
        Fallback::Greedy => "greedy",
        Fallback::Zero => "zero",
    }
}

fn resolve_code(c: &CodeSection, errs: &mut Vec<String>) -> Option<(CodeSpec, usize)> {
    let state = match c.state.as_deref() {
        None => Some(InitialState::Zero),
        Some(s) => state_from(s).or_else(|| {
            errs.push(format!("code.state: unknown state '{s}', expected one of: zero, one, plus"));
            None
        }),
    };
    if c.rounds == Some(0) {
        errs.push("code.rounds must be >= 1".into());
    }
    let spec = match c.kind.as_str() {
        "surface" => {
            for (key, set) in [
                ("preset", c.preset.is_some()),
                ("l", c.l.is_some()),
                ("m", c.m.is_some()),
                ("poly_a", c.poly_a.is_some()),
                ("poly_b", c.poly_b.is_some()),
            ] {
                if set {
                    errs.push(format!("code.{key} is only valid for kind = \"bb\""));
                }
            }
            let distance = match c.distance {
                None => {
                    errs.push("code.distance is required for kind = \"surface\"".into());
                    None
                }
                Some(d) if d < 3 || d % 2 == 0 => {
                    errs.push(format!("code.distance must be odd and >= 3, got {d}"));
                    None
                }
                Some(d) => Some(d),
            };
            Some(CodeSpec::Surface(SurfaceSpec::new(distance?, state?)))
        }
        "bb" => {
            if c.distance.is_some() {
                errs.push("code.distance is only valid for kind = \"surface\"".into());
            }
            if state.is_some_and(|s| s != InitialState::Zero) {
                errs.push("code.state: bb memories support only \"zero\"".into());
            }
            let explicit = [c.l.is_some(), c.m.is_some(), c.poly_a.is_some(), c.poly_b.is_some()];
            let spec = match (&c.preset, explicit) {
                (Some(p), [false, false, false, false]) if p == "18_4_4" => Some(BbSpec::preset_18_4_4()),
                (Some(p), [false, false, false, false]) => {
                    errs.push(format!("code.preset: unknown bb preset '{p}', expected: 18_4_4"));
                    None
                }
                (Some(_), _) => {
                    errs.push("code.preset cannot be combined with l, m, poly_a or poly_b".into());
                    None
                }
                (None, [true, true, true, true]) => {
                    let poly = |p: &Vec<[usize; 2]>| p.iter().map(|t| (t[0], t[1])).collect();
                    Some(BbSpec {
                        l: c.l?,
                        m: c.m?,
                        poly_a: poly(c.poly_a.as_ref()?),
                        poly_b: poly(c.poly_b.as_ref()?),
                    })
                }
                (None, _) => {
                    errs.push("code: kind = \"bb\" needs either preset or all of l, m, poly_a, poly_b".into());
                    None
                }
            };
            let spec = spec?;
            if let Err(e) = spec.check_matrices() {
                errs.push(format!("code: {e}"));
                return None;
            }
            Some(CodeSpec::Bb(spec))
        }
        other => {
            errs.push(format!("code.kind: unknown code '{other}', expected one of: surface, bb"));
            None
        }
    }?;
    let rounds = match (&spec, c.rounds) {
        (_, Some(0)) => return None,
        (_, Some(r)) => r,
        (CodeSpec::Surface(s), None) => s.distance,
        (CodeSpec::Bb(_), None) => 1,
    };
    Some((spec, rounds))
}

fn resolve_noise(n: &NoiseSection, errs: &mut Vec<String>) -> Option<(ThermalParams, NoiseOptions)> {
    let before = errs.len();
    let preset = match n.preset.as_deref().map(presets::lookup) {
        Some(Err(e)) => {
            errs.push(format!("noise.preset: {e}"));
            None
        }
        Some(Ok(p)) => Some(p),
        None => None,
    };
    let t1 = n.t1.or(preset.map(|p| p.t1));
    let t2 = n.t2.or(preset.map(|p| p.t2));
    if t1.is_none() && n.preset.is_none() {
        errs.push("noise.t1 is required unless noise.preset is set".into());
    }
    if t2.is_none() && n.preset.is_none() {
        errs.push("noise.t2 is required unless noise.preset is set".into());
    }
    let model = match n.model.as_deref().map(str::parse::<ChannelModel>) {
        None => Some(ChannelModel::ExactQpd),
        Some(Ok(m)) => Some(m),
        Some(Err(e)) => {
            errs.push(format!("noise.model: {e}"));
            None
        }
    };
    let policy = match n.policy.as_deref().map(str::parse::<NoisePolicy>) {
        None => Some(NoisePolicy::BeforeMeasure),
        Some(Ok(p)) => Some(p),
        Some(Err(e)) => {
            errs.push(format!("noise.policy: {e}"));
            None
        }
    };
    let (t1, t2) = (t1?, t2?);
    let tau = n.tau.unwrap_or(t1 / 100.0);
    let params = match ThermalParams::new(t1, t2, tau, n.p1.unwrap_or(0.0)) {
        Ok(p) => Some(p),
        Err(e) => {
            errs.push(format!("noise: {e}"));
            None
        }
    };
    if errs.len() > before {
        return None;
    }
    let mut opts = NoiseOptions::new(model?, policy?);
    opts.final_layer_noise = n.final_layer_noise.unwrap_or(true);
    Some((params?, opts))
}

impl ExperimentConfig {
    /// Validates every field, reporting all problems at once.
    pub fn resolve(&self) -> Result<Resolved, ConfigErrors> {
        let mut errs = Vec::new();
        let code = resolve_code(&self.code, &mut errs);
        let noise = self.noise.as_ref().map(|n| resolve_noise(n, &mut errs));
        if self.run.shots == 0 {
            errs.push("run.shots must be >= 1".into());
        }
        let decoder = match self.run.decoder.as_deref().map(str::parse::<DecoderKind>) {
            None => Some(DecoderKind::Lookup),
            Some(Ok(d)) => Some(d),
            Some(Err(e)) => {
                errs.push(format!("run.decoder: {e}"));
                None
            }
        };
        let fallback = match self.run.fallback.as_deref() {
            None => None,
            Some("greedy") => Some(Fallback::Greedy),
            Some("zero") => Some(Fallback::Zero),
            Some(f) => {
                errs.push(format!("run.fallback: unknown fallback '{f}', expected one of: greedy, zero"));
                None
            }
        };
        if let (Some((spec, rounds)), Some(DecoderKind::Lookup)) = (&code, decoder) {
            if let Ok(c) = build_code_memory(spec, *rounds) {
                let n = c.detectors().len();
                if n > DICTIONARY_DETECTOR_LIMIT {
                    errs.push(format!(
                        "run.decoder: lookup supports at most {DICTIONARY_DETECTOR_LIMIT} detectors, this memory has {n}; \
                         use fewer rounds or decoder = \"greedy\" / \"none\""
                    ));
                }
            }
        }
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        let (code, rounds) = code.expect("no errors");
        let fallback = fallback.unwrap_or(match code {
            CodeSpec::Surface(_) => Fallback::Greedy,
            CodeSpec::Bb(_) => Fallback::Zero,
        });
        Ok(Resolved {
            code,
            rounds,
            noise: noise.map(|n| n.expect("no errors")),
            shots: self.run.shots,
            master_seed: self.run.master_seed,
            decoder: decoder.expect("no errors"),
            fallback,
            output_dir: self.run.output_dir.as_ref().map(PathBuf::from),
        })
    }
}

impl Resolved {
    /// Fully explicit form of this config; the output directory is left out
    /// because no artifact depends on it.
    pub fn canonical(&self) -> ExperimentConfig {
        let code = match &self.code {
            CodeSpec::Surface(s) => CodeSection {
                kind: "surface".into(),
                rounds: Some(self.rounds),
                distance: Some(s.distance),
                state: Some(state_name(s.initial_state).into()),
                ..Default::default()
            },
            CodeSpec::Bb(b) => {
                let poly = |p: &[(usize, usize)]| Some(p.iter().map(|&(i, j)| [i, j]).collect());
                CodeSection {
                    kind: "bb".into(),
                    rounds: Some(self.rounds),
                    state: Some("zero".into()),
                    l: Some(b.l),
                    m: Some(b.m),
                    poly_a: poly(&b.poly_a),
                    poly_b: poly(&b.poly_b),
                    ..Default::default()
                }
            }
        };
        let noise = self.noise.map(|(p, o)| NoiseSection {
            preset: None,
            t1: Some(p.t1()),
            t2: Some(p.t2()),
            tau: Some(p.tau()),
            p1: Some(p.p1()),
            model: Some(o.model.as_str().into()),
            policy: Some(o.policy.as_str().into()),
            final_layer_noise: Some(o.final_layer_noise),
        });
        ExperimentConfig {
            code,
            noise,
            run: RunSection {
                shots: self.shots,
                master_seed: self.master_seed,
                decoder: Some(self.decoder.as_str().into()),
                fallback: Some(fallback_name(self.fallback).into()),
                output_dir: None,
            },
        }
    }

    pub fn canonical_text(&self) -> String {
        to_text(&self.canonical())
    }

    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical_text().as_bytes()))
    }

    /// The memory circuit with noise sites attached.
    pub fn circuit(&self) -> thermstab::Result<Circuit> {
        let c = build_code_memory(&self.code, self.rounds)?;
        match &self.noise {
            Some((params, opts)) => instrument_noise_with(&c, params, opts),
            None => Ok(c),
        }
    }
}
