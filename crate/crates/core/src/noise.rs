//! Attaching thermal-relaxation noise sites to measurement windows.

use std::fmt;
use std::str::FromStr;

use crate::channel::{pta_channel, qpd_thermal, relaxation_probs, reset_approximation, ThermalParams};
use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::sampler::{NoiseSite, QuasiDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelModel {
    ExactQpd,
    Pta,
    ResetApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoisePolicy {
    BeforeMeasure,
    AroundMeasureReset,
}

macro_rules! named_enum {
    ($ty:ty, $what:literal, $($variant:path => $name:literal),+) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($variant => $name),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    _ => Err(Error::UnknownOption(format!(
                        concat!("unknown ", $what, " '{}', expected one of: {}"),
                        s,
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }
    };
}

named_enum!(ChannelModel, "channel model",
    ChannelModel::ExactQpd => "exact_qpd",
    ChannelModel::Pta => "pta",
    ChannelModel::ResetApprox => "reset_approx");

named_enum!(NoisePolicy, "noise policy",
    NoisePolicy::BeforeMeasure => "before_measure",
    NoisePolicy::AroundMeasureReset => "around_measure_reset");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseOptions {
    pub model: ChannelModel,
    pub policy: NoisePolicy,
    /// Whether the last measurement layer (the data readout) gets sites.
    pub final_layer_noise: bool,
}

impl NoiseOptions {
    pub fn new(model: ChannelModel, policy: NoisePolicy) -> Self {
        Self {
            model,
            policy,
            final_layer_noise: true,
        }
    }
}

/// Per-site distribution for a model.
pub fn site_channel(params: &ThermalParams, model: ChannelModel) -> QuasiDistribution {
    match model {
        ChannelModel::ExactQpd => QuasiDistribution::from_decomposition(&qpd_thermal(params)),
        ChannelModel::ResetApprox => QuasiDistribution::from_decomposition(&reset_approximation(params)),
        ChannelModel::Pta => {
            let (pg, pp) = relaxation_probs(params);
            QuasiDistribution::from_pauli(&pta_channel(pg, pp))
        }
    }
}

/// `[start, end)` ranges of maximal measure/reset runs containing a measurement.
pub fn measurement_layers(c: &Circuit) -> Vec<(usize, usize)> {
    let ins = c.instructions();
    let mut layers = Vec::new();
    let mut i = 0;
    while i < ins.len() {
        if !ins[i].is_measure_or_reset() {
            i += 1;
            continue;
        }
        let start = i;
        while i < ins.len() && ins[i].is_measure_or_reset() {
            i += 1;
        }
        if ins[start..i].iter().any(|x| matches!(x, Instruction::Measure { .. })) {
            layers.push((start, i));
        }
    }
    layers
}

pub fn instrument_noise(
    c: &Circuit,
    params: &ThermalParams,
    model: ChannelModel,
    policy: NoisePolicy,
) -> Result<Circuit> {
    instrument_noise_with(c, params, &NoiseOptions::new(model, policy))
}

pub fn instrument_noise_with(c: &Circuit, params: &ThermalParams, opts: &NoiseOptions) -> Result<Circuit> {
    let layers = measurement_layers(c);
    if layers.is_empty() {
        return Err(Error::InvalidCircuit("circuit has no measurement layers".into()));
    }
    let channel = site_channel(params, opts.model);
    let sites = |out: &mut Vec<Instruction>| {
        for q in 0..c.num_qubits() {
            out.push(Instruction::Noise(NoiseSite {
                qubit: q,
                site_id: 0,
                channel: channel.clone(),
            }));
        }
    };
    let ins = c.instructions();
    let mut out = Vec::with_capacity(ins.len() + 2 * layers.len() * c.num_qubits());
    let mut cursor = 0;
    for (k, &(start, end)) in layers.iter().enumerate() {
        out.extend_from_slice(&ins[cursor..start]);
        let noisy = opts.final_layer_noise || k + 1 < layers.len();
        if noisy {
            sites(&mut out);
        }
        out.extend_from_slice(&ins[start..end]);
        let has_reset = ins[start..end].iter().any(|x| matches!(x, Instruction::Reset { .. }));
        if noisy && opts.policy == NoisePolicy::AroundMeasureReset && has_reset {
            sites(&mut out);
        }
        cursor = end;
    }
    out.extend_from_slice(&ins[cursor..]);
    let noisy = c.with_instructions(out);
    noisy.validate()?;
    Ok(noisy)
}
