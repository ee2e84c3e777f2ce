//! Memory and population experiments over many shots.
//!
//! Shot `i` always draws from `shot_rng(master_seed, i)`, so results do not
//! depend on how shots are spread over threads.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::channel::ThermalParams;
use crate::circuit::Circuit;
use crate::codes::{build_population_circuit, surface_layout, InitialState};
use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::noise::{instrument_noise_with, NoiseOptions};
use crate::sampler::{shot_rng, Accumulator, Estimate, ShotWeight};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "THERMSTAB_THREADS";

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub detection_events: Vec<bool>,
    pub logical_flips: Vec<bool>,
    pub weight: ShotWeight,
}

impl ShotRecord {
    /// `<detectors> <observables> <sign>`, bits as `0`/`1`.
    pub fn to_line(&self) -> String {
        let b = |v: &[bool]| v.iter().map(|x| if *x { '1' } else { '0' }).collect::<String>();
        let sign = if self.weight.is_negative() { '-' } else { '+' };
        format!("{} {} {sign}", b(&self.detection_events), b(&self.logical_flips))
    }
}

pub fn write_events<W: Write>(records: &[ShotRecord], mut out: W) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemorySummary {
    pub shots: u64,
    pub ler: f64,
    pub std_error: f64,
    pub ler_ci95: (f64, f64),
    pub gamma_total: f64,
    pub fallback_count: u64,
    pub negative_shots: u64,
}

impl MemorySummary {
    pub fn overlaps(&self, other: &Self) -> bool {
        self.ler_ci95.0 <= other.ler_ci95.1 && other.ler_ci95.0 <= self.ler_ci95.1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryRun {
    pub records: Vec<ShotRecord>,
    pub summary: MemorySummary,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: f64, n: f64) -> (f64, f64) {
    let p = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn interval(est: &Estimate, acc: &Accumulator, gamma: f64, all_positive: bool) -> (f64, f64) {
    if all_positive && gamma == 1.0 {
        wilson_interval(acc.sum, acc.count as f64)
    } else {
        (est.estimate - Z95 * est.std_error, est.estimate + Z95 * est.std_error)
    }
}

pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads.or_else(threads_from_env) {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidCircuit(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

struct ShotResult {
    record: ShotRecord,
    failed: bool,
    fallback: bool,
}

fn run_shot(c: &Circuit, decoder: &Decoder, seed: u64, i: u64) -> ShotResult {
    let mut rng = shot_rng(seed, i);
    let out = c.simulate(&mut rng);
    let events = c.detection_events(&out.measurements);
    let flips = c.observable_flips(&out.measurements);
    let decoded = decoder.decode(&events);
    ShotResult {
        failed: decoded.flips != flips,
        fallback: decoded.fallback,
        record: ShotRecord {
            detection_events: events,
            logical_flips: flips,
            weight: c.shot_weight(out.sign),
        },
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    acc: Accumulator,
    fallback: u64,
    negative: u64,
}

impl Tally {
    fn add(mut self, r: &ShotResult) -> Self {
        self.acc.push(r.record.weight.sign * f64::from(u8::from(r.failed)));
        self.fallback += u64::from(r.fallback);
        self.negative += u64::from(r.record.weight.is_negative());
        self
    }

    fn merge(self, o: Self) -> Self {
        Self {
            acc: self.acc.merge(o.acc),
            fallback: self.fallback + o.fallback,
            negative: self.negative + o.negative,
        }
    }

    fn summary(&self, gamma: f64) -> Result<MemorySummary> {
        let est = self.acc.finish(gamma)?;
        Ok(MemorySummary {
            shots: self.acc.count,
            ler: est.estimate,
            std_error: est.std_error,
            ler_ci95: interval(&est, &self.acc, gamma, self.negative == 0),
            gamma_total: gamma,
            fallback_count: self.fallback,
            negative_shots: self.negative,
        })
    }
}

/// Runs `shots` shots, keeping every record in shot order.
pub fn run_memory(
    c: &Circuit,
    shots: u64,
    master_seed: u64,
    decoder: &Decoder,
    threads: Option<usize>,
) -> Result<MemoryRun> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let results: Vec<ShotResult> = with_pool(threads, || {
        (0..shots)
            .into_par_iter()
            .map(|i| run_shot(c, decoder, master_seed, i))
            .collect()
    })?;
    let tally = results.iter().fold(Tally::default(), Tally::add);
    Ok(MemoryRun {
        summary: tally.summary(c.gamma_total())?,
        records: results.into_iter().map(|r| r.record).collect(),
    })
}

/// Same statistics as [`run_memory`] without storing records.
pub fn run_memory_summary(
    c: &Circuit,
    shots: u64,
    master_seed: u64,
    decoder: &Decoder,
    threads: Option<usize>,
) -> Result<MemorySummary> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let tally = with_pool(threads, || {
        (0..shots)
            .into_par_iter()
            .fold(Tally::default, |t, i| t.add(&run_shot(c, decoder, master_seed, i)))
            .reduce(Tally::default, Tally::merge)
    })?;
    tally.summary(c.gamma_total())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Population {
    pub fraction: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

/// Mean fraction of `1` outcomes when every qubit of a prepared surface-code
/// patch is read out in Z after one unmeasured syndrome round.
pub fn excited_population(
    state: InitialState,
    distance: usize,
    params: &ThermalParams,
    noise: &NoiseOptions,
    shots: u64,
    master_seed: u64,
    threads: Option<usize>,
) -> Result<Population> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let layout = surface_layout(distance)?;
    let c = instrument_noise_with(&build_population_circuit(&layout, state)?, params, noise)?;
    let n = c.num_qubits() as f64;
    let acc = with_pool(threads, || {
        (0..shots)
            .into_par_iter()
            .fold(Accumulator::default, |mut acc, i| {
                let out = c.simulate(&mut shot_rng(master_seed, i));
                let ones = out.measurements.iter().filter(|b| **b).count() as f64;
                acc.push(out.sign * ones / n);
                acc
            })
            .reduce(Accumulator::default, Accumulator::merge)
    })?;
    let est = acc.finish(c.gamma_total())?;
    Ok(Population {
        fraction: est.estimate,
        std_error: est.std_error,
        ci95: (est.estimate - Z95 * est.std_error, est.estimate + Z95 * est.std_error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_bb_memory, build_surface_memory, BbSpec, SurfaceSpec};
    use crate::decoder::{DecoderKind, Fallback};
    use crate::noise::{instrument_noise, ChannelModel, NoisePolicy};

    fn d3_noisy(tau: f64, model: ChannelModel) -> Circuit {
        let c = build_surface_memory(&SurfaceSpec::new(3, InitialState::Zero), 3).unwrap();
        let p = ThermalParams::zero_temperature(1.0, 1.0, tau).unwrap();
        instrument_noise(&c, &p, model, NoisePolicy::BeforeMeasure).unwrap()
    }

    #[test]
    fn noiseless_memories_are_silent() {
        let mut circuits = Vec::new();
        for d in [3, 5] {
            for s in [InitialState::Zero, InitialState::One, InitialState::Plus] {
                circuits.push(build_surface_memory(&SurfaceSpec::new(d, s), d).unwrap());
            }
        }
        circuits.push(build_bb_memory(&BbSpec::preset_18_4_4(), 3).unwrap());
        for c in circuits {
            let dec = Decoder::new(&c, DecoderKind::None, Fallback::Zero).unwrap();
            let run = run_memory(&c, 1000, 17, &dec, None).unwrap();
            assert_eq!(run.summary.ler, 0.0);
            assert!(run
                .records
                .iter()
                .all(|r| r.detection_events.iter().chain(&r.logical_flips).all(|b| !b)));
        }
    }

    #[test]
    fn injected_bulk_x_fires_two_z_detectors() {
        let spec = SurfaceSpec::new(3, InitialState::Zero);
        let c = build_surface_memory(&spec, 3).unwrap();
        let tick = c
            .instructions()
            .iter()
            .position(|i| matches!(i, crate::circuit::Instruction::Tick))
            .unwrap();
        let mut ins = c.instructions().to_vec();
        // data qubit (1, 1), the centre
        ins.insert(
            tick + 1,
            crate::circuit::Instruction::Gate {
                gate: crate::tableau::Gate::X,
                qubits: [4, 4],
            },
        );
        let injected = c.with_instructions(ins);
        let layout = surface_layout(3).unwrap();
        let out = injected.simulate(&mut shot_rng(1, 0));
        let events = injected.detection_events(&out.measurements);
        let fired: Vec<usize> = (0..events.len()).filter(|i| events[*i]).collect();
        // round 1 has 4 Z detectors; round 2 lists X checks (4) then Z checks (4)
        let z_with_4: Vec<usize> = (0..4).filter(|j| layout.z_checks[*j].contains(&4)).collect();
        assert_eq!(z_with_4.len(), 2);
        let want: Vec<usize> = z_with_4.iter().map(|j| 4 + 4 + j).collect();
        assert_eq!(fired, want);
    }

    #[test]
    fn thread_count_does_not_change_records() {
        let c = d3_noisy(0.05, ChannelModel::ExactQpd);
        let dec = Decoder::new(&c, DecoderKind::Lookup, Fallback::Greedy).unwrap();
        let a = run_memory(&c, 2000, 5, &dec, Some(1)).unwrap();
        let b = run_memory(&c, 2000, 5, &dec, Some(4)).unwrap();
        assert_eq!(a, b);
        let s = run_memory_summary(&c, 2000, 5, &dec, Some(3)).unwrap();
        assert_eq!(s.ler, a.summary.ler);
    }

    #[test]
    fn shots_must_be_positive() {
        let c = d3_noisy(0.01, ChannelModel::Pta);
        let dec = Decoder::new(&c, DecoderKind::None, Fallback::Zero).unwrap();
        assert_eq!(run_memory(&c, 0, 0, &dec, None).unwrap_err(), Error::NoShots);
    }

    #[test]
    fn event_line_format() {
        let r = ShotRecord {
            detection_events: vec![true, false, true],
            logical_flips: vec![false],
            weight: ShotWeight {
                sign: -1.0,
                gamma_product: 2.0,
            },
        };
        assert_eq!(r.to_line(), "101 0 -");
        let mut buf = Vec::new();
        write_events(&[r], &mut buf).unwrap();
        assert_eq!(buf, b"101 0 -\n");
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0.0, 100.0);
        assert!(lo < 1e-15);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50.0, 100.0);
        assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn population_relaxes_to_ground() {
        let p = ThermalParams::zero_temperature(1.0, 1.0, 50.0).unwrap();
        let opts = NoiseOptions::new(ChannelModel::ExactQpd, NoisePolicy::BeforeMeasure);
        let pop = excited_population(InitialState::One, 3, &p, &opts, 200, 1, None).unwrap();
        assert!(pop.fraction < 1e-12);
    }
}
