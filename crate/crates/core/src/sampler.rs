//! Branch sampling for noise sites and sign-weighted estimation.
//!
//! A [`QuasiDistribution`] is a list of stabilizer branches with real
//! coefficients summing to one. Sampling draws branch `x` with probability
//! `|q(x)| / Γ` and reports `sgn q(x)`; estimators multiply by `Γ` and the
//! sign so the mean is unbiased for the affine combination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelDecomposition, PauliChannelProbs};
use crate::error::{Error, Result};
use crate::tableau::{ResetTarget, Tableau};

/// Stabilizer branch channels a noise site can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    I,
    Z,
    Reset0,
    Reset1,
    X,
    Y,
}

impl Branch {
    /// Canonical sampling order.
    pub const ALL: [Branch; 6] = [
        Branch::I,
        Branch::Z,
        Branch::Reset0,
        Branch::Reset1,
        Branch::X,
        Branch::Y,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Branch::I => "I",
            Branch::Z => "Z",
            Branch::Reset0 => "R0",
            Branch::Reset1 => "R1",
            Branch::X => "X",
            Branch::Y => "Y",
        }
    }
}

/// Affine combination of branches, ready to sample.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    coefficients: [f64; 6],
    cumulative: [f64; 6],
    gamma: f64,
}

impl QuasiDistribution {
    pub fn identity() -> Self {
        Self::from_coefficients([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    fn from_coefficients(coefficients: [f64; 6]) -> Self {
        let gamma: f64 = 1.0 + 2.0 * coefficients.iter().filter(|q| **q < 0.0).map(|q| -q).sum::<f64>();
        let total: f64 = coefficients.iter().map(|q| q.abs()).sum();
        let mut cumulative = [0.0; 6];
        let mut acc = 0.0;
        for (c, q) in cumulative.iter_mut().zip(&coefficients) {
            acc += q.abs() / total;
            *c = acc;
        }
        cumulative[5] = 1.0;
        Self {
            coefficients,
            cumulative,
            gamma,
        }
    }

    pub fn from_decomposition(d: &ChannelDecomposition) -> Self {
        Self::from_coefficients([d.q_identity, d.q_pauli_z, d.q_reset0, d.q_reset1, 0.0, 0.0])
    }

    pub fn from_pauli(p: &PauliChannelProbs) -> Self {
        Self::from_coefficients([p.p_identity(), p.p_z, 0.0, 0.0, p.p_x, p.p_y])
    }

    pub fn coefficient(&self, b: Branch) -> f64 {
        self.coefficients[b as usize]
    }

    /// Nonzero `(branch, coefficient)` pairs in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (Branch, f64)> + '_ {
        Branch::ALL
            .into_iter()
            .map(|b| (b, self.coefficient(b)))
            .filter(|(_, q)| *q != 0.0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_positive(&self) -> bool {
        self.coefficients.iter().all(|q| *q >= 0.0)
    }

    pub fn is_identity(&self) -> bool {
        self.coefficients[0] == 1.0 && self.coefficients[1..].iter().all(|q| *q == 0.0)
    }

    /// One uniform draw against the cumulative `|q|/Γ`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Branch, f64) {
        let u: f64 = rng.random();
        let i = self
            .cumulative
            .iter()
            .position(|c| u < *c)
            .unwrap_or(5);
        let i = (i..6).find(|&j| self.coefficients[j] != 0.0).unwrap_or(i);
        let sign = if self.coefficients[i] < 0.0 { -1.0 } else { 1.0 };
        (Branch::ALL[i], sign)
    }
}

/// Noise site in a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSite {
    pub qubit: usize,
    pub site_id: usize,
    pub channel: QuasiDistribution,
}

pub fn sample_branch<R: Rng + ?Sized>(d: &ChannelDecomposition, rng: &mut R) -> (Branch, f64) {
    QuasiDistribution::from_decomposition(d).sample(rng)
}

pub fn apply_branch<R: Rng + ?Sized>(t: &mut Tableau, qubit: usize, branch: Branch, rng: &mut R) {
    match branch {
        Branch::I => {}
        Branch::Z => t.z(qubit),
        Branch::X => t.x(qubit),
        Branch::Y => t.y(qubit),
        Branch::Reset0 => t.reset(qubit, ResetTarget::Zero, rng),
        Branch::Reset1 => t.reset(qubit, ResetTarget::One, rng),
    }
}

/// Sign and overhead of one sampled shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotWeight {
    pub sign: f64,
    pub gamma_product: f64,
}

impl ShotWeight {
    pub const UNIT: Self = Self {
        sign: 1.0,
        gamma_product: 1.0,
    };

    pub fn is_negative(&self) -> bool {
        self.sign < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Mergeable running sums of signed values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    pub sum: f64,
    pub sum_sq: f64,
    pub count: u64,
}

impl Accumulator {
    pub fn push(&mut self, signed_value: f64) {
        self.sum += signed_value;
        self.sum_sq += signed_value * signed_value;
        self.count += 1;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.count += other.count;
        self
    }

    /// `Γ·mean` and `Γ·s/√N` with the `n-1` sample deviation.
    pub fn finish(&self, gamma: f64) -> Result<Estimate> {
        if self.count == 0 {
            return Err(Error::EmptyEstimate);
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = if self.count > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(Estimate {
            estimate: gamma * mean,
            std_error: gamma * (var / n).sqrt(),
        })
    }
}

pub fn weighted_estimate(records: &[(f64, ShotWeight)]) -> Result<Estimate> {
    let Some((_, first)) = records.first() else {
        return Err(Error::EmptyEstimate);
    };
    let gamma = first.gamma_product;
    let mut acc = Accumulator::default();
    for (v, w) in records {
        if (w.gamma_product - gamma).abs() > 1e-12 * gamma {
            return Err(Error::MixedGamma(gamma, w.gamma_product));
        }
        acc.push(w.sign * v);
    }
    acc.finish(gamma)
}

/// Independent stream per shot; reproducible regardless of thread assignment.
pub fn shot_rng(master_seed: u64, shot_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(shot_index);
    rng
}
