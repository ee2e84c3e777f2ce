//! Closed-form thermal relaxation channel parameters.
//!
//! A single-qubit thermal relaxation window of duration `tau` is the
//! composition of a (generalized) amplitude damping channel with a Pauli-Z
//! dephasing channel. This module exposes:
//!
//! - the relaxation and dephasing probabilities `(p_gamma, p_phi)`,
//! - the Pauli-twirled version of the channel,
//! - affine decompositions of the channel into the stabilizer branches
//!   `{I, Z, Reset|0>, Reset|1>}`, which may carry negative weight,
//! - a positive reset-based approximation, and
//! - negativity / sampling-overhead bookkeeping.
//!
//! All functions are pure and operate on small `Copy` value types.

use crate::error::{Error, Result};

/// Absolute tolerance on the affine normalization of a decomposition.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

const PLANCK: f64 = 6.626_070_15e-34;
const BOLTZMANN: f64 = 1.380_649e-23;

/// Physical noise parameters for one relaxation window.
///
/// `t1`, `t2` and `tau` share one (arbitrary) time unit. `p1` is the
/// equilibrium excited-state population; `p1 = 0` is a zero-temperature bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    t1: f64,
    t2: f64,
    tau: f64,
    p1: f64,
}

impl ThermalParams {
    pub fn new(t1: f64, t2: f64, tau: f64, p1: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(t1.is_finite() && t1 > 0.0) {
            return bad(format!("t1 must be finite and > 0, got {t1}"));
        }
        if !(t2.is_finite() && t2 > 0.0) {
            return bad(format!("t2 must be finite and > 0, got {t2}"));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return bad(format!("tau must be finite and >= 0, got {tau}"));
        }
        if t2 > 2.0 * t1 {
            return bad(format!(
                "t2 <= 2*t1 violated: t2 = {t2} exceeds 2*t1 = {}",
                2.0 * t1
            ));
        }
        if !(0.0..=0.5).contains(&p1) {
            return bad(format!("p1 must lie in [0, 0.5], got {p1}"));
        }
        Ok(Self { t1, t2, tau, p1 })
    }

    /// Zero-temperature shorthand.
    pub fn zero_temperature(t1: f64, t2: f64, tau: f64) -> Result<Self> {
        Self::new(t1, t2, tau, 0.0)
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// Same physics, different window length.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.t1, self.t2, tau, self.p1)
    }

    pub fn with_p1(&self, p1: f64) -> Result<Self> {
        Self::new(self.t1, self.t2, self.tau, p1)
    }

    /// Total population relaxation rate `1/T1`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.t1
    }

    /// Pure dephasing rate `1/T_phi = 1/T2 - 1/(2 T1)`. Zero at `T2 = 2 T1`.
    pub fn gamma_phi(&self) -> f64 {
        (1.0 / self.t2 - 0.5 / self.t1).max(0.0)
    }

    /// Pure dephasing time; infinite when there is no pure dephasing.
    pub fn t_phi(&self) -> f64 {
        let rate = self.gamma_phi();
        if rate == 0.0 {
            f64::INFINITY
        } else {
            1.0 / rate
        }
    }

    /// Downward (decay) rate in the master equation, `(1 - p1)/T1`.
    pub fn decay_rate(&self) -> f64 {
        (1.0 - self.p1) / self.t1
    }

    /// Upward (thermal excitation) rate, `p1/T1`.
    pub fn excitation_rate(&self) -> f64 {
        self.p1 / self.t1
    }
}

/// Qubit frequency (Hz) and bath temperature (K).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    qubit_frequency: f64,
    bath_temperature: f64,
}

impl BathSpec {
    pub fn new(qubit_frequency: f64, bath_temperature: f64) -> Result<Self> {
        if !(qubit_frequency.is_finite() && qubit_frequency > 0.0) {
            return Err(Error::InvalidBath(format!(
                "qubit frequency must be > 0 Hz, got {qubit_frequency}"
            )));
        }
        if !(bath_temperature > 0.0) {
            return Err(Error::InvalidBath(format!(
                "bath temperature must be > 0 K, got {bath_temperature}"
            )));
        }
        Ok(Self {
            qubit_frequency,
            bath_temperature,
        })
    }

    pub fn qubit_frequency(&self) -> f64 {
        self.qubit_frequency
    }

    pub fn bath_temperature(&self) -> f64 {
        self.bath_temperature
    }

    /// `hbar * omega / (k_B * T_b)` with `omega = 2 pi f`.
    pub fn energy_ratio(&self) -> f64 {
        PLANCK * self.qubit_frequency / (BOLTZMANN * self.bath_temperature)
    }

    /// Bose-Einstein occupation of the bath mode.
    pub fn mean_occupation(&self) -> f64 {
        1.0 / self.energy_ratio().exp_m1()
    }
}

/// Affine combination `q_I I + q_Z Z + q_R0 R|0> + q_R1 R|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDecomposition {
    pub q_identity: f64,
    pub q_pauli_z: f64,
    pub q_reset0: f64,
    pub q_reset1: f64,
}

impl ChannelDecomposition {
    pub const IDENTITY: Self = Self {
        q_identity: 1.0,
        q_pauli_z: 0.0,
        q_reset0: 0.0,
        q_reset1: 0.0,
    };

    /// Checked constructor: reset weights nonnegative and coefficients summing to one.
    pub fn new(q_identity: f64, q_pauli_z: f64, q_reset0: f64, q_reset1: f64) -> Result<Self> {
        let d = Self {
            q_identity,
            q_pauli_z,
            q_reset0,
            q_reset1,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.coefficients();
        if c.iter().any(|q| !q.is_finite()) {
            return Err(Error::InvalidParams("non-finite coefficient".into()));
        }
        if self.q_reset0 < 0.0 || self.q_reset1 < 0.0 || self.q_identity < 0.0 {
            return Err(Error::InvalidParams(format!(
                "identity and reset weights must be >= 0, got {self:?}"
            )));
        }
        let sum: f64 = c.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "coefficients sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    /// Coefficients in canonical branch order `(I, Z, R0, R1)`.
    pub fn coefficients(&self) -> [f64; 4] {
        [self.q_identity, self.q_pauli_z, self.q_reset0, self.q_reset1]
    }

    pub fn is_positive(&self) -> bool {
        self.coefficients().iter().all(|&q| q >= 0.0)
    }

    pub fn negativity(&self) -> f64 {
        negativity(self)
    }
}

/// Stochastic Pauli channel; the identity weight is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannelProbs {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliChannelProbs {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let p = Self { p_x, p_y, p_z };
        let ok = [p_x, p_y, p_z].iter().all(|v| (0.0..=1.0).contains(v))
            && p_x + p_y + p_z <= 1.0 + NORMALIZATION_TOLERANCE;
        if !ok {
            return Err(Error::InvalidParams(format!(
                "Pauli probabilities out of range: {p:?}"
            )));
        }
        Ok(p)
    }

    pub fn p_identity(&self) -> f64 {
        1.0 - self.p_x - self.p_y - self.p_z
    }
}

/// `(p_gamma, p_phi)` for the window described by `params`.
pub fn relaxation_probs(params: &ThermalParams) -> (f64, f64) {
    let p_gamma = -(-params.tau / params.t1).exp_m1();
    let p_phi = -0.5 * (-params.tau * params.gamma_phi()).exp_m1();
    (p_gamma, p_phi)
}

/// Pauli-twirled thermal relaxation channel.
///
/// The twirl only sees the unital part of the channel, so the same
/// probabilities hold at any bath temperature.
pub fn pta_channel(p_gamma: f64, p_phi: f64) -> PauliChannelProbs {
    let p_xy = p_gamma / 4.0;
    let p_z = 0.5 - p_gamma / 4.0 - (1.0 - 2.0 * p_phi) * (1.0 - p_gamma).sqrt() / 2.0;
    // p_z is a difference of O(1) terms; clamp the last-ulp negatives at p = 0.
    PauliChannelProbs {
        p_x: p_xy,
        p_y: p_xy,
        p_z: p_z.max(0.0),
    }
}

/// Exact Clifford+reset decomposition of the thermal relaxation channel.
pub fn qpd_thermal(params: &ThermalParams) -> ChannelDecomposition {
    let (p_gamma, _) = relaxation_probs(params);
    let decay_t1 = (-params.tau / params.t1).exp();
    let decay_t2 = (-params.tau / params.t2).exp();
    ChannelDecomposition {
        q_identity: (decay_t1 + decay_t2) / 2.0,
        q_pauli_z: (decay_t1 - decay_t2) / 2.0,
        q_reset0: (1.0 - params.p1) * p_gamma,
        q_reset1: params.p1 * p_gamma,
    }
}

/// Standalone amplitude-damping decomposition `q+ I + q- Z + p_gamma R|0>`.
pub fn qpd_amplitude_damping(p_gamma: f64) -> ChannelDecomposition {
    let keep = 1.0 - p_gamma;
    let root = keep.sqrt();
    ChannelDecomposition {
        q_identity: (keep + root) / 2.0,
        q_pauli_z: (keep - root) / 2.0,
        q_reset0: p_gamma,
        q_reset1: 0.0,
    }
}

/// Positive approximation: drop the Z branch and hand its weight to reset.
pub fn reset_approximation(params: &ThermalParams) -> ChannelDecomposition {
    let q_plus = qpd_thermal(params).q_identity;
    let rest = 1.0 - q_plus;
    ChannelDecomposition {
        q_identity: q_plus,
        q_pauli_z: 0.0,
        q_reset0: rest * (1.0 - params.p1),
        q_reset1: rest * params.p1,
    }
}

/// `Gamma = sum |q|`, evaluated as `1 + 2 sum_{q<0} |q|` so positive decompositions give exactly 1.
pub fn negativity(decomp: &ChannelDecomposition) -> f64 {
    let negative: f64 = decomp.coefficients().iter().filter(|q| **q < 0.0).map(|q| -q).sum();
    1.0 + 2.0 * negative
}

/// Total negativity of `n_c` channels and the matching estimator variance factor.
///
/// If `gammas` has a single entry it is treated as a uniform per-site
/// negativity repeated `n_c` times; otherwise `gammas.len()` must equal `n_c`.
pub fn total_overhead(gammas: &[f64], n_c: usize) -> Result<(f64, f64)> {
    if let Some(g) = gammas.iter().find(|g| !(**g >= 1.0 - NORMALIZATION_TOLERANCE)) {
        return Err(Error::InvalidParams(format!("negativity must be >= 1, got {g}")));
    }
    let gamma_total = match gammas.len() {
        1 => gammas[0].powi(n_c as i32),
        len if len == n_c => gammas.iter().product(),
        len => {
            return Err(Error::InvalidParams(format!(
                "{len} negativities supplied for {n_c} channels"
            )))
        }
    };
    Ok((gamma_total, gamma_total * gamma_total))
}

/// Equilibrium excited-state population `1 / (1 + exp(hbar omega / k_B T_b))`.
pub fn equilibrium_excitation(bath: &BathSpec) -> f64 {
    let x = bath.energy_ratio();
    if x > 700.0 {
        0.0
    } else {
        1.0 / (1.0 + x.exp())
    }
}
