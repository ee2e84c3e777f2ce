//! Exact one- and two-qubit density-matrix engine.
//!
//! This is the ground truth everything else is checked against: Kraus
//! evolution of the thermal relaxation channel, fixed-step RK4 integration
//! of the single-qubit master equation, trace distance, state and channel
//! fidelity, Pauli transfer matrices and Pauli twirling.
//!
//! Channels always act on the first tensor factor. A 4x4 operator is read as
//! `A (x) B` with the channel applied to `A`, which is what the
//! maximally-entangled (Choi) constructions need.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::channel::{
    pta_channel, qpd_thermal, relaxation_probs, reset_approximation, ChannelDecomposition,
    PauliChannelProbs, ThermalParams,
};
use crate::error::{Error, Result};

pub type Operator = DMatrix<Complex64>;

/// Default RK4 step count for master-equation integration.
pub const DEFAULT_RK4_STEPS: usize = 10_000;
/// Eigenvalue floor accepted as positive semidefinite.
pub const PSD_TOLERANCE: f64 = 1e-10;
const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;
const RK4_TRACE_DRIFT: f64 = 1e-8;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Single-qubit Pauli matrix, `index` in `0..4` for `I, X, Y, Z`.
pub fn pauli(index: usize) -> Operator {
    let (z, o, i) = (c(0.0), c(1.0), Complex64::new(0.0, 1.0));
    let data = match index {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, i, -i, z],
        3 => [o, z, z, -o],
        _ => panic!("Pauli index {index} out of range"),
    };
    // column-major
    DMatrix::from_column_slice(2, 2, &data)
}

fn identity(dim: usize) -> Operator {
    DMatrix::identity(dim, dim)
}

fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kronecker(b)
}

/// Lift a single-qubit operator onto the first factor of a `dim`-dimensional space.
fn lift(op: &Operator, dim: usize) -> Operator {
    if dim == 2 {
        op.clone()
    } else {
        kron(op, &identity(dim / 2))
    }
}

/// Partial trace over the first qubit of a 4x4 operator.
fn trace_out_first(m: &Operator) -> Operator {
    let mut out = Operator::zeros(2, 2);
    for a in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[(j, k)] += m[(2 * a + j, 2 * a + k)];
            }
        }
    }
    out
}

/// Hermitian eigen-decomposition returning `(eigenvalues, eigenvectors)`.
fn hermitian_eigen(m: &Operator) -> (Vec<f64>, Operator) {
    let sym = (m + m.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigenvalues below this fraction of the largest are treated as exact zeros.
const RANK_CUTOFF: f64 = 1e-13;

fn clamp_spectrum(vals: &[f64]) -> Vec<f64> {
    let top = vals.iter().copied().fold(0.0, f64::max);
    vals.iter()
        .map(|&v| if v <= RANK_CUTOFF * top { 0.0 } else { v })
        .collect()
}

fn psd_sqrt(m: &Operator) -> Operator {
    let (vals, vecs) = hermitian_eigen(m);
    let vals = clamp_spectrum(&vals);
    let root = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| c(v.sqrt())),
    ));
    &vecs * root * vecs.adjoint()
}

/// Density operator on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Operator,
}

impl DensityMatrix {
    /// Validated constructor.
    pub fn new(m: Operator) -> Result<Self> {
        let rho = Self::from_operator(m)?;
        rho.validate()?;
        Ok(rho)
    }

    fn from_operator(m: Operator) -> Result<Self> {
        let (r, cols) = m.shape();
        if r != cols || !(r == 2 || r == 4) {
            return Err(Error::NonPhysical(format!(
                "density matrix must be 2x2 or 4x4, got {r}x{cols}"
            )));
        }
        Ok(Self { m })
    }

    /// Projector onto a normalized pure state.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let v = nalgebra::DVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|a| a / norm.sqrt()),
        );
        Self::new(&v * v.adjoint())
    }

    pub fn ground() -> Self {
        Self::pure(&[c(1.0), c(0.0)]).unwrap()
    }

    pub fn excited() -> Self {
        Self::pure(&[c(0.0), c(1.0)]).unwrap()
    }

    /// Single-qubit state with the given Bloch vector (`|r| <= 1`).
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = (pauli(0) + pauli(1) * c(x) + pauli(2) * c(y) + pauli(3) * c(z)) * c(0.5);
        Self::new(m)
    }

    /// `cos(theta/2)|0> + sin(theta/2)|1>`.
    pub fn meridian(theta: f64) -> Self {
        Self::pure(&[c((theta / 2.0).cos()), c((theta / 2.0).sin())]).unwrap()
    }

    /// Normalized projector onto `|00> + |11>`.
    pub fn max_entangled() -> Self {
        Self::pure(&[c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &Operator {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).0
    }

    /// Hermitian, unit trace, and PSD within the module tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = (&self.m - self.m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::NonPhysical(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr - c(1.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::NonPhysical(format!("trace {tr} != 1")));
        }
        if let Some(low) = self.eigenvalues().into_iter().find(|&l| l < -PSD_TOLERANCE) {
            return Err(Error::NonPhysical(format!("negative eigenvalue {low:e}")));
        }
        Ok(())
    }

    /// Expectation of a single-qubit Pauli on the first qubit.
    pub fn pauli_expectation(&self, index: usize) -> f64 {
        (lift(&pauli(index), self.dim()) * &self.m).trace().re
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Any single-qubit linear map, applied to the first tensor factor.
pub trait QubitChannel {
    /// Linear action on an arbitrary 2x2 or 4x4 operator.
    fn apply_operator(&self, op: &Operator) -> Operator;

    fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            m: self.apply_operator(&rho.m),
        }
    }
}

/// CPTP map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Operator>,
}

impl KrausChannel {
    pub fn new(operators: Vec<Operator>) -> Result<Self> {
        let ch = Self { operators };
        let dev = ch.completeness_deviation();
        if dev > 1e-10 {
            return Err(Error::NonPhysical(format!(
                "Kraus operators not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(ch)
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    /// `max |sum E_i^dag E_i - I|` over entries.
    pub fn completeness_deviation(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(Operator::zeros(2, 2), |acc, e| acc + e.adjoint() * e);
        (sum - identity(2)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl QubitChannel for KrausChannel {
    fn apply_operator(&self, op: &Operator) -> Operator {
        let dim = op.nrows();
        self.operators.iter().fold(Operator::zeros(dim, dim), |acc, e| {
            let big = lift(e, dim);
            acc + &big * op * big.adjoint()
        })
    }
}

impl QubitChannel for ChannelDecomposition {
    fn apply_operator(&self, op: &Operator) -> Operator {
        let dim = op.nrows();
        let z = lift(&pauli(3), dim);
        let mut out = op * c(self.q_identity) + &z * op * &z * c(self.q_pauli_z);
        if self.q_reset0 != 0.0 || self.q_reset1 != 0.0 {
            let target = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(self.q_reset0),
                c(self.q_reset1),
            ]));
            out += if dim == 2 {
                target * op.trace()
            } else {
                kron(&target, &trace_out_first(op))
            };
        }
        out
    }
}

impl QubitChannel for PauliChannelProbs {
    fn apply_operator(&self, op: &Operator) -> Operator {
        let dim = op.nrows();
        let weights = [self.p_identity(), self.p_x, self.p_y, self.p_z];
        (0..4).fold(Operator::zeros(dim, dim), |acc, i| {
            let p = lift(&pauli(i), dim);
            acc + &p * op * &p * c(weights[i])
        })
    }
}

/// Average of a channel over conjugation by `{I, X, Y, Z}`.
pub struct Twirled<'a, C: QubitChannel + ?Sized>(pub &'a C);

impl<C: QubitChannel + ?Sized> QubitChannel for Twirled<'_, C> {
    fn apply_operator(&self, op: &Operator) -> Operator {
        let dim = op.nrows();
        (0..4).fold(Operator::zeros(dim, dim), |acc, i| {
            let p = lift(&pauli(i), dim);
            acc + &p * self.0.apply_operator(&(&p * op * &p)) * &p * c(0.25)
        })
    }
}

/// Dephasing after (generalized) amplitude damping, in Kraus form.
///
/// Zero-weight operators are dropped, so `tau = 0` at zero temperature
/// yields the single identity operator.
pub fn kraus_thermal(params: &ThermalParams) -> KrausChannel {
    let (p_gamma, p_phi) = relaxation_probs(params);
    let p1 = params.p1();
    let (zero, keep, jump) = (c(0.0), c((1.0 - p_gamma).sqrt()), c(p_gamma.sqrt()));
    let mut damping = Vec::with_capacity(4);
    if p1 < 1.0 {
        let s = c((1.0 - p1).sqrt());
        damping.push(DMatrix::from_row_slice(2, 2, &[c(1.0), zero, zero, keep]) * s);
        if p_gamma > 0.0 {
            damping.push(DMatrix::from_row_slice(2, 2, &[zero, jump, zero, zero]) * s);
        }
    }
    if p1 > 0.0 {
        let s = c(p1.sqrt());
        damping.push(DMatrix::from_row_slice(2, 2, &[keep, zero, zero, c(1.0)]) * s);
        if p_gamma > 0.0 {
            damping.push(DMatrix::from_row_slice(2, 2, &[zero, zero, jump, zero]) * s);
        }
    }
    let mut operators: Vec<Operator> =
        damping.iter().map(|e| e * c((1.0 - p_phi).sqrt())).collect();
    if p_phi > 0.0 {
        let z = pauli(3);
        operators.extend(damping.iter().map(|e| &z * e * c(p_phi.sqrt())));
    }
    KrausChannel { operators }
}

fn dissipator(jump: &Operator, rho: &Operator) -> Operator {
    let jd = jump.adjoint();
    let jdj = &jd * jump;
    jump * rho * &jd - (&jdj * rho + rho * &jdj) * c(0.5)
}

fn lindblad_rhs(rho: &Operator, params: &ThermalParams) -> Operator {
    let lower = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let raise = lower.adjoint();
    dissipator(&lower, rho) * c(params.decay_rate())
        + dissipator(&raise, rho) * c(params.excitation_rate())
        + dissipator(&pauli(3), rho) * c(params.gamma_phi() / 2.0)
}

/// Fixed-step RK4 integration of the single-qubit thermal master equation over `params.tau()`.
pub fn integrate_master_equation(
    rho: &DensityMatrix,
    params: &ThermalParams,
    steps: usize,
) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::NonPhysical("master equation is single-qubit".into()));
    }
    if steps < 100 {
        return Err(Error::InvalidParams(format!("need at least 100 RK4 steps, got {steps}")));
    }
    let dt = c(params.tau() / steps as f64);
    let half = dt * 0.5;
    let mut m = rho.m.clone();
    for step in 0..steps {
        let k1 = lindblad_rhs(&m, params);
        let k2 = lindblad_rhs(&(&m + &k1 * half), params);
        let k3 = lindblad_rhs(&(&m + &k2 * half), params);
        let k4 = lindblad_rhs(&(&m + &k3 * dt), params);
        m += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * (dt / 6.0);
        let drift = (m.trace() - c(1.0)).norm();
        if drift > RK4_TRACE_DRIFT {
            return Err(Error::NonPhysical(format!(
                "trace drift {drift:e} at RK4 step {step}"
            )));
        }
    }
    Ok(DensityMatrix { m })
}

pub fn apply_decomposition(rho: &DensityMatrix, decomp: &ChannelDecomposition) -> DensityMatrix {
    decomp.apply(rho)
}

/// `1/2 ||rho - sigma||_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(&(&rho.m - &sigma.m));
    0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let root = psd_sqrt(&rho.m);
    let inner = &root * &sigma.m * &root;
    let (vals, _) = hermitian_eigen(&inner);
    let s: f64 = clamp_spectrum(&vals).iter().map(|v| v.sqrt()).sum();
    (s * s).min(1.0)
}

/// Fidelity of the two Choi states `(a (x) I)[Phi]` and `(b (x) I)[Phi]`.
pub fn channel_fidelity(a: &dyn QubitChannel, b: &dyn QubitChannel) -> f64 {
    let phi = DensityMatrix::max_entangled();
    state_fidelity(&a.apply(&phi), &b.apply(&phi))
}

/// Real 4x4 Pauli transfer matrix, `R_ij = tr(s_i E(s_j)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTransferMatrix(pub Matrix4<f64>);

impl PauliTransferMatrix {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).abs().max()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

pub fn pauli_transfer_matrix(channel: &dyn QubitChannel) -> PauliTransferMatrix {
    let mut r = Matrix4::zeros();
    for j in 0..4 {
        let out = channel.apply_operator(&pauli(j));
        for i in 0..4 {
            r[(i, j)] = 0.5 * (pauli(i) * &out).trace().re;
        }
    }
    PauliTransferMatrix(r)
}

/// Process matrix in the `{I, X, Y, Z}` basis, `E(rho) = sum chi_ij s_i rho s_j`.
pub fn chi_matrix(channel: &dyn QubitChannel) -> DMatrix<Complex64> {
    let omega = nalgebra::DVector::from_vec(vec![c(1.0), c(0.0), c(0.0), c(1.0)]);
    let choi = channel.apply_operator(&(&omega * omega.adjoint()));
    let vecs: Vec<_> = (0..4).map(|i| lift(&pauli(i), 4) * &omega).collect();
    DMatrix::from_fn(4, 4, |i, j| (vecs[i].adjoint() * &choi * &vecs[j])[(0, 0)] * 0.25)
}

/// Pauli-twirl a channel and read off its Pauli error probabilities.
pub fn pauli_twirl(channel: &dyn QubitChannel) -> PauliChannelProbs {
    let chi = chi_matrix(&Twirled(channel));
    PauliChannelProbs {
        p_x: chi[(1, 1)].re,
        p_y: chi[(2, 2)].re,
        p_z: chi[(3, 3)].re,
    }
}

/// `D(rho, PTA[rho]) - D(rho, E[rho])` for the meridian state at angle `theta`.
pub fn delta_d(theta: f64, params: &ThermalParams) -> f64 {
    let rho = DensityMatrix::meridian(theta);
    let exact = kraus_thermal(params).apply(&rho);
    let (pg, pp) = relaxation_probs(params);
    let twirled = pta_channel(pg, pp).apply(&rho);
    trace_distance(&rho, &twirled) - trace_distance(&rho, &exact)
}

pub fn delta_d_sweep(theta_grid: &[f64], params: &ThermalParams) -> Result<Vec<(f64, f64)>> {
    if let Some(t) = theta_grid.iter().find(|t| !(0.0..=std::f64::consts::PI).contains(*t)) {
        return Err(Error::InvalidParams(format!("theta {t} outside [0, pi]")));
    }
    Ok(theta_grid.iter().map(|&t| (t, delta_d(t, params))).collect())
}

/// Channel fidelities of the reset approximation and of the Pauli twirl to the exact channel.
pub fn approximation_fidelities(params: &ThermalParams) -> (f64, f64) {
    let exact = kraus_thermal(params);
    let reset = reset_approximation(params);
    let (pg, pp) = relaxation_probs(params);
    let pta = pta_channel(pg, pp);
    (channel_fidelity(&exact, &reset), channel_fidelity(&exact, &pta))
}

/// `F_reset - F_pta`.
pub fn delta_f(params: &ThermalParams) -> f64 {
    let (reset, pta) = approximation_fidelities(params);
    reset - pta
}

/// Fidelity gain over a `(T2/T1, tau/T1)` grid at fixed `p1`, with `T1 = 1`.
pub fn delta_f_sweep(
    t2_ratios: &[f64],
    tau_ratios: &[f64],
    p1: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::with_capacity(t2_ratios.len() * tau_ratios.len());
    for &r in t2_ratios {
        for &t in tau_ratios {
            let p = ThermalParams::new(1.0, r, t, p1)?;
            rows.push((r, t, delta_f(&p)));
        }
    }
    Ok(rows)
}

/// Fidelity gain over a `(p1, tau/T1)` grid at fixed `T2/T1`, with `T1 = 1`.
pub fn delta_f_thermal_sweep(
    p1_grid: &[f64],
    tau_ratios: &[f64],
    t2_ratio: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::with_capacity(p1_grid.len() * tau_ratios.len());
    for &p1 in p1_grid {
        for &t in tau_ratios {
            let p = ThermalParams::new(1.0, t2_ratio, t, p1)?;
            rows.push((p1, t, delta_f(&p)));
        }
    }
    Ok(rows)
}

/// Exact thermal channel in decomposition form; equal to [`kraus_thermal`] as a map.
pub fn decomposition_thermal(params: &ThermalParams) -> ChannelDecomposition {
    qpd_thermal(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::qpd_amplitude_damping;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn params(t1: f64, t2: f64, tau: f64, p1: f64) -> ThermalParams {
        ThermalParams::new(t1, t2, tau, p1).unwrap()
    }

    fn random_params(rng: &mut impl Rng) -> ThermalParams {
        let t1 = rng.random_range(0.5..5.0);
        let t2 = 2.0 * t1 * rng.random_range(0.05..=1.0);
        let tau = rng.random_range(0.0..2.0) * t1;
        let p1 = rng.random_range(0.0..=0.5);
        params(t1, t2, tau, p1)
    }

    fn random_state(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
        // mixture of two random pure states
        let mut m = Operator::zeros(dim, dim);
        for w in [0.7, 0.3] {
            let amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            m += DensityMatrix::pure(&amps).unwrap().m * c(w);
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn kraus_thermal_examples() {
        let k = kraus_thermal(&params(1.0, 2.0, 0.0, 0.0));
        assert_eq!(k.operators().len(), 1);
        assert_eq!(k.operators()[0], identity(2));

        let out = kraus_thermal(&params(1.0, 2.0, 1.0, 0.0)).apply(&DensityMatrix::excited());
        assert!((out.matrix()[(1, 1)].re - (-1.0f64).exp()).abs() < 1e-15);

        let plus = DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap();
        let out = kraus_thermal(&params(1.0, 1.0, 1.0, 0.0)).apply(&plus);
        assert!((out.matrix()[(0, 1)] - c((-1.0f64).exp() / 2.0)).norm() < 1e-15);
        let rk = integrate_master_equation(&plus, &params(1.0, 1.0, 1.0, 0.0), DEFAULT_RK4_STEPS)
            .unwrap();
        assert!(rk.max_abs_diff(&out) < 1e-10);
    }

    #[test]
    fn kraus_sets_are_cptp() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = kraus_thermal(&random_params(&mut rng));
            assert!(k.completeness_deviation() < 1e-10);
            assert!(KrausChannel::new(k.operators().to_vec()).is_ok());
        }
        assert!(KrausChannel::new(vec![pauli(3) * c(0.5)]).is_err());
    }

    #[test]
    fn master_equation_examples() {
        let rho = DensityMatrix::from_bloch(0.3, -0.2, 0.5).unwrap();
        let same = integrate_master_equation(&rho, &params(1.0, 1.3, 0.0, 0.2), 100).unwrap();
        assert_eq!(same, rho);

        let p = params(1.0, 2.0, 1.0, 0.0);
        let rk = integrate_master_equation(&DensityMatrix::excited(), &p, 10_000).unwrap();
        let closed = kraus_thermal(&p).apply(&DensityMatrix::excited());
        assert!(rk.max_abs_diff(&closed) < 1e-8);

        let p = params(1.0, 1.5, 50.0, 0.1);
        let eq = integrate_master_equation(&rho, &p, 10_000).unwrap();
        let target = DensityMatrix::from_bloch(0.0, 0.0, 0.8).unwrap();
        assert!(eq.max_abs_diff(&target) < 1e-6);

        assert!(integrate_master_equation(&rho, &p, 99).is_err());
    }

    #[test]
    fn master_equation_flags_trace_drift() {
        // A step count this coarse for tau = 400 T1 makes RK4 blow up.
        let p = params(1.0, 0.01, 400.0, 0.0);
        let rho = DensityMatrix::from_bloch(0.6, 0.0, 0.0).unwrap();
        let err = integrate_master_equation(&rho, &p, 100);
        assert!(matches!(err, Err(Error::NonPhysical(_))), "{err:?}");
    }

    #[test]
    fn rk4_matches_closed_form_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let rho = random_state(&mut rng, 2);
            let rk = integrate_master_equation(&rho, &p, DEFAULT_RK4_STEPS).unwrap();
            let closed = kraus_thermal(&p).apply(&rho);
            assert!(rk.max_abs_diff(&closed) < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn decomposition_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_state(&mut rng, 2);
        assert!(apply_decomposition(&rho, &ChannelDecomposition::IDENTITY).max_abs_diff(&rho) < 1e-15);

        let plus = DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap();
        let p = params(1.0, 2.0, 1.0, 0.0);
        let a = apply_decomposition(&plus, &qpd_thermal(&p));
        let b = kraus_thermal(&p).apply(&plus);
        assert!(a.max_abs_diff(&b) < 1e-12);

        let reset = ChannelDecomposition::new(0.0, 0.0, 1.0, 0.0).unwrap();
        assert!(apply_decomposition(&rho, &reset).max_abs_diff(&DensityMatrix::ground()) < 1e-15);

        // two-qubit input: the reset acts on the first factor only
        let bell = DensityMatrix::max_entangled();
        let out = apply_decomposition(&bell, &reset);
        let expect = kron(&DensityMatrix::ground().m, &(identity(2) * c(0.5)));
        assert!((out.m - expect).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn decomposition_application_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_state(&mut rng, 4);
        let d = qpd_thermal(&params(1.0, 1.8, 0.7, 0.2));
        let branches = [
            ChannelDecomposition::IDENTITY,
            ChannelDecomposition { q_identity: 0.0, q_pauli_z: 1.0, q_reset0: 0.0, q_reset1: 0.0 },
            ChannelDecomposition { q_identity: 0.0, q_pauli_z: 0.0, q_reset0: 1.0, q_reset1: 0.0 },
            ChannelDecomposition { q_identity: 0.0, q_pauli_z: 0.0, q_reset0: 0.0, q_reset1: 1.0 },
        ];
        let sum = branches
            .iter()
            .zip(d.coefficients())
            .fold(Operator::zeros(4, 4), |acc, (b, q)| acc + b.apply(&rho).m * c(q));
        assert!((apply_decomposition(&rho, &d).m - sum).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn trace_distance_examples() {
        let rho = DensityMatrix::from_bloch(0.1, 0.2, 0.3).unwrap();
        assert!(trace_distance(&rho, &rho).abs() < 1e-15);
        assert!((trace_distance(&DensityMatrix::ground(), &DensityMatrix::excited()) - 1.0).abs() < 1e-15);
        let p = params(1.0, 1.5, 1.0, 0.0);
        assert!(delta_d(PI / 3.0, &p).abs() < 1e-12);
    }

    #[test]
    fn delta_d_signs() {
        let p = params(1.0, 1.5, 1.0, 0.0);
        assert!(delta_d(0.0, &p) > 0.0);
        assert!(delta_d(PI, &p) < 0.0);
        let grid: Vec<f64> = (0..=200).map(|i| PI * i as f64 / 200.0).collect();
        let rows = delta_d_sweep(&grid, &p).unwrap();
        let flips: Vec<usize> = (1..rows.len())
            .filter(|&i| rows[i - 1].1 > 0.0 && rows[i].1 <= 0.0)
            .collect();
        assert_eq!(flips.len(), 1);
        let theta = rows[flips[0]].0;
        assert!((theta - PI / 3.0).abs() < 0.05);
        assert!(delta_d_sweep(&[-0.1], &p).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let k = kraus_thermal(&params(1.0, 1.4, 0.3, 0.05));
        assert!((channel_fidelity(&k, &k) - 1.0).abs() < 1e-12);
        let p = params(1.0, 1.0, 0.6, 0.0);
        let f = channel_fidelity(&kraus_thermal(&p), &reset_approximation(&p));
        assert!((f - 1.0).abs() < 1e-12);
        assert!(delta_f(&params(1.0, 1.5, 0.5, 0.0)) > 0.0);
        // the Choi state of the identity is pure: F(Phi, I/4) = 1/4
        let mixed = DensityMatrix::new(identity(4) * c(0.25)).unwrap();
        assert!((state_fidelity(&DensityMatrix::max_entangled(), &mixed) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fidelity_frozen_values() {
        // 40-digit mpmath reference
        let (reset, pta) = approximation_fidelities(&params(1.0, 2.0, 1.0, 0.0));
        for (args, expect) in [
            ((1.0, 1.5, 0.5, 0.0), (0.989_167_393_821_789_8, 0.875_732_450_234_466_2)),
            ((1.0, 1.5, 1.0, 0.1), (0.988_730_773_489_983_9, 0.909_605_596_963_346_1)),
            ((1.0, 1.02, 0.02, 0.0), (0.999_998_674_096_756_1, 0.994_184_023_348_900_2)),
        ] {
            let (r, p) = approximation_fidelities(&params(args.0, args.1, args.2, args.3));
            assert!((r - expect.0).abs() < 1e-12 && (p - expect.1).abs() < 1e-12, "{args:?}");
        }
        assert!((reset - 0.902_352_478_445_059_4).abs() < 1e-12);
        assert!((pta - 0.756_697_065_519_320_7).abs() < 1e-12);
    }

    #[test]
    fn ptm_examples() {
        let id = pauli_transfer_matrix(&ChannelDecomposition::IDENTITY);
        assert!(id.max_abs_diff(&PauliTransferMatrix(Matrix4::identity())) < 1e-15);
        let z = ChannelDecomposition { q_identity: 0.0, q_pauli_z: 1.0, q_reset0: 0.0, q_reset1: 0.0 };
        let expect = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, 1.0));
        assert!(pauli_transfer_matrix(&z).max_abs_diff(&PauliTransferMatrix(expect)) < 1e-15);
    }

    #[test]
    fn ptm_equality_implies_channel_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let a = pauli_transfer_matrix(&qpd_thermal(&p));
            let b = pauli_transfer_matrix(&kraus_thermal(&p));
            assert!(a.max_abs_diff(&b) < 1e-10, "{p:?}");
            assert!((a.entry(0, 0) - 1.0).abs() < 1e-15);
            for _ in 0..3 {
                let rho = random_state(&mut rng, 4);
                let x = qpd_thermal(&p).apply(&rho);
                let y = kraus_thermal(&p).apply(&rho);
                assert!(x.max_abs_diff(&y) < 1e-12);
            }
        }
    }

    #[test]
    fn twirl_examples() {
        let t = pauli_twirl(&ChannelDecomposition::IDENTITY);
        assert!(t.p_x.abs() < 1e-15 && t.p_y.abs() < 1e-15 && t.p_z.abs() < 1e-15);
        let deph = PauliChannelProbs::new(0.0, 0.0, 0.23).unwrap();
        let t = pauli_twirl(&deph);
        assert!((t.p_z - 0.23).abs() < 1e-15 && t.p_x.abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            let (pg, pp) = relaxation_probs(&p);
            let a = pauli_twirl(&kraus_thermal(&p));
            let b = pta_channel(pg, pp);
            assert!((a.p_x - b.p_x).abs() < 1e-10);
            assert!((a.p_y - b.p_y).abs() < 1e-10);
            assert!((a.p_z - b.p_z).abs() < 1e-10);
        }
    }

    #[test]
    fn chi_of_amplitude_damping_is_hermitian() {
        let chi = chi_matrix(&qpd_amplitude_damping(0.3));
        assert!((&chi - chi.adjoint()).iter().all(|z| z.norm() < 1e-14));
        assert!((chi.trace() - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn outputs_remain_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            let rho = random_state(&mut rng, 4);
            kraus_thermal(&p).apply(&rho).validate().unwrap();
            qpd_thermal(&p).apply(&rho).validate().unwrap();
        }
    }
}
