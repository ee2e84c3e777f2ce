//! Self-checks run by `oracle-check`.

use thermstab::channel::{pta_channel, qpd_thermal, relaxation_probs, reset_approximation, ThermalParams};
use thermstab::dense::{kraus_thermal, pauli_transfer_matrix, pauli_twirl, DensityMatrix, QubitChannel};
use thermstab::sampler::{apply_branch, shot_rng, Accumulator, QuasiDistribution};
use thermstab::tableau::{Gate, Tableau};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Deterministic low-discrepancy points in `[0, 1)^4`.
fn draw(k: usize) -> [f64; 4] {
    const STEPS: [f64; 4] = [0.618_033_988_749_895, 0.414_213_562_373_095, 0.732_050_807_568_877, 0.236_067_977_499_79];
    STEPS.map(|a| (0.5 + k as f64 * a).fract())
}

/// Valid parameters spanning `T2 <= 2 T1`, `tau <= 2 T1`, `p1 <= 1/2`.
pub fn params_draw(k: usize) -> ThermalParams {
    let [a, b, c, d] = draw(k);
    let t1 = 0.5 + 4.5 * a;
    let t2 = 2.0 * t1 * (0.02 + 0.98 * b);
    ThermalParams::new(t1, t2, 2.0 * t1 * c, 0.5 * d).expect("draw is valid")
}

/// Largest PTM difference between the exact decomposition and the Kraus channel.
pub fn ptm_exactness(draws: usize) -> CheckResult {
    let worst = (0..draws)
        .map(|k| {
            let p = params_draw(k);
            pauli_transfer_matrix(&qpd_thermal(&p)).max_abs_diff(&pauli_transfer_matrix(&kraus_thermal(&p)))
        })
        .fold(0.0, f64::max);
    CheckResult {
        name: "ptm_exactness".into(),
        passed: worst <= 1e-10,
        detail: format!("max |PTM(qpd) - PTM(kraus)| = {worst:e} over {draws} draws"),
    }
}

/// Largest gap between the numerical twirl and the closed-form Pauli channel.
pub fn twirl_match(draws: usize) -> CheckResult {
    let worst = (0..draws)
        .map(|k| {
            let p = params_draw(k);
            let numeric = pauli_twirl(&kraus_thermal(&p));
            let (pg, pp) = relaxation_probs(&p);
            let closed = pta_channel(pg, pp);
            [numeric.p_x - closed.p_x, numeric.p_y - closed.p_y, numeric.p_z - closed.p_z]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max);
    CheckResult {
        name: "twirl_match".into(),
        passed: worst <= 1e-10,
        detail: format!("max |twirl(kraus) - pta| = {worst:e} over {draws} draws"),
    }
}

/// Reset approximation coincides with the exact channel at `T2 = T1`.
pub fn reset_limit(draws: usize) -> CheckResult {
    let worst = (0..draws)
        .map(|k| {
            let q = params_draw(k);
            let p = ThermalParams::new(q.t1(), q.t1(), q.tau(), q.p1()).expect("T2 = T1 is valid");
            pauli_transfer_matrix(&reset_approximation(&p)).max_abs_diff(&pauli_transfer_matrix(&kraus_thermal(&p)))
        })
        .fold(0.0, f64::max);
    CheckResult {
        name: "reset_limit".into(),
        passed: worst <= 1e-10,
        detail: format!("max |PTM(reset) - PTM(kraus)| at T2 = T1 = {worst:e}"),
    }
}

const CARDINAL: [(&str, [f64; 3], &[Gate]); 6] = [
    ("|0>", [0.0, 0.0, 1.0], &[]),
    ("|1>", [0.0, 0.0, -1.0], &[Gate::X]),
    ("|+>", [1.0, 0.0, 0.0], &[Gate::H]),
    ("|->", [-1.0, 0.0, 0.0], &[Gate::X, Gate::H]),
    ("|+i>", [0.0, 1.0, 0.0], &[Gate::H, Gate::S]),
    ("|-i>", [0.0, -1.0, 0.0], &[Gate::X, Gate::H, Gate::S]),
];

fn readout(axis: usize) -> &'static [Gate] {
    match axis {
        1 => &[Gate::H],
        2 => &[Gate::S, Gate::S, Gate::S, Gate::H],
        _ => &[],
    }
}

/// Sign-weighted tableau tomography of one negative site on the six cardinal
/// states, compared with the dense channel within `sigmas` standard errors.
pub fn tomography(shots: u64, seed: u64, sigmas: f64) -> CheckResult {
    let params = ThermalParams::zero_temperature(1.0, 2.0, 1.0).expect("valid");
    let decomposition = qpd_thermal(&params);
    let site = QuasiDistribution::from_decomposition(&decomposition);
    let kraus = kraus_thermal(&params);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (s, (name, bloch, prep)) in CARDINAL.iter().enumerate() {
        let rho = DensityMatrix::from_bloch(bloch[0], bloch[1], bloch[2]).expect("pure state");
        let expected = kraus.apply(&rho);
        for axis in 1..=3 {
            let stream = seed.wrapping_add((3 * s + axis) as u64 * 0x9e37_79b9);
            let mut acc = Accumulator::default();
            for shot in 0..shots {
                let mut rng = shot_rng(stream, shot);
                let mut t = Tableau::new(1).expect("one qubit");
                for g in prep.iter() {
                    t.apply_unchecked(*g, &[0]);
                }
                let (branch, sign) = site.sample(&mut rng);
                apply_branch(&mut t, 0, branch, &mut rng);
                for g in readout(axis) {
                    t.apply_unchecked(*g, &[0]);
                }
                let value = if t.measure_z(0, &mut rng).outcome { -1.0 } else { 1.0 };
                acc.push(sign * value);
            }
            let est = acc.finish(site.gamma()).expect("shots > 0");
            let z = (est.estimate - expected.pauli_expectation(axis)).abs() / est.std_error.max(1e-300);
            worst = worst.max(z);
            if z > sigmas {
                failures.push(format!("{name} axis {axis}: {:.4} vs {:.4}", est.estimate, expected.pauli_expectation(axis)));
            }
        }
    }
    CheckResult {
        name: "tomography".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("18 Pauli expectations within {sigmas} sigma at {shots} shots (worst {worst:.2} sigma)")
        } else {
            failures.join("; ")
        },
    }
}

pub fn run_all(draws: usize, shots: u64, seed: u64) -> Vec<CheckResult> {
    vec![
        ptm_exactness(draws),
        twirl_match(draws),
        reset_limit(draws),
        tomography(shots, seed, 5.0),
    ]
}
