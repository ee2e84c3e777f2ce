#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use thermstab::channel::ThermalParams;
use thermstab::sampler::{apply_branch, shot_rng, Accumulator, Estimate, QuasiDistribution};
use thermstab::tableau::{Gate, ResetTarget, Tableau};

/// Dense state vector; bit `q` of the index is qubit `q`.
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    fn pairs(&self, q: usize) -> impl Iterator<Item = (usize, usize)> {
        let bit = 1 << q;
        (0..1usize << self.n).filter(move |i| i & bit == 0).map(move |i| (i, i | bit))
    }

    pub fn apply(&mut self, gate: Gate, qs: &[usize]) {
        let i_unit = Complex64::new(0.0, 1.0);
        match gate {
            Gate::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for (a, b) in self.pairs(qs[0]).collect::<Vec<_>>() {
                    let (x, y) = (self.amps[a], self.amps[b]);
                    self.amps[a] = (x + y) * s;
                    self.amps[b] = (x - y) * s;
                }
            }
            Gate::S => {
                for (_, b) in self.pairs(qs[0]).collect::<Vec<_>>() {
                    self.amps[b] *= i_unit;
                }
            }
            Gate::X => {
                for (a, b) in self.pairs(qs[0]).collect::<Vec<_>>() {
                    self.amps.swap(a, b);
                }
            }
            Gate::Y => {
                for (a, b) in self.pairs(qs[0]).collect::<Vec<_>>() {
                    let (x, y) = (self.amps[a], self.amps[b]);
                    self.amps[a] = -i_unit * y;
                    self.amps[b] = i_unit * x;
                }
            }
            Gate::Z => {
                for (_, b) in self.pairs(qs[0]).collect::<Vec<_>>() {
                    self.amps[b] = -self.amps[b];
                }
            }
            Gate::Cnot => {
                let (c, t) = (1 << qs[0], 1 << qs[1]);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            Gate::Cz => {
                let (a, b) = (1 << qs[0], 1 << qs[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> q & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn collapse(&mut self, q: usize, outcome: bool) {
        let p = if outcome { self.prob_one(q) } else { 1.0 - self.prob_one(q) };
        let norm = p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> q & 1 == 1) == outcome {
                *a /= norm;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Op {
    Gate(Gate, usize, usize),
    Measure(usize),
    Reset(usize, ResetTarget),
}

pub fn random_circuit(rng: &mut impl Rng, n: usize, len: usize) -> Vec<Op> {
    let gates = [Gate::H, Gate::S, Gate::X, Gate::Y, Gate::Z, Gate::Cnot, Gate::Cz];
    (0..len)
        .map(|_| {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            match rng.random_range(0..10) {
                0 => Op::Measure(a),
                1 => Op::Reset(a, if rng.random() { ResetTarget::One } else { ResetTarget::Zero }),
                _ => Op::Gate(gates[rng.random_range(0..gates.len())], a, b),
            }
        })
        .collect()
}

/// Runs `ops` followed by a full readout on both simulators; `Err` describes the first mismatch.
pub fn compare_with_state_vector(n: usize, ops: &[Op], rng: &mut impl Rng) -> Result<(), String> {
    let mut t = Tableau::new(n).unwrap();
    let mut sv = StateVector::new(n);
    let mut check = |t: &mut Tableau, sv: &mut StateVector, q: usize, step: usize| -> Result<bool, String> {
        let p1 = sv.prob_one(q);
        let m = t.measure_z(q, rng);
        if m.deterministic {
            let want = if m.outcome { 1.0 } else { 0.0 };
            if (p1 - want).abs() > 1e-9 {
                return Err(format!("step {step}: tableau says {} deterministically, P(1) = {p1}", m.outcome));
            }
        } else if (p1 - 0.5).abs() > 1e-9 {
            return Err(format!("step {step}: tableau says random, P(1) = {p1}"));
        }
        sv.collapse(q, m.outcome);
        Ok(m.outcome)
    };
    for (step, op) in ops.iter().enumerate() {
        match *op {
            Op::Gate(g, a, b) => {
                let qs = if g.arity() == 2 { vec![a, b] } else { vec![a] };
                t.apply_gate(g, &qs).unwrap();
                sv.apply(g, &qs);
            }
            Op::Measure(q) => {
                check(&mut t, &mut sv, q, step)?;
            }
            Op::Reset(q, target) => {
                let out = check(&mut t, &mut sv, q, step)?;
                if out != (target == ResetTarget::One) {
                    t.x(q);
                    sv.apply(Gate::X, &[q]);
                }
            }
        }
    }
    for q in 0..n {
        check(&mut t, &mut sv, q, ops.len() + q)?;
    }
    t.check_invariants().map_err(|e| e.to_string())
}

pub fn random_params(rng: &mut impl Rng) -> ThermalParams {
    let t1 = rng.random_range(0.5..5.0);
    let t2 = 2.0 * t1 * rng.random_range(0.05..=1.0);
    let tau = rng.random_range(0.0..=2.0) * t1;
    let p1 = rng.random_range(0.0..=0.5);
    ThermalParams::new(t1, t2, tau, p1).unwrap()
}

/// The six cardinal states as `(name, bloch vector, preparation from |0>)`.
pub fn cardinal_states() -> [(&'static str, [f64; 3], &'static [Gate]); 6] {
    [
        ("|0>", [0.0, 0.0, 1.0], &[]),
        ("|1>", [0.0, 0.0, -1.0], &[Gate::X]),
        ("|+>", [1.0, 0.0, 0.0], &[Gate::H]),
        ("|->", [-1.0, 0.0, 0.0], &[Gate::X, Gate::H]),
        ("|+i>", [0.0, 1.0, 0.0], &[Gate::H, Gate::S]),
        ("|-i>", [0.0, -1.0, 0.0], &[Gate::X, Gate::H, Gate::S]),
    ]
}

/// Rotation taking Pauli `axis` (1 = X, 2 = Y, 3 = Z) to Z.
pub fn readout_rotation(axis: usize) -> &'static [Gate] {
    match axis {
        1 => &[Gate::H],
        2 => &[Gate::S, Gate::S, Gate::S, Gate::H],
        _ => &[],
    }
}

/// Sign-weighted estimate of a Pauli expectation after `sites` noise sites.
pub fn estimate_pauli(prep: &[Gate], channel: &QuasiDistribution, sites: usize, axis: usize, shots: u64, seed: u64) -> Estimate {
    let mut acc = Accumulator::default();
    for shot in 0..shots {
        let mut rng = shot_rng(seed, shot);
        let mut t = Tableau::new(1).unwrap();
        for g in prep {
            t.apply_unchecked(*g, &[0]);
        }
        let mut sign = 1.0;
        for _ in 0..sites {
            let (b, s) = channel.sample(&mut rng);
            sign *= s;
            apply_branch(&mut t, 0, b, &mut rng);
        }
        for g in readout_rotation(axis) {
            t.apply_unchecked(*g, &[0]);
        }
        let value = if t.measure_z(0, &mut rng).outcome { -1.0 } else { 1.0 };
        acc.push(sign * value);
    }
    acc.finish(channel.gamma().powi(sites as i32)).unwrap()
}
