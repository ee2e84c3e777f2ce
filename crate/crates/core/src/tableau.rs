//! CHP stabilizer tableau.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers and row `2n` is
//! scratch space for deterministic measurements. Each row stores its X and Z
//! parts as bit-packed words over the qubit columns, so the row products that
//! dominate measurement cost are word-parallel. Single-qubit gates touch one
//! bit per row.

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Clifford gates supported by [`Tableau::apply_gate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H,
    S,
    X,
    Y,
    Z,
    Cnot,
    Cz,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::Cnot | Gate::Cz => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::S => "S",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::Cnot => "CNOT",
            Gate::Cz => "CZ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResetTarget {
    Zero,
    One,
}

/// Outcome of a Z-basis measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: bool,
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Vec<bool>,
}

impl Tableau {
    /// `|0...0>` on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        let words = n.div_ceil(WORD);
        let rows = 2 * n + 1;
        let mut t = Self {
            n,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            phase: vec![false; rows],
        };
        for q in 0..n {
            let (w, m) = (q / WORD, 1u64 << (q % WORD));
            t.x[q * words + w] |= m;
            t.z[(n + q) * words + w] |= m;
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::QubitOutOfRange { qubit: q, n: self.n })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn bit(&self, plane: &[u64], row: usize, q: usize) -> bool {
        plane[row * self.words + q / WORD] >> (q % WORD) & 1 == 1
    }

    /// Validated gate application.
    pub fn apply_gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        if qubits.len() != gate.arity() {
            return Err(Error::InvalidCircuit(format!(
                "{} takes {} qubit(s), got {}",
                gate.name(),
                gate.arity(),
                qubits.len()
            )));
        }
        for &q in qubits {
            self.check(q)?;
        }
        if gate.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        self.apply_unchecked(gate, qubits);
        Ok(())
    }

    /// Gate application for pre-validated circuits.
    pub fn apply_unchecked(&mut self, gate: Gate, qubits: &[usize]) {
        match gate {
            Gate::H => self.h(qubits[0]),
            Gate::S => self.s(qubits[0]),
            Gate::X => self.x(qubits[0]),
            Gate::Y => self.y(qubits[0]),
            Gate::Z => self.z(qubits[0]),
            Gate::Cnot => self.cnot(qubits[0], qubits[1]),
            Gate::Cz => self.cz(qubits[0], qubits[1]),
        }
    }

    pub fn h(&mut self, q: usize) {
        let (w, sh) = (q / WORD, q % WORD);
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let xb = self.x[i] >> sh & 1;
            let zb = self.z[i] >> sh & 1;
            self.phase[row] ^= xb & zb == 1;
            if xb != zb {
                self.x[i] ^= 1 << sh;
                self.z[i] ^= 1 << sh;
            }
        }
    }

    pub fn s(&mut self, q: usize) {
        let (w, sh) = (q / WORD, q % WORD);
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let xb = self.x[i] >> sh & 1;
            let zb = self.z[i] >> sh & 1;
            self.phase[row] ^= xb & zb == 1;
            self.z[i] ^= xb << sh;
        }
    }

    /// Pauli conjugations only touch phases.
    fn pauli(&mut self, q: usize, flip_on_x: bool, flip_on_z: bool) {
        let (w, sh) = (q / WORD, q % WORD);
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let xb = (self.x[i] >> sh & 1 == 1) && flip_on_x;
            let zb = (self.z[i] >> sh & 1 == 1) && flip_on_z;
            self.phase[row] ^= xb ^ zb;
        }
    }

    pub fn x(&mut self, q: usize) {
        self.pauli(q, false, true);
    }

    pub fn z(&mut self, q: usize) {
        self.pauli(q, true, false);
    }

    pub fn y(&mut self, q: usize) {
        self.pauli(q, true, true);
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (wc, sc) = (control / WORD, control % WORD);
        let (wt, st) = (target / WORD, target % WORD);
        for row in 0..2 * self.n {
            let base = row * self.words;
            let xc = self.x[base + wc] >> sc & 1;
            let zc = self.z[base + wc] >> sc & 1;
            let xt = self.x[base + wt] >> st & 1;
            let zt = self.z[base + wt] >> st & 1;
            self.phase[row] ^= xc & zt & (xt ^ zc ^ 1) == 1;
            self.x[base + wt] ^= xc << st;
            self.z[base + wc] ^= zt << sc;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    /// Left-multiply row `h` by row `i`, tracking the sign.
    fn rowsum(&mut self, h: usize, i: usize) {
        let (hb, ib) = (h * self.words, i * self.words);
        let mut plus = 0u32;
        let mut minus = 0u32;
        for w in 0..self.words {
            let (x1, z1) = (self.x[ib + w], self.z[ib + w]);
            let (x2, z2) = (self.x[hb + w], self.z[hb + w]);
            let y1 = x1 & z1;
            let xo = x1 & !z1;
            let zo = !x1 & z1;
            plus += (y1 & z2 & !x2 | xo & x2 & z2 | zo & x2 & !z2).count_ones();
            minus += (y1 & x2 & !z2 | xo & z2 & !x2 | zo & x2 & z2).count_ones();
            self.x[hb + w] = x1 ^ x2;
            self.z[hb + w] = z1 ^ z2;
        }
        let total = 2 * (self.phase[h] as i64 + self.phase[i] as i64) + plus as i64 - minus as i64;
        self.phase[h] = total.rem_euclid(4) == 2;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.phase[dst] = self.phase[src];
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.phase[row] = false;
    }

    /// Outcome of measuring `Z_q` if it is determined, without touching the state.
    pub fn peek_z(&mut self, q: usize) -> Option<bool> {
        let n = self.n;
        if (n..2 * n).any(|row| self.bit(&self.x, row, q)) {
            return None;
        }
        let scratch = 2 * n;
        self.clear_row(scratch);
        for i in 0..n {
            if self.bit(&self.x, i, q) {
                self.rowsum(scratch, i + n);
            }
        }
        Some(self.phase[scratch])
    }

    /// Z-basis measurement. The random branch consumes exactly one `bool` draw.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Measurement {
        let n = self.n;
        let pivot = (n..2 * n).find(|&row| self.bit(&self.x, row, q));
        match pivot {
            Some(p) => {
                for row in 0..2 * n {
                    if row != p && self.bit(&self.x, row, q) {
                        self.rowsum(row, p);
                    }
                }
                self.copy_row(p - n, p);
                self.clear_row(p);
                let outcome = rng.random::<bool>();
                self.z[p * self.words + q / WORD] |= 1 << (q % WORD);
                self.phase[p] = outcome;
                Measurement {
                    outcome,
                    deterministic: false,
                }
            }
            None => Measurement {
                outcome: self.peek_z(q).expect("no anticommuting stabilizer"),
                deterministic: true,
            },
        }
    }

    /// Measure then conditionally flip into the target state.
    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, target: ResetTarget, rng: &mut R) {
        let m = self.measure_z(q, rng);
        if m.outcome != (target == ResetTarget::One) {
            self.x(q);
        }
    }

    /// Row as a Pauli string over `I, X, Y, Z` with its sign.
    pub fn row_string(&self, row: usize) -> String {
        let mut s = String::with_capacity(self.n + 1);
        s.push(if self.phase[row] { '-' } else { '+' });
        for q in 0..self.n {
            s.push(match (self.bit(&self.x, row, q), self.bit(&self.z, row, q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            });
        }
        s
    }

    pub fn stabilizers(&self) -> Vec<String> {
        (self.n..2 * self.n).map(|r| self.row_string(r)).collect()
    }

    fn anticommute(&self, a: usize, b: usize) -> bool {
        let (ab, bb) = (a * self.words, b * self.words);
        let mut parity = 0u32;
        for w in 0..self.words {
            parity ^= (self.x[ab + w] & self.z[bb + w] ^ self.z[ab + w] & self.x[bb + w]).count_ones();
        }
        parity & 1 == 1
    }

    /// Checks the destabilizer/stabilizer symplectic pairing and full stabilizer rank.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if self.anticommute(n + i, n + j) {
                    return Err(Error::NonPhysical(format!("stabilizers {i} and {j} anticommute")));
                }
                if self.anticommute(i, j) {
                    return Err(Error::NonPhysical(format!("destabilizers {i} and {j} anticommute")));
                }
                if self.anticommute(i, n + j) != (i == j) {
                    return Err(Error::NonPhysical(format!(
                        "destabilizer {i} / stabilizer {j} pairing broken"
                    )));
                }
            }
        }
        let rows: Vec<Vec<bool>> = (n..2 * n)
            .map(|r| {
                (0..n)
                    .map(|q| self.bit(&self.x, r, q))
                    .chain((0..n).map(|q| self.bit(&self.z, r, q)))
                    .collect()
            })
            .collect();
        let rank = crate::gf2::rank(&rows);
        if rank != n {
            return Err(Error::NonPhysical(format!("stabilizer rank {rank} != {n}")));
        }
        Ok(())
    }
}
