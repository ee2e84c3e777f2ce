//! Timed stabilizer circuits with detector and observable annotations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampler::{apply_branch, NoiseSite, ShotWeight};
use crate::tableau::{Gate, ResetTarget, Tableau};

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate { gate: Gate, qubits: [usize; 2] },
    Measure { qubit: usize, record: usize },
    Reset { qubit: usize, target: ResetTarget },
    Noise(NoiseSite),
    /// End of a syndrome round.
    Tick,
}

impl Instruction {
    pub fn is_measure_or_reset(&self) -> bool {
        matches!(self, Instruction::Measure { .. } | Instruction::Reset { .. })
    }
}

/// XOR of measurement records, optionally complemented.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParitySet {
    pub records: Vec<usize>,
    pub negated: bool,
}

impl ParitySet {
    pub fn new(records: Vec<usize>) -> Self {
        Self {
            records,
            negated: false,
        }
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        self.records.iter().fold(self.negated, |acc, r| acc ^ bits[*r])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    instructions: Vec<Instruction>,
    detectors: Vec<ParitySet>,
    observables: Vec<ParitySet>,
    num_records: usize,
}

/// Raw result of one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotOutcome {
    pub measurements: Vec<bool>,
    pub sign: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(Self {
            n_qubits,
            ..Self::default()
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn detectors(&self) -> &[ParitySet] {
        &self.detectors
    }

    pub fn observables(&self) -> &[ParitySet] {
        &self.observables
    }

    pub fn num_records(&self) -> usize {
        self.num_records
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        if qubits.len() != gate.arity() {
            return Err(Error::InvalidCircuit(format!(
                "{} takes {} qubit(s)",
                gate.name(),
                gate.arity()
            )));
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        if gate.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        let second = if gate.arity() == 2 { qubits[1] } else { qubits[0] };
        self.instructions.push(Instruction::Gate {
            gate,
            qubits: [qubits[0], second],
        });
        Ok(())
    }

    /// Appends a Z measurement and returns its record index.
    pub fn measure(&mut self, qubit: usize) -> Result<usize> {
        self.check_qubit(qubit)?;
        let record = self.num_records;
        self.num_records += 1;
        self.instructions.push(Instruction::Measure { qubit, record });
        Ok(record)
    }

    pub fn reset(&mut self, qubit: usize, target: ResetTarget) -> Result<()> {
        self.check_qubit(qubit)?;
        self.instructions.push(Instruction::Reset { qubit, target });
        Ok(())
    }

    pub fn tick(&mut self) {
        self.instructions.push(Instruction::Tick);
    }

    fn check_parity(&self, p: &ParitySet) -> Result<()> {
        match p.records.iter().find(|r| **r >= self.num_records) {
            Some(r) => Err(Error::InvalidCircuit(format!(
                "parity set references record {r} but only {} exist",
                self.num_records
            ))),
            None => Ok(()),
        }
    }

    pub fn add_detector(&mut self, p: ParitySet) -> Result<()> {
        self.check_parity(&p)?;
        self.detectors.push(p);
        Ok(())
    }

    pub fn add_observable(&mut self, p: ParitySet) -> Result<()> {
        self.check_parity(&p)?;
        self.observables.push(p);
        Ok(())
    }

    /// Replaces the instruction list, renumbering noise sites in order.
    pub(crate) fn with_instructions(&self, mut instructions: Vec<Instruction>) -> Self {
        let mut id = 0;
        for ins in &mut instructions {
            if let Instruction::Noise(site) = ins {
                site.site_id = id;
                id += 1;
            }
        }
        Self {
            instructions,
            ..self.clone()
        }
    }

    pub fn noise_sites(&self) -> impl Iterator<Item = &NoiseSite> {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Noise(s) => Some(s),
            _ => None,
        })
    }

    pub fn num_noise_sites(&self) -> usize {
        self.noise_sites().count()
    }

    /// Product of per-site negativities.
    pub fn gamma_total(&self) -> f64 {
        self.noise_sites().map(|s| s.channel.gamma()).product()
    }

    pub fn validate(&self) -> Result<()> {
        let mut next_record = 0;
        let mut next_site = 0;
        for ins in &self.instructions {
            match ins {
                Instruction::Gate { gate, qubits } => {
                    for &q in &qubits[..gate.arity()] {
                        self.check_qubit(q)?;
                    }
                }
                Instruction::Measure { qubit, record } => {
                    self.check_qubit(*qubit)?;
                    if *record != next_record {
                        return Err(Error::InvalidCircuit(format!(
                            "record {record} out of order, expected {next_record}"
                        )));
                    }
                    next_record += 1;
                }
                Instruction::Reset { qubit, .. } => self.check_qubit(*qubit)?,
                Instruction::Noise(site) => {
                    self.check_qubit(site.qubit)?;
                    if site.site_id != next_site {
                        return Err(Error::InvalidCircuit(format!(
                            "noise site id {} out of order",
                            site.site_id
                        )));
                    }
                    next_site += 1;
                }
                Instruction::Tick => {}
            }
        }
        if next_record != self.num_records {
            return Err(Error::InvalidCircuit("record count mismatch".into()));
        }
        for p in self.detectors.iter().chain(&self.observables) {
            self.check_parity(p)?;
        }
        Ok(())
    }

    /// Runs one shot on a fresh tableau.
    pub fn simulate<R: Rng + ?Sized>(&self, rng: &mut R) -> ShotOutcome {
        let mut t = Tableau::new(self.n_qubits).expect("nonempty register");
        let mut measurements = Vec::with_capacity(self.num_records);
        let mut sign = 1.0;
        for ins in &self.instructions {
            match ins {
                Instruction::Gate { gate, qubits } => t.apply_unchecked(*gate, qubits),
                Instruction::Measure { qubit, .. } => {
                    measurements.push(t.measure_z(*qubit, rng).outcome);
                }
                Instruction::Reset { qubit, target } => t.reset(*qubit, *target, rng),
                Instruction::Noise(site) => {
                    if site.channel.is_identity() {
                        continue;
                    }
                    let (branch, s) = site.channel.sample(rng);
                    sign *= s;
                    apply_branch(&mut t, site.qubit, branch, rng);
                }
                Instruction::Tick => {}
            }
        }
        ShotOutcome { measurements, sign }
    }

    pub fn detection_events(&self, measurements: &[bool]) -> Vec<bool> {
        self.detectors.iter().map(|d| d.eval(measurements)).collect()
    }

    pub fn observable_flips(&self, measurements: &[bool]) -> Vec<bool> {
        self.observables.iter().map(|o| o.eval(measurements)).collect()
    }

    pub fn shot_weight(&self, sign: f64) -> ShotWeight {
        ShotWeight {
            sign,
            gamma_product: self.gamma_total(),
        }
    }
}
