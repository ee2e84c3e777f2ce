//! Code layouts and memory-experiment circuit builders.

mod bb;
mod surface;

pub use bb::{BbSpec, bb_layout};
pub use surface::surface_layout;

use crate::circuit::{Circuit, ParitySet};
use crate::error::{Error, Result};
use crate::tableau::{Gate, ResetTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialState {
    Zero,
    One,
    Plus,
}

impl InitialState {
    pub fn basis(self) -> Basis {
        match self {
            InitialState::Plus => Basis::X,
            _ => Basis::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub distance: usize,
    pub basis: Basis,
    pub initial_state: InitialState,
}

impl SurfaceSpec {
    pub fn new(distance: usize, initial_state: InitialState) -> Self {
        Self {
            distance,
            basis: initial_state.basis(),
            initial_state,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Surface(SurfaceSpec),
    Bb(BbSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    X,
    Z,
}

/// One CNOT between a check ancilla and a data qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coupling {
    pub kind: CheckKind,
    pub check: usize,
    pub data: usize,
}

/// Data qubits, check supports, CNOT layers and logical operators of a CSS code.
///
/// Ancilla of X check `i` is qubit `n_data + i`; Z check `j` is
/// `n_data + x_checks.len() + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssLayout {
    pub n_data: usize,
    pub x_checks: Vec<Vec<usize>>,
    pub z_checks: Vec<Vec<usize>>,
    pub schedule: Vec<Vec<Coupling>>,
    pub logical_z: Vec<Vec<usize>>,
    pub logical_x: Vec<Vec<usize>>,
}

impl CssLayout {
    pub fn n_qubits(&self) -> usize {
        self.n_data + self.x_checks.len() + self.z_checks.len()
    }

    pub fn ancilla(&self, kind: CheckKind, check: usize) -> usize {
        match kind {
            CheckKind::X => self.n_data + check,
            CheckKind::Z => self.n_data + self.x_checks.len() + check,
        }
    }

    fn checks(&self, kind: CheckKind) -> &[Vec<usize>] {
        match kind {
            CheckKind::X => &self.x_checks,
            CheckKind::Z => &self.z_checks,
        }
    }

    fn prepare(&self, c: &mut Circuit, state: InitialState) -> Result<()> {
        match state {
            InitialState::Zero => {}
            InitialState::One => {
                for &q in &self.logical_x[0] {
                    c.gate(Gate::X, &[q])?;
                }
            }
            InitialState::Plus => {
                for q in 0..self.n_data {
                    c.gate(Gate::H, &[q])?;
                }
            }
        }
        Ok(())
    }

    /// Entangling part of one syndrome round, without measurement.
    fn extraction(&self, c: &mut Circuit) -> Result<()> {
        let x_anc: Vec<usize> = (0..self.x_checks.len()).map(|i| self.ancilla(CheckKind::X, i)).collect();
        for &a in &x_anc {
            c.gate(Gate::H, &[a])?;
        }
        for layer in &self.schedule {
            for cp in layer {
                let a = self.ancilla(cp.kind, cp.check);
                match cp.kind {
                    CheckKind::X => c.gate(Gate::Cnot, &[a, cp.data])?,
                    CheckKind::Z => c.gate(Gate::Cnot, &[cp.data, a])?,
                }
            }
        }
        for &a in &x_anc {
            c.gate(Gate::H, &[a])?;
        }
        Ok(())
    }
}

/// Memory experiment: preparation, `rounds` syndrome rounds, final data readout.
pub fn build_memory(layout: &CssLayout, state: InitialState, rounds: usize) -> Result<Circuit> {
    if rounds == 0 {
        return Err(Error::InvalidCircuit("rounds must be at least 1".into()));
    }
    let basis = state.basis();
    let logicals = match basis {
        Basis::Z => &layout.logical_z,
        Basis::X => &layout.logical_x,
    };
    if logicals.is_empty() || (state == InitialState::One && layout.logical_x.is_empty()) {
        return Err(Error::InvalidCode("layout has no logical operators".into()));
    }
    let kinds = [CheckKind::X, CheckKind::Z];
    let memory_kind = match basis {
        Basis::Z => CheckKind::Z,
        Basis::X => CheckKind::X,
    };
    let mut c = Circuit::new(layout.n_qubits())?;
    layout.prepare(&mut c, state)?;
    let mut previous: Option<Vec<Vec<usize>>> = None;
    for _ in 0..rounds {
        layout.extraction(&mut c)?;
        let mut records = Vec::new();
        for kind in kinds {
            let mut rs = Vec::new();
            for i in 0..layout.checks(kind).len() {
                rs.push(c.measure(layout.ancilla(kind, i))?);
            }
            records.push(rs);
        }
        for q in layout.n_data..layout.n_qubits() {
            c.reset(q, ResetTarget::Zero)?;
        }
        for (k, kind) in kinds.iter().enumerate() {
            for (i, &r) in records[k].iter().enumerate() {
                match &previous {
                    Some(prev) => c.add_detector(ParitySet::new(vec![prev[k][i], r]))?,
                    None if *kind == memory_kind => c.add_detector(ParitySet::new(vec![r]))?,
                    None => {}
                }
            }
        }
        previous = Some(records);
        c.tick();
    }
    if basis == Basis::X {
        for q in 0..layout.n_data {
            c.gate(Gate::H, &[q])?;
        }
    }
    let data: Vec<usize> = (0..layout.n_data).map(|q| c.measure(q)).collect::<Result<_>>()?;
    let last = previous.expect("at least one round");
    let k = if memory_kind == CheckKind::X { 0 } else { 1 };
    for (i, support) in layout.checks(memory_kind).iter().enumerate() {
        let mut rs: Vec<usize> = support.iter().map(|&q| data[q]).collect();
        rs.push(last[k][i]);
        c.add_detector(ParitySet::new(rs))?;
    }
    for (j, op) in logicals.iter().enumerate() {
        c.add_observable(ParitySet {
            records: op.iter().map(|&q| data[q]).collect(),
            negated: state == InitialState::One && j == 0,
        })?;
    }
    Ok(c)
}

/// Preparation, one unmeasured syndrome round, then Z readout of every qubit.
pub fn build_population_circuit(layout: &CssLayout, state: InitialState) -> Result<Circuit> {
    let mut c = Circuit::new(layout.n_qubits())?;
    layout.prepare(&mut c, state)?;
    layout.extraction(&mut c)?;
    for q in 0..layout.n_qubits() {
        c.measure(q)?;
    }
    Ok(c)
}

pub fn layout_for(spec: &CodeSpec) -> Result<CssLayout> {
    match spec {
        CodeSpec::Surface(s) => {
            if s.basis != s.initial_state.basis() {
                return Err(Error::InvalidCode(format!(
                    "initial state {:?} requires {:?}-basis memory",
                    s.initial_state,
                    s.initial_state.basis()
                )));
            }
            surface_layout(s.distance)
        }
        CodeSpec::Bb(b) => bb_layout(b),
    }
}

pub fn build_surface_memory(spec: &SurfaceSpec, rounds: usize) -> Result<Circuit> {
    let layout = layout_for(&CodeSpec::Surface(*spec))?;
    build_memory(&layout, spec.initial_state, rounds)
}

/// Z-basis `|0>` memory on a bivariate-bicycle code.
pub fn build_bb_memory(spec: &BbSpec, rounds: usize) -> Result<Circuit> {
    build_memory(&bb_layout(spec)?, InitialState::Zero, rounds)
}

pub fn build_code_memory(spec: &CodeSpec, rounds: usize) -> Result<Circuit> {
    match spec {
        CodeSpec::Surface(s) => build_surface_memory(s, rounds),
        CodeSpec::Bb(b) => build_bb_memory(b, rounds),
    }
}
