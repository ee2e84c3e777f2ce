//! Small-instance decoders and the detector-model text format.
//!
//! Elementary faults are single-qubit Paulis at noise sites. Reset branches
//! are not Pauli, so they enter through their Pauli twirl: a reset with weight
//! `r` contributes `r/4` to each of X, Y and Z. Each fault is pushed through
//! the rest of the circuit as a Pauli frame to find the detectors and
//! observables it flips. Faults with equal effect are merged into one
//! detector-model line.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::sampler::{Branch, QuasiDistribution};
use crate::tableau::Gate;

/// Detector count above which the fault dictionary refuses to build.
pub const DICTIONARY_DETECTOR_LIMIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryFault {
    pub site_id: usize,
    pub qubit: usize,
    pub pauli: Pauli,
    pub probability: f64,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

/// One line of a detector model: an equivalence class of faults.
#[derive(Debug, Clone, PartialEq)]
pub struct DemFault {
    pub probability: f64,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectorModel {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub faults: Vec<DemFault>,
}

/// Probability of each Pauli at a site, magnitudes normalized by Γ.
pub fn pauli_probabilities(q: &QuasiDistribution) -> [(Pauli, f64); 3] {
    let g = q.gamma();
    let reset = (q.coefficient(Branch::Reset0).abs() + q.coefficient(Branch::Reset1).abs()) / 4.0;
    [
        (Pauli::X, (q.coefficient(Branch::X).abs() + reset) / g),
        (Pauli::Y, (q.coefficient(Branch::Y).abs() + reset) / g),
        (Pauli::Z, (q.coefficient(Branch::Z).abs() + reset) / g),
    ]
}

fn propagate(c: &Circuit, from: usize, qubit: usize, pauli: Pauli) -> (Vec<usize>, Vec<usize>) {
    let n = c.num_qubits();
    let mut x = vec![false; n];
    let mut z = vec![false; n];
    x[qubit] = pauli != Pauli::Z;
    z[qubit] = pauli != Pauli::X;
    let mut flipped = vec![false; c.num_records()];
    for ins in &c.instructions()[from..] {
        match ins {
            Instruction::Gate { gate, qubits: [a, b] } => match gate {
                Gate::H => std::mem::swap(&mut x[*a], &mut z[*a]),
                Gate::S => z[*a] ^= x[*a],
                Gate::X | Gate::Y | Gate::Z => {}
                Gate::Cnot => {
                    x[*b] ^= x[*a];
                    z[*a] ^= z[*b];
                }
                Gate::Cz => {
                    z[*a] ^= x[*b];
                    z[*b] ^= x[*a];
                }
            },
            Instruction::Measure { qubit, record } => flipped[*record] = x[*qubit],
            Instruction::Reset { qubit, .. } => {
                x[*qubit] = false;
                z[*qubit] = false;
            }
            Instruction::Noise(_) | Instruction::Tick => {}
        }
    }
    let hit = |sets: &[crate::circuit::ParitySet]| -> Vec<usize> {
        sets.iter()
            .enumerate()
            .filter(|(_, p)| p.records.iter().fold(false, |acc, r| acc ^ flipped[*r]))
            .map(|(i, _)| i)
            .collect()
    };
    (hit(c.detectors()), hit(c.observables()))
}

/// Every X, Y, Z fault at every noise site, in circuit order.
pub fn elementary_faults(c: &Circuit) -> Vec<ElementaryFault> {
    let mut out = Vec::new();
    for (idx, ins) in c.instructions().iter().enumerate() {
        let Instruction::Noise(site) = ins else { continue };
        for (pauli, probability) in pauli_probabilities(&site.channel) {
            if probability == 0.0 {
                continue;
            }
            let (detectors, observables) = propagate(c, idx + 1, site.qubit, pauli);
            out.push(ElementaryFault {
                site_id: site.site_id,
                qubit: site.qubit,
                pauli,
                probability,
                detectors,
                observables,
            });
        }
    }
    out
}

impl DetectorModel {
    /// Merges elementary faults with identical effects, first occurrence order.
    pub fn from_circuit(c: &Circuit) -> Self {
        let mut index: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
        let mut faults: Vec<DemFault> = Vec::new();
        for f in elementary_faults(c) {
            if f.detectors.is_empty() && f.observables.is_empty() {
                continue;
            }
            let key = (f.detectors.clone(), f.observables.clone());
            match index.get(&key) {
                Some(&i) => {
                    let p = faults[i].probability;
                    faults[i].probability = p + f.probability - 2.0 * p * f.probability;
                }
                None => {
                    index.insert(key, faults.len());
                    faults.push(DemFault {
                        probability: f.probability,
                        detectors: f.detectors,
                        observables: f.observables,
                    });
                }
            }
        }
        Self {
            num_detectors: c.detectors().len(),
            num_observables: c.observables().len(),
            faults,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# detectors {} observables {}\n",
            self.num_detectors, self.num_observables
        );
        for f in &self.faults {
            write!(s, "fault {}", f.probability).unwrap();
            for d in &f.detectors {
                write!(s, " D{d}").unwrap();
            }
            for o in &f.observables {
                write!(s, " L{o}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut model = Self::default();
        let err = |line: usize, msg: String| Error::DetectorModel { line, msg };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if let Some(header) = t.strip_prefix('#') {
                let words: Vec<&str> = header.split_whitespace().collect();
                if let ["detectors", d, "observables", o] = words[..] {
                    model.num_detectors = d.parse().map_err(|e| err(line, format!("{e}")))?;
                    model.num_observables = o.parse().map_err(|e| err(line, format!("{e}")))?;
                }
                continue;
            }
            if t.is_empty() {
                continue;
            }
            let mut words = t.split_whitespace();
            if words.next() != Some("fault") {
                return Err(err(line, format!("expected 'fault', got '{t}'")));
            }
            let p: f64 = words
                .next()
                .ok_or_else(|| err(line, "missing probability".into()))?
                .parse()
                .map_err(|e| err(line, format!("bad probability: {e}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(err(line, format!("probability {p} outside [0, 1]")));
            }
            let mut f = DemFault {
                probability: p,
                detectors: Vec::new(),
                observables: Vec::new(),
            };
            for w in words {
                let (list, num) = match w.split_at(1) {
                    ("D", n) => (&mut f.detectors, n),
                    ("L", n) => (&mut f.observables, n),
                    _ => return Err(err(line, format!("unexpected token '{w}'"))),
                };
                list.push(num.parse().map_err(|e| err(line, format!("bad index '{w}': {e}")))?);
            }
            model.num_detectors = model.num_detectors.max(f.detectors.iter().map(|d| d + 1).max().unwrap_or(0));
            model.num_observables = model.num_observables.max(f.observables.iter().map(|o| o + 1).max().unwrap_or(0));
            model.faults.push(f);
        }
        Ok(model)
    }
}

fn mask(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |m, i| m | 1 << i)
}

fn bits_to_mask(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |m, (i, b)| m | (u64::from(*b) << i))
}

fn mask_to_bits(m: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| m >> i & 1 == 1).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictionaryEntry {
    pub observables: u64,
    pub weight: u8,
}

/// Syndrome to lowest-weight correction over all sets of at most two faults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaultDictionary {
    entries: HashMap<u64, DictionaryEntry>,
    num_detectors: usize,
    num_observables: usize,
}

impl FaultDictionary {
    pub fn build(model: &DetectorModel, max_faults: usize) -> Result<Self> {
        if model.num_detectors > DICTIONARY_DETECTOR_LIMIT {
            return Err(Error::TooManyDetectors {
                detectors: model.num_detectors,
                limit: DICTIONARY_DETECTOR_LIMIT,
            });
        }
        if !(1..=2).contains(&max_faults) {
            return Err(Error::UnknownOption(format!("max_faults must be 1 or 2, got {max_faults}")));
        }
        let faults: Vec<(u64, u64)> = model
            .faults
            .iter()
            .map(|f| (mask(&f.detectors), mask(&f.observables)))
            .collect();
        let mut entries = HashMap::new();
        entries.insert(0, DictionaryEntry { observables: 0, weight: 0 });
        for &(d, o) in &faults {
            entries.entry(d).or_insert(DictionaryEntry { observables: o, weight: 1 });
        }
        if max_faults == 2 {
            for (i, &(di, oi)) in faults.iter().enumerate() {
                for &(dj, oj) in &faults[i + 1..] {
                    entries.entry(di ^ dj).or_insert(DictionaryEntry {
                        observables: oi ^ oj,
                        weight: 2,
                    });
                }
            }
        }
        Ok(Self {
            entries,
            num_detectors: model.num_detectors,
            num_observables: model.num_observables,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, events: &[bool]) -> Option<DictionaryEntry> {
        self.entries.get(&bits_to_mask(events)).copied()
    }
}

/// Detector graph for matching; node `num_detectors` is the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorGraph {
    num_detectors: usize,
    num_observables: usize,
    adjacency: Vec<Vec<(usize, f64, u64)>>,
}

#[derive(Clone, Copy, PartialEq)]
struct Visit(f64, usize);

impl Eq for Visit {}

impl Ord for Visit {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Visit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DetectorGraph {
    /// Edges from faults touching one or two detectors, weight `-ln p`.
    pub fn from_model(model: &DetectorModel) -> Self {
        let boundary = model.num_detectors;
        let mut best: HashMap<(usize, usize), (f64, u64)> = HashMap::new();
        for f in &model.faults {
            if f.probability <= 0.0 || f.probability >= 1.0 {
                continue;
            }
            let (a, b) = match f.detectors[..] {
                [a] => (a, boundary),
                [a, b] => (a.min(b), a.max(b)),
                _ => continue,
            };
            let w = -f.probability.ln();
            let obs = mask(&f.observables);
            let e = best.entry((a, b)).or_insert((w, obs));
            if w < e.0 {
                *e = (w, obs);
            }
        }
        let mut adjacency = vec![Vec::new(); boundary + 1];
        let mut edges: Vec<_> = best.into_iter().collect();
        edges.sort_by_key(|(k, _)| *k);
        for ((a, b), (w, o)) in edges {
            adjacency[a].push((b, w, o));
            adjacency[b].push((a, w, o));
        }
        Self {
            num_detectors: model.num_detectors,
            num_observables: model.num_observables,
            adjacency,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Distances and path observable parities from `src`.
    fn dijkstra(&self, src: usize) -> (Vec<f64>, Vec<u64>) {
        let n = self.adjacency.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut obs = vec![0u64; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Visit(0.0, src));
        while let Some(Visit(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            // paths do not continue through the boundary
            if u == self.num_detectors && u != src {
                continue;
            }
            for &(v, w, o) in &self.adjacency[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    obs[v] = obs[u] ^ o;
                    heap.push(Visit(nd, v));
                }
            }
        }
        (dist, obs)
    }
}

/// Greedy matching of fired detectors.
///
/// Every fired detector starts matched to the boundary. Pairs are then taken
/// in order of how much they save over two boundary matches, while the saving
/// is positive; a detector with no boundary path must be paired.
pub fn greedy_match(events: &[bool], graph: &DetectorGraph) -> Result<Vec<bool>> {
    let fired: Vec<usize> = events.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
    let boundary = graph.num_detectors;
    let paths: Vec<(Vec<f64>, Vec<u64>)> = fired.iter().map(|&d| graph.dijkstra(d)).collect();
    let mut candidates = Vec::new();
    for (i, (dist, obs)) in paths.iter().enumerate() {
        for (j, &d) in fired.iter().enumerate().skip(i + 1) {
            if !dist[d].is_finite() {
                continue;
            }
            let alone = dist[boundary] + paths[j].0[boundary];
            let saving = if alone.is_finite() { alone - dist[d] } else { f64::INFINITY };
            if saving > 0.0 {
                candidates.push((saving, dist[d], i, j, obs[d]));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.total_cmp(&b.1))
            .then((a.2, a.3).cmp(&(b.2, b.3)))
    });
    let mut matched = vec![false; fired.len()];
    let mut correction = 0u64;
    for (_, _, i, j, o) in candidates {
        if matched[i] || matched[j] {
            continue;
        }
        matched[i] = true;
        matched[j] = true;
        correction ^= o;
    }
    for (i, (dist, obs)) in paths.iter().enumerate() {
        if matched[i] {
            continue;
        }
        if !dist[boundary].is_finite() {
            return Err(Error::UnmatchedParity);
        }
        correction ^= obs[boundary];
    }
    Ok(mask_to_bits(correction, graph.num_observables))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Lookup,
    Greedy,
    None,
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lookup" => Ok(Self::Lookup),
            "greedy" => Ok(Self::Greedy),
            "none" => Ok(Self::None),
            _ => Err(Error::UnknownOption(format!(
                "unknown decoder '{s}', expected one of: lookup, greedy, none"
            ))),
        }
    }
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lookup => "lookup",
            Self::Greedy => "greedy",
            Self::None => "none",
        }
    }
}

/// What a lookup decoder does with a signature it has not seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Greedy,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub flips: Vec<bool>,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoder {
    kind: DecoderKind,
    fallback: Fallback,
    num_observables: usize,
    dictionary: Option<FaultDictionary>,
    graph: Option<DetectorGraph>,
}

impl Decoder {
    pub fn new(c: &Circuit, kind: DecoderKind, fallback: Fallback) -> Result<Self> {
        let model = DetectorModel::from_circuit(c);
        Self::from_model(&model, kind, fallback)
    }

    pub fn from_model(model: &DetectorModel, kind: DecoderKind, fallback: Fallback) -> Result<Self> {
        if model.num_observables > 64 {
            return Err(Error::InvalidCircuit("at most 64 observables are supported".into()));
        }
        let dictionary = match kind {
            DecoderKind::Lookup => Some(FaultDictionary::build(model, 2)?),
            _ => None,
        };
        let graph = match (kind, fallback) {
            (DecoderKind::Greedy, _) | (DecoderKind::Lookup, Fallback::Greedy) => Some(DetectorGraph::from_model(model)),
            _ => None,
        };
        Ok(Self {
            kind,
            fallback,
            num_observables: model.num_observables,
            dictionary,
            graph,
        })
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn dictionary(&self) -> Option<&FaultDictionary> {
        self.dictionary.as_ref()
    }

    fn zero(&self) -> Vec<bool> {
        vec![false; self.num_observables]
    }

    fn greedy_or_zero(&self, events: &[bool]) -> Vec<bool> {
        self.graph
            .as_ref()
            .and_then(|g| greedy_match(events, g).ok())
            .unwrap_or_else(|| self.zero())
    }

    pub fn decode(&self, events: &[bool]) -> Decoded {
        match self.kind {
            DecoderKind::None => Decoded {
                flips: self.zero(),
                fallback: false,
            },
            DecoderKind::Greedy => Decoded {
                flips: self.greedy_or_zero(events),
                fallback: false,
            },
            DecoderKind::Lookup => match self.dictionary.as_ref().and_then(|d| d.lookup(events)) {
                Some(e) => Decoded {
                    flips: mask_to_bits(e.observables, self.num_observables),
                    fallback: false,
                },
                None => Decoded {
                    flips: match self.fallback {
                        Fallback::Greedy => self.greedy_or_zero(events),
                        Fallback::Zero => self.zero(),
                    },
                    fallback: true,
                },
            },
        }
    }
}

/// Dictionary lookup with zero correction on a miss.
pub fn decode(dict: &FaultDictionary, events: &[bool]) -> Vec<bool> {
    dict.lookup(events)
        .map(|e| mask_to_bits(e.observables, dict.num_observables))
        .unwrap_or_else(|| vec![false; dict.num_observables])
}
