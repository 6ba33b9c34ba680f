//! Gate and circuit representation, macro expansion and greedy depth scheduling.
//!
//! Qubit 0 is the most significant bit of a computational basis index.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pauli::Phase;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("gate {gate} repeats qubit {qubit}")]
    RepeatedQubit { gate: String, qubit: usize },
    #[error("fanout controlled on {control} has no targets")]
    EmptyFanout { control: usize },
    #[error("macro gate {0} present in a primitive-only depth query")]
    MacroPresent(String),
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("gate {0} does not map basis states to basis states")]
    NotMonomial(String),
    #[error("basis state has {got} bits, circuit has {expected} qubits")]
    BitLength { got: usize, expected: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type CircuitResult<T> = Result<T, CircuitError>;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Cz(usize, usize),
    /// (control, target)
    Cnot(usize, usize),
    Swap(usize, usize),
    S(usize),
    Sdg(usize),
    H(usize),
    X(usize),
    Z(usize),
    /// CZ from `control` to every target.
    CzFanout { control: usize, targets: Vec<usize> },
    /// Position i of the list ends up holding the XOR of positions 0..=i.
    ParityTransform(Vec<usize>),
    ParityTransformInv(Vec<usize>),
    /// Opaque non-Clifford two-mode rotation, `exp(-i angle H_label)`.
    TwoModeRotation {
        a: usize,
        b: usize,
        label: String,
        angle: f64,
    },
}

/// Iterator over the qubits a gate touches.
pub struct Qubits<'a> {
    head: [usize; 2],
    head_len: usize,
    pos: usize,
    tail: std::slice::Iter<'a, usize>,
}

impl Iterator for Qubits<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.pos < self.head_len {
            self.pos += 1;
            return Some(self.head[self.pos - 1]);
        }
        self.tail.next().copied()
    }
}

impl Gate {
    pub fn qubits(&self) -> Qubits<'_> {
        let (head, head_len, tail): ([usize; 2], usize, &[usize]) = match self {
            Gate::Cz(a, b) | Gate::Cnot(a, b) | Gate::Swap(a, b) => ([*a, *b], 2, &[]),
            Gate::TwoModeRotation { a, b, .. } => ([*a, *b], 2, &[]),
            Gate::S(q) | Gate::Sdg(q) | Gate::H(q) | Gate::X(q) | Gate::Z(q) => ([*q, 0], 1, &[]),
            Gate::CzFanout { control, targets } => ([*control, 0], 1, targets),
            Gate::ParityTransform(qs) | Gate::ParityTransformInv(qs) => ([0, 0], 0, qs),
        };
        Qubits {
            head,
            head_len,
            pos: 0,
            tail: tail.iter(),
        }
    }

    pub fn is_macro(&self) -> bool {
        matches!(
            self,
            Gate::CzFanout { .. } | Gate::ParityTransform(_) | Gate::ParityTransformInv(_)
        )
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::TwoModeRotation { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Cz(..) => "CZ",
            Gate::Cnot(..) => "CNOT",
            Gate::Swap(..) => "SWAP",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::CzFanout { .. } => "CZFANOUT",
            Gate::ParityTransform(_) => "PARITY",
            Gate::ParityTransformInv(_) => "PARITYINV",
            Gate::TwoModeRotation { .. } => "ROT2",
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::ParityTransform(qs) => Gate::ParityTransformInv(qs.clone()),
            Gate::ParityTransformInv(qs) => Gate::ParityTransform(qs.clone()),
            Gate::TwoModeRotation { a, b, label, angle } => Gate::TwoModeRotation {
                a: *a,
                b: *b,
                label: label.clone(),
                angle: -angle,
            },
            other => other.clone(),
        }
    }

    /// Relabels every qubit through `map`.
    pub fn map_qubits(&self, map: impl Fn(usize) -> usize) -> Gate {
        let list = |qs: &[usize]| qs.iter().map(|&q| map(q)).collect::<Vec<_>>();
        match self {
            Gate::Cz(a, b) => Gate::Cz(map(*a), map(*b)),
            Gate::Cnot(a, b) => Gate::Cnot(map(*a), map(*b)),
            Gate::Swap(a, b) => Gate::Swap(map(*a), map(*b)),
            Gate::S(q) => Gate::S(map(*q)),
            Gate::Sdg(q) => Gate::Sdg(map(*q)),
            Gate::H(q) => Gate::H(map(*q)),
            Gate::X(q) => Gate::X(map(*q)),
            Gate::Z(q) => Gate::Z(map(*q)),
            Gate::CzFanout { control, targets } => Gate::CzFanout {
                control: map(*control),
                targets: list(targets),
            },
            Gate::ParityTransform(qs) => Gate::ParityTransform(list(qs)),
            Gate::ParityTransformInv(qs) => Gate::ParityTransformInv(list(qs)),
            Gate::TwoModeRotation { a, b, label, angle } => Gate::TwoModeRotation {
                a: map(*a),
                b: map(*b),
                label: label.clone(),
                angle: *angle,
            },
        }
    }

    pub fn validate(&self, num_qubits: usize) -> CircuitResult<()> {
        if let Gate::CzFanout { control, targets } = self {
            if targets.is_empty() {
                return Err(CircuitError::EmptyFanout { control: *control });
            }
        }
        let mut seen: Vec<usize> = Vec::new();
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange { qubit: q, num_qubits });
            }
            seen.push(q);
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(CircuitError::RepeatedQubit {
                gate: self.to_string(),
                qubit: w[0],
            });
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |qs: &[usize]| {
            qs.iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            Gate::Cz(a, b) | Gate::Cnot(a, b) | Gate::Swap(a, b) => {
                write!(f, "{} {} {}", self.name(), a, b)
            }
            Gate::S(q) | Gate::Sdg(q) | Gate::H(q) | Gate::X(q) | Gate::Z(q) => {
                write!(f, "{} {}", self.name(), q)
            }
            Gate::CzFanout { control, targets } => {
                write!(f, "CZFANOUT {} : {}", control, join(targets))
            }
            Gate::ParityTransform(qs) | Gate::ParityTransformInv(qs) => {
                write!(f, "{} : {}", self.name(), join(qs))
            }
            Gate::TwoModeRotation { a, b, label, angle } => {
                write!(f, "ROT2 {} {} {} {}", a, b, label, angle)
            }
        }
    }
}

/// CNOT list (control, target) of the in-place prefix-XOR network over `qubits`.
///
/// Up-sweep then down-sweep of a Brent-Kung scan; every round is a layer of
/// disjoint CNOTs, so the depth is at most `2 ceil(log2 k) - 1`.
pub fn parity_network(qubits: &[usize]) -> Vec<(usize, usize)> {
    let n = qubits.len();
    let mut out = Vec::new();
    let mut d = 1;
    while d < n {
        let mut i = 2 * d - 1;
        while i < n {
            out.push((qubits[i - d], qubits[i]));
            i += 2 * d;
        }
        d *= 2;
    }
    d /= 4;
    while d >= 1 {
        let mut i = 3 * d - 1;
        while i < n {
            out.push((qubits[i - d], qubits[i]));
            i += 2 * d;
        }
        d /= 2;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> CircuitResult<Self> {
        for g in &gates {
            g.validate(num_qubits)?;
        }
        Ok(Circuit { num_qubits, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn try_push(&mut self, gate: Gate) -> CircuitResult<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a gate produced by a synthesis routine.
    ///
    /// # Panics
    /// If the gate is invalid for this circuit; synthesizers only emit valid gates.
    pub fn push(&mut self, gate: Gate) {
        if let Err(e) = gate.validate(self.num_qubits) {
            panic!("internal synthesis error: {e}");
        }
        self.gates.push(gate);
    }

    /// Appends `other` after `self`.
    pub fn append(&mut self, other: &Circuit) -> CircuitResult<()> {
        if other.num_qubits != self.num_qubits {
            return Err(CircuitError::SizeMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// `a` followed by `b`.
    pub fn compose(a: &Circuit, b: &Circuit) -> CircuitResult<Circuit> {
        let mut out = a.clone();
        out.append(b)?;
        Ok(out)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Per-gate layer index (1-based) under greedy earliest-possible scheduling.
    pub fn schedule(&self) -> Vec<usize> {
        let mut last = vec![0usize; self.num_qubits];
        self.gates
            .iter()
            .map(|g| {
                let layer = g.qubits().map(|q| last[q]).max().unwrap_or(0) + 1;
                for q in g.qubits() {
                    last[q] = layer;
                }
                layer
            })
            .collect()
    }

    pub fn depth(&self, primitive_only: bool) -> CircuitResult<usize> {
        if primitive_only {
            if let Some(g) = self.gates.iter().find(|g| g.is_macro()) {
                return Err(CircuitError::MacroPresent(g.to_string()));
            }
        }
        Ok(self.schedule().into_iter().max().unwrap_or(0))
    }

    /// Number of scheduled layers that contain at least one gate matching `pred`.
    pub fn layers_containing(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        let mut layers: Vec<usize> = self
            .schedule()
            .into_iter()
            .zip(&self.gates)
            .filter(|(_, g)| pred(g))
            .map(|(l, _)| l)
            .collect();
        layers.sort_unstable();
        layers.dedup();
        layers.len()
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    /// Rewrites every macro gate into primitive gates with the same unitary.
    pub fn expand_macros(&self) -> Circuit {
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match g {
                Gate::ParityTransform(qs) => {
                    out.extend(parity_network(qs).into_iter().map(|(c, t)| Gate::Cnot(c, t)))
                }
                Gate::ParityTransformInv(qs) => out.extend(
                    parity_network(qs)
                        .into_iter()
                        .rev()
                        .map(|(c, t)| Gate::Cnot(c, t)),
                ),
                Gate::CzFanout { control, targets } => {
                    let net = parity_network(targets);
                    out.extend(net.iter().map(|&(c, t)| Gate::Cnot(c, t)));
                    out.push(Gate::Cz(*control, *targets.last().unwrap()));
                    out.extend(net.iter().rev().map(|&(c, t)| Gate::Cnot(c, t)));
                }
                other => out.push(other.clone()),
            }
        }
        Circuit {
            num_qubits: self.num_qubits,
            gates: out,
        }
    }

    /// Replaces each CZ with `Sdg a, Sdg b, CNOT(a,b), S b, CNOT(a,b)`.
    pub fn lower_cz(&self) -> Circuit {
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match g {
                Gate::Cz(a, b) => out.extend([
                    Gate::Sdg(*a),
                    Gate::Sdg(*b),
                    Gate::Cnot(*a, *b),
                    Gate::S(*b),
                    Gate::Cnot(*a, *b),
                ]),
                other => out.push(other.clone()),
            }
        }
        Circuit {
            num_qubits: self.num_qubits,
            gates: out,
        }
    }

    /// Applies the circuit to a computational basis state in place and returns
    /// the accumulated phase. Only gates that map basis states to basis states
    /// are accepted; macros act through their defining products.
    pub fn apply_to_basis(&self, bits: &mut [bool]) -> CircuitResult<Phase> {
        if bits.len() != self.num_qubits {
            return Err(CircuitError::BitLength {
                got: bits.len(),
                expected: self.num_qubits,
            });
        }
        let mut phase = Phase::ONE;
        for g in &self.gates {
            match g {
                Gate::Cz(a, b) => {
                    if bits[*a] && bits[*b] {
                        phase = phase * Phase::MINUS_ONE;
                    }
                }
                Gate::Cnot(c, t) => bits[*t] ^= bits[*c],
                Gate::Swap(a, b) => bits.swap(*a, *b),
                Gate::S(q) => {
                    if bits[*q] {
                        phase = phase * Phase::I;
                    }
                }
                Gate::Sdg(q) => {
                    if bits[*q] {
                        phase = phase * Phase::MINUS_I;
                    }
                }
                Gate::X(q) => bits[*q] ^= true,
                Gate::Z(q) => {
                    if bits[*q] {
                        phase = phase * Phase::MINUS_ONE;
                    }
                }
                Gate::CzFanout { control, targets } => {
                    if bits[*control] && targets.iter().filter(|&&t| bits[t]).count() % 2 == 1 {
                        phase = phase * Phase::MINUS_ONE;
                    }
                }
                Gate::ParityTransform(qs) => {
                    for w in qs.windows(2) {
                        bits[w[1]] ^= bits[w[0]];
                    }
                }
                Gate::ParityTransformInv(qs) => {
                    for w in qs.windows(2).rev() {
                        bits[w[1]] ^= bits[w[0]];
                    }
                }
                Gate::H(_) | Gate::TwoModeRotation { .. } => {
                    return Err(CircuitError::NotMonomial(g.to_string()))
                }
            }
        }
        Ok(phase)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.num_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_gate(line_no: usize, text: &str) -> CircuitResult<Gate> {
    let (head, list) = match text.split_once(':') {
        Some((h, l)) => (h, Some(l)),
        None => (text, None),
    };
    let mut words = head.split_whitespace();
    let op = words.next().unwrap_or_default().to_ascii_uppercase();
    let args: Vec<&str> = words.collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(line_no, format!("bad qubit index {s:?}")))
    };
    let qubit_list = || -> CircuitResult<Vec<usize>> {
        let list = list.ok_or_else(|| parse_err(line_no, format!("{op} needs ': <qubits>'")))?;
        list.split_whitespace().map(num).collect()
    };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(parse_err(
                line_no,
                format!("{op} takes {n} arguments, got {}", args.len()),
            ))
        }
    };
    if list.is_some() && !matches!(op.as_str(), "CZFANOUT" | "PARITY" | "PARITYINV") {
        return Err(parse_err(line_no, format!("unexpected ':' after {op}")));
    }
    let gate = match op.as_str() {
        "CZ" | "CNOT" | "SWAP" => {
            arity(2)?;
            let (a, b) = (num(args[0])?, num(args[1])?);
            match op.as_str() {
                "CZ" => Gate::Cz(a, b),
                "CNOT" => Gate::Cnot(a, b),
                _ => Gate::Swap(a, b),
            }
        }
        "S" | "SDG" | "H" | "X" | "Z" => {
            arity(1)?;
            let q = num(args[0])?;
            match op.as_str() {
                "S" => Gate::S(q),
                "SDG" => Gate::Sdg(q),
                "H" => Gate::H(q),
                "X" => Gate::X(q),
                _ => Gate::Z(q),
            }
        }
        "CZFANOUT" => {
            arity(1)?;
            Gate::CzFanout {
                control: num(args[0])?,
                targets: qubit_list()?,
            }
        }
        "PARITY" => {
            arity(0)?;
            Gate::ParityTransform(qubit_list()?)
        }
        "PARITYINV" => {
            arity(0)?;
            Gate::ParityTransformInv(qubit_list()?)
        }
        "ROT2" => {
            arity(4)?;
            let angle = args[3]
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("bad angle {:?}", args[3])))?;
            Gate::TwoModeRotation {
                a: num(args[0])?,
                b: num(args[1])?,
                label: args[2].to_string(),
                angle,
            }
        }
        _ => return Err(parse_err(line_no, format!("unknown gate {op:?}"))),
    };
    Ok(gate)
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(s: &str) -> CircuitResult<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let text = raw.split('#').next().unwrap_or_default().trim();
            if text.is_empty() {
                continue;
            }
            match circuit.as_mut() {
                None => {
                    let mut words = text.split_whitespace();
                    let n = match (words.next(), words.next(), words.next()) {
                        (Some(h), Some(n), None) if h.eq_ignore_ascii_case("QUBITS") => n
                            .parse::<usize>()
                            .map_err(|_| parse_err(line_no, "bad qubit count"))?,
                        _ => return Err(parse_err(line_no, "expected 'QUBITS N' header")),
                    };
                    circuit = Some(Circuit::new(n));
                }
                Some(c) => {
                    let gate = parse_gate(line_no, text)?;
                    c.try_push(gate).map_err(|e| parse_err(line_no, e.to_string()))?;
                }
            }
        }
        circuit.ok_or_else(|| parse_err(0, "missing 'QUBITS N' header"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prefix_xor(x: &[bool]) -> Vec<bool> {
        let mut acc = false;
        x.iter()
            .map(|&b| {
                acc ^= b;
                acc
            })
            .collect()
    }

    fn run_cnots(net: &[(usize, usize)], bits: &mut [bool]) {
        for &(c, t) in net {
            bits[t] ^= bits[c];
        }
    }

    #[test]
    fn empty_depth_is_zero() {
        assert_eq!(Circuit::new(3).depth(true).unwrap(), 0);
    }

    #[test]
    fn greedy_depth_example() {
        let c = Circuit::from_gates(
            4,
            vec![Gate::Cnot(0, 1), Gate::Cnot(2, 3), Gate::Cnot(1, 2)],
        )
        .unwrap();
        assert_eq!(c.depth(true).unwrap(), 2);
    }

    #[test]
    fn macro_rejected_in_primitive_depth() {
        let c = Circuit::from_gates(3, vec![Gate::ParityTransform(vec![0, 1, 2])]).unwrap();
        assert!(matches!(c.depth(true), Err(CircuitError::MacroPresent(_))));
        assert_eq!(c.depth(false).unwrap(), 1);
    }

    #[test]
    fn parity_depth_on_eight_qubits() {
        let qs: Vec<usize> = (0..8).collect();
        let c = Circuit::from_gates(8, vec![Gate::ParityTransform(qs)]).unwrap();
        // up-sweep 3 rounds, down-sweep 2 rounds
        assert_eq!(c.expand_macros().depth(true).unwrap(), 5);
    }

    #[test]
    fn parity_network_exhaustive_small() {
        for k in 0..=10usize {
            let qs: Vec<usize> = (0..k).collect();
            let net = parity_network(&qs);
            for x in 0..(1u32 << k) {
                let bits: Vec<bool> = (0..k).map(|i| x >> i & 1 == 1).collect();
                let mut y = bits.clone();
                run_cnots(&net, &mut y);
                assert_eq!(y, prefix_xor(&bits), "k={k} x={x}");
                let inv: Vec<_> = net.iter().rev().copied().collect();
                run_cnots(&inv, &mut y);
                assert_eq!(y, bits);
            }
        }
    }

    #[test]
    fn parity_two_qubits() {
        let net = parity_network(&[0, 1]);
        assert_eq!(net, vec![(0, 1)]);
    }

    #[test]
    fn single_target_fanout_is_cz() {
        let c = Circuit::from_gates(
            2,
            vec![Gate::CzFanout {
                control: 0,
                targets: vec![1],
            }],
        )
        .unwrap();
        assert_eq!(c.expand_macros().gates(), &[Gate::Cz(0, 1)]);
    }

    #[test]
    fn fanout_depth_is_logarithmic() {
        // measured: depth = 4 ceil(log2 k) - 1 for k >= 2
        for e in 1..=12u32 {
            let k = 1usize << e;
            let c = Circuit::from_gates(
                k + 1,
                vec![Gate::CzFanout {
                    control: 0,
                    targets: (1..=k).collect(),
                }],
            )
            .unwrap();
            let d = c.expand_macros().depth(true).unwrap();
            assert!(d <= 4 * e as usize + 1, "k={k} depth={d}");
        }
    }

    #[test]
    fn inverse_examples() {
        assert!(Circuit::new(2).inverse().is_empty());
        let c = Circuit::from_gates(1, vec![Gate::S(0)]).unwrap();
        assert_eq!(c.inverse().gates(), &[Gate::Sdg(0)]);
    }

    #[test]
    fn compose_checks_sizes() {
        assert!(matches!(
            Circuit::compose(&Circuit::new(2), &Circuit::new(3)),
            Err(CircuitError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn gate_validation() {
        assert!(matches!(
            Gate::Cnot(1, 1).validate(3),
            Err(CircuitError::RepeatedQubit { .. })
        ));
        assert!(matches!(
            Gate::X(3).validate(3),
            Err(CircuitError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            Gate::CzFanout {
                control: 0,
                targets: vec![]
            }
            .validate(3),
            Err(CircuitError::EmptyFanout { .. })
        ));
        assert!(Gate::CzFanout {
            control: 0,
            targets: vec![1, 0]
        }
        .validate(3)
        .is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "QUBITS 8\n# comment\nCNOT 3 7\nCZFANOUT 0 : 2 5 6\nPARITY : 1 2 3\nPARITYINV : 3 2\nROT2 4 5 hop 0.125\nSDG 1 # trailing\n";
        let c: Circuit = text.parse().unwrap();
        assert_eq!(c.len(), 6);
        let again: Circuit = c.to_string().parse().unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let err = "QUBITS 2\nCNOT 0 5\n".parse::<Circuit>().unwrap_err();
        assert!(matches!(err, CircuitError::Parse { line: 2, .. }));
        let err = "CNOT 0 1\n".parse::<Circuit>().unwrap_err();
        assert!(matches!(err, CircuitError::Parse { line: 1, .. }));
        assert!("QUBITS 2\nFOO 1\n".parse::<Circuit>().is_err());
    }

    #[test]
    fn lower_cz_basis_action() {
        let c = Circuit::from_gates(2, vec![Gate::Cz(0, 1)]).unwrap();
        let lowered = c.lower_cz();
        for x in 0..4 {
            let mut a = vec![x & 2 != 0, x & 1 != 0];
            let mut b = a.clone();
            let pa = c.apply_to_basis(&mut a).unwrap();
            let pb = lowered.apply_to_basis(&mut b).unwrap();
            assert_eq!((a, pa), (b, pb));
        }
    }

    proptest! {
        #[test]
        fn parity_prefix_xor_large(k in 1usize..=1024, seed in any::<u64>()) {
            let qs: Vec<usize> = (0..k).collect();
            let c = Circuit::from_gates(k, vec![Gate::ParityTransform(qs)]).unwrap().expand_macros();
            let mut state = seed;
            let bits: Vec<bool> = (0..k).map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                state >> 63 == 1
            }).collect();
            let mut y = bits.clone();
            c.apply_to_basis(&mut y).unwrap();
            prop_assert_eq!(y, prefix_xor(&bits));
        }

        #[test]
        fn schedule_respects_qubit_order(pairs in proptest::collection::vec((0usize..6, 0usize..6), 0..40)) {
            let gates: Vec<Gate> = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| Gate::Cnot(a, b)).collect();
            let c = Circuit::from_gates(6, gates).unwrap();
            let sched = c.schedule();
            for i in 0..c.len() {
                for j in 0..i {
                    let share = c.gates()[i].qubits().any(|q| c.gates()[j].qubits().any(|p| p == q));
                    if share {
                        prop_assert!(sched[j] < sched[i]);
                    }
                }
            }
        }
    }
}
