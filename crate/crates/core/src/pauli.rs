//! Pauli strings with exact phases and their conjugation through Clifford gates.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("gate {0} is not Clifford")]
    NonClifford(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("qubit {qubit} out of range for a {len}-qubit string")]
    QubitOutOfRange { qubit: usize, len: usize },
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
}

pub type PauliResult<T> = Result<T, PauliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Single-qubit product `self * rhs` as (phase, letter).
    pub fn product(self, rhs: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        let letter = Pauli::from_bits(self.x() ^ rhs.x(), self.z() ^ rhs.z());
        let phase = match (self, rhs) {
            (X, Y) | (Y, Z) | (Z, X) => Phase::I,
            (Y, X) | (Z, Y) | (X, Z) => Phase::MINUS_I,
            _ => Phase::ONE,
        };
        (phase, letter)
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A power of i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Phase {
        Phase(k % 4)
    }

    /// Exponent k in i^k.
    pub fn power(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            phase: Phase::ONE,
            letters: vec![Pauli::I; n],
        }
    }

    pub fn new(phase: Phase, letters: Vec<Pauli>) -> Self {
        PauliString { phase, letters }
    }

    /// A single letter on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Self {
        let mut p = PauliString::identity(n);
        p.letters[qubit] = letter;
        p
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn set_letter(&mut self, q: usize, letter: Pauli) {
        self.letters[q] = letter;
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&l| l != Pauli::I).count()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    /// Letters equal, phase ignored.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.letters == other.letters
    }

    pub fn try_mul(&self, rhs: &PauliString) -> PauliResult<PauliString> {
        if self.len() != rhs.len() {
            return Err(PauliError::LengthMismatch {
                left: self.len(),
                right: rhs.len(),
            });
        }
        let mut phase = self.phase * rhs.phase;
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (p, l) = a.product(b);
                phase = phase * p;
                l
            })
            .collect();
        Ok(PauliString { phase, letters })
    }

    /// `g p g†` for a Clifford gate `g`.
    pub fn conjugate(&self, gate: &Gate) -> PauliResult<PauliString> {
        let mut p = self.clone();
        p.conjugate_in_place(gate)?;
        Ok(p)
    }

    pub fn conjugate_in_place(&mut self, gate: &Gate) -> PauliResult<()> {
        if !gate.is_clifford() {
            return Err(PauliError::NonClifford(gate.to_string()));
        }
        if let Some(q) = gate.qubits().find(|&q| q >= self.len()) {
            return Err(PauliError::QubitOutOfRange {
                qubit: q,
                len: self.len(),
            });
        }
        let mut flip = false;
        {
            let mut cell = LetterCell {
                letters: &mut self.letters,
                flip: &mut flip,
            };
            apply_gate(&mut cell, gate);
        }
        if flip {
            self.phase = self.phase * Phase::MINUS_ONE;
        }
        Ok(())
    }

    /// Conjugates by every gate of `c` in order, i.e. returns `C p C†`.
    pub fn conjugate_through(&self, c: &Circuit) -> PauliResult<PauliString> {
        if c.num_qubits() != self.len() {
            return Err(PauliError::LengthMismatch {
                left: self.len(),
                right: c.num_qubits(),
            });
        }
        let mut p = self.clone();
        for g in c.gates() {
            p.conjugate_in_place(g)?;
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for l in &self.letters {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> PauliResult<PauliString> {
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::ONE, r)
        } else {
            (Phase::ONE, t)
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(PauliError::Parse(s.to_string())),
            })
            .collect::<PauliResult<Vec<_>>>()?;
        Ok(PauliString { phase, letters })
    }
}

/// Per-qubit (x, z) access plus a sign accumulator, so one rule table serves
/// both single strings and bit-sliced batches.
trait Tableau {
    type Word: Copy
        + std::ops::BitXor<Output = Self::Word>
        + std::ops::BitAnd<Output = Self::Word>
        + std::ops::Not<Output = Self::Word>;
    fn get(&self, q: usize) -> (Self::Word, Self::Word);
    fn set(&mut self, q: usize, x: Self::Word, z: Self::Word);
    fn flip(&mut self, mask: Self::Word);
}

struct LetterCell<'a> {
    letters: &'a mut [Pauli],
    flip: &'a mut bool,
}

impl Tableau for LetterCell<'_> {
    type Word = bool;

    fn get(&self, q: usize) -> (bool, bool) {
        (self.letters[q].x(), self.letters[q].z())
    }

    fn set(&mut self, q: usize, x: bool, z: bool) {
        self.letters[q] = Pauli::from_bits(x, z);
    }

    fn flip(&mut self, mask: bool) {
        *self.flip ^= mask;
    }
}

fn cnot<T: Tableau>(t: &mut T, a: usize, b: usize) {
    let (xa, za) = t.get(a);
    let (xb, zb) = t.get(b);
    t.flip(xa & zb & !(xb ^ za));
    t.set(b, xb ^ xa, zb);
    t.set(a, xa, za ^ zb);
}

fn cz<T: Tableau>(t: &mut T, a: usize, b: usize) {
    let (xa, za) = t.get(a);
    let (xb, zb) = t.get(b);
    t.flip(xa & xb & (za ^ zb));
    t.set(a, xa, za ^ xb);
    t.set(b, xb, zb ^ xa);
}

fn apply_gate<T: Tableau>(t: &mut T, gate: &Gate) {
    match gate {
        Gate::Cnot(a, b) => cnot(t, *a, *b),
        Gate::Cz(a, b) => cz(t, *a, *b),
        Gate::Swap(a, b) => {
            let pa = t.get(*a);
            let pb = t.get(*b);
            t.set(*a, pb.0, pb.1);
            t.set(*b, pa.0, pa.1);
        }
        Gate::H(q) => {
            let (x, z) = t.get(*q);
            t.flip(x & z);
            t.set(*q, z, x);
        }
        Gate::S(q) => {
            let (x, z) = t.get(*q);
            t.flip(x & z);
            t.set(*q, x, z ^ x);
        }
        Gate::Sdg(q) => {
            let (x, z) = t.get(*q);
            t.flip(x & !z);
            t.set(*q, x, z ^ x);
        }
        Gate::X(q) => {
            let (_, z) = t.get(*q);
            t.flip(z);
        }
        Gate::Z(q) => {
            let (x, _) = t.get(*q);
            t.flip(x);
        }
        Gate::CzFanout { control, targets } => {
            for &tq in targets {
                cz(t, *control, tq);
            }
        }
        Gate::ParityTransform(qs) => {
            for w in qs.windows(2) {
                cnot(t, w[0], w[1]);
            }
        }
        Gate::ParityTransformInv(qs) => {
            for w in qs.windows(2).rev() {
                cnot(t, w[0], w[1]);
            }
        }
        Gate::TwoModeRotation { .. } => unreachable!("rejected before dispatch"),
    }
}

/// Many Pauli strings on the same qubits, stored bit-sliced: word `w` of qubit
/// `q` holds the x (or z) bits of strings `64w..64w+63`.
#[derive(Debug, Clone)]
pub struct PauliBatch {
    num_qubits: usize,
    len: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Vec<u64>,
    base: Vec<Phase>,
}

struct BatchWord<'a> {
    batch: &'a mut PauliBatch,
    w: usize,
}

impl Tableau for BatchWord<'_> {
    type Word = u64;

    fn get(&self, q: usize) -> (u64, u64) {
        let i = q * self.batch.words + self.w;
        (self.batch.x[i], self.batch.z[i])
    }

    fn set(&mut self, q: usize, x: u64, z: u64) {
        let i = q * self.batch.words + self.w;
        self.batch.x[i] = x;
        self.batch.z[i] = z;
    }

    fn flip(&mut self, mask: u64) {
        self.batch.sign[self.w] ^= mask;
    }
}

impl PauliBatch {
    pub fn new(num_qubits: usize, strings: &[PauliString]) -> PauliResult<Self> {
        let len = strings.len();
        let words = len.div_ceil(64).max(1);
        let mut b = PauliBatch {
            num_qubits,
            len,
            words,
            x: vec![0; num_qubits * words],
            z: vec![0; num_qubits * words],
            sign: vec![0; words],
            base: strings.iter().map(|s| s.phase).collect(),
        };
        for (s, p) in strings.iter().enumerate() {
            if p.len() != num_qubits {
                return Err(PauliError::LengthMismatch {
                    left: num_qubits,
                    right: p.len(),
                });
            }
            let (w, bit) = (s / 64, 1u64 << (s % 64));
            for (q, l) in p.letters.iter().enumerate() {
                if l.x() {
                    b.x[q * words + w] |= bit;
                }
                if l.z() {
                    b.z[q * words + w] |= bit;
                }
            }
        }
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn conjugate(&mut self, gate: &Gate) -> PauliResult<()> {
        if !gate.is_clifford() {
            return Err(PauliError::NonClifford(gate.to_string()));
        }
        if let Some(q) = gate.qubits().find(|&q| q >= self.num_qubits) {
            return Err(PauliError::QubitOutOfRange {
                qubit: q,
                len: self.num_qubits,
            });
        }
        for w in 0..self.words {
            apply_gate(&mut BatchWord { batch: self, w }, gate);
        }
        Ok(())
    }

    pub fn conjugate_through(&mut self, c: &Circuit) -> PauliResult<()> {
        if c.num_qubits() != self.num_qubits {
            return Err(PauliError::LengthMismatch {
                left: self.num_qubits,
                right: c.num_qubits(),
            });
        }
        for g in c.gates() {
            self.conjugate(g)?;
        }
        Ok(())
    }

    pub fn get(&self, s: usize) -> PauliString {
        let (w, bit) = (s / 64, 1u64 << (s % 64));
        let letters = (0..self.num_qubits)
            .map(|q| {
                let i = q * self.words + w;
                Pauli::from_bits(self.x[i] & bit != 0, self.z[i] & bit != 0)
            })
            .collect();
        let mut phase = self.base[s];
        if self.sign[w] & bit != 0 {
            phase = phase * Phase::MINUS_ONE;
        }
        PauliString { phase, letters }
    }

    pub fn to_strings(&self) -> Vec<PauliString> {
        (0..self.len).map(|s| self.get(s)).collect()
    }
}

/// The two Majorana components of one encoded mode:
/// `a_k = (plus_part + i minus_part) / 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeOperator {
    pub plus_part: PauliString,
    pub minus_part: PauliString,
}

impl ModeOperator {
    /// Jordan-Wigner image of mode `k` among `n`: `Z...Z X_k` and `Z...Z Y_k`.
    pub fn jordan_wigner(k: usize, n: usize) -> Self {
        let mut plus = PauliString::identity(n);
        for q in 0..k {
            plus.letters[q] = Pauli::Z;
        }
        let mut minus = plus.clone();
        plus.letters[k] = Pauli::X;
        minus.letters[k] = Pauli::Y;
        ModeOperator {
            plus_part: plus,
            minus_part: minus,
        }
    }

    /// Both parts Hermitian (real phase, so they square to +1) and mutually anticommuting.
    pub fn is_valid(&self) -> bool {
        self.plus_part.phase.is_real()
            && self.minus_part.phase.is_real()
            && !self.plus_part.commutes_with(&self.minus_part)
    }
}

/// All `2n` Jordan-Wigner Majorana strings, `[X-type of mode 0, Y-type of mode 0, ...]`.
pub fn jw_majoranas(n: usize) -> Vec<PauliString> {
    (0..n)
        .flat_map(|k| {
            let m = ModeOperator::jordan_wigner(k, n);
            [m.plus_part, m.minus_part]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn cnot_spreads_x() {
        assert_eq!(ps("XI").conjugate(&Gate::Cnot(0, 1)).unwrap(), ps("XX"));
        assert_eq!(ps("IZ").conjugate(&Gate::Cnot(0, 1)).unwrap(), ps("ZZ"));
    }

    #[test]
    fn cz_fixes_z() {
        assert_eq!(ps("IZ").conjugate(&Gate::Cz(0, 1)).unwrap(), ps("IZ"));
        assert_eq!(ps("XI").conjugate(&Gate::Cz(0, 1)).unwrap(), ps("XZ"));
    }

    #[test]
    fn single_qubit_rules() {
        assert_eq!(ps("X").conjugate(&Gate::H(0)).unwrap(), ps("Z"));
        assert_eq!(ps("Y").conjugate(&Gate::H(0)).unwrap(), ps("-Y"));
        assert_eq!(ps("X").conjugate(&Gate::S(0)).unwrap(), ps("Y"));
        assert_eq!(ps("Y").conjugate(&Gate::S(0)).unwrap(), ps("-X"));
        assert_eq!(ps("X").conjugate(&Gate::Sdg(0)).unwrap(), ps("-Y"));
        assert_eq!(ps("Y").conjugate(&Gate::Sdg(0)).unwrap(), ps("X"));
        assert_eq!(ps("Z").conjugate(&Gate::X(0)).unwrap(), ps("-Z"));
        assert_eq!(ps("Y").conjugate(&Gate::Z(0)).unwrap(), ps("-Y"));
        assert_eq!(ps("iY").conjugate(&Gate::Z(0)).unwrap(), ps("-iY"));
    }

    #[test]
    fn rotation_rejected() {
        let g = Gate::TwoModeRotation {
            a: 0,
            b: 1,
            label: "hop".into(),
            angle: 0.1,
        };
        assert!(matches!(
            ps("XX").conjugate(&g),
            Err(PauliError::NonClifford(_))
        ));
    }

    #[test]
    fn empty_circuit_and_hadamard() {
        let p = ps("-iXYZ");
        assert_eq!(p.conjugate_through(&Circuit::new(3)).unwrap(), p);
        let c = Circuit::from_gates(1, vec![Gate::H(0)]).unwrap();
        assert_eq!(ps("X").conjugate_through(&c).unwrap(), ps("Z"));
    }

    #[test]
    fn text_forms() {
        for s in ["XXYZI", "-XZ", "iY", "-iXYZ"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert_eq!(ps("+iZ").phase(), Phase::I);
        assert_eq!(ps("+Z").to_string(), "Z");
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn products() {
        assert_eq!(ps("X").try_mul(&ps("Y")).unwrap(), ps("iZ"));
        assert_eq!(ps("Y").try_mul(&ps("X")).unwrap(), ps("-iZ"));
        assert_eq!(ps("XZ").try_mul(&ps("ZX")).unwrap(), ps("YY"));
        assert!(ps("X").try_mul(&ps("XX")).is_err());
    }

    #[test]
    fn jw_modes_valid() {
        let n = 4;
        let ms = jw_majoranas(n);
        for i in 0..ms.len() {
            for j in 0..ms.len() {
                assert_eq!(ms[i].commutes_with(&ms[j]), i == j);
            }
        }
        assert_eq!(ModeOperator::jordan_wigner(2, 3).plus_part, ps("ZZX"));
        assert!(ModeOperator::jordan_wigner(1, 3).is_valid());
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        (0u8..4, proptest::collection::vec(0u8..4, n)).prop_map(|(ph, ls)| {
            PauliString::new(
                Phase::from_power(ph),
                ls.into_iter()
                    .map(|l| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][l as usize])
                    .collect(),
            )
        })
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        (0u8..11, 0..n, 0..n, proptest::collection::vec(0..n, 1..n)).prop_filter_map(
            "distinct",
            move |(k, a, b, list)| {
                let mut list = list;
                list.sort_unstable();
                list.dedup();
                let g = match k {
                    0 => Gate::Cnot(a, b),
                    1 => Gate::Cz(a, b),
                    2 => Gate::Swap(a, b),
                    3 => Gate::H(a),
                    4 => Gate::S(a),
                    5 => Gate::Sdg(a),
                    6 => Gate::X(a),
                    7 => Gate::Z(a),
                    8 => Gate::CzFanout {
                        control: a,
                        targets: list.into_iter().filter(|&t| t != a).collect(),
                    },
                    9 => Gate::ParityTransform(list),
                    _ => Gate::ParityTransformInv(list),
                };
                g.validate(n).ok().map(|_| g)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inverse_restores_phase(p in arb_string(32), gates in proptest::collection::vec(arb_gate(32), 0..60)) {
            let c = Circuit::from_gates(32, gates).unwrap();
            let there = p.conjugate_through(&c).unwrap();
            prop_assert_eq!(there.conjugate_through(&c.inverse()).unwrap(), p);
        }

        #[test]
        fn batch_matches_single(ps in proptest::collection::vec(arb_string(7), 1..150), gates in proptest::collection::vec(arb_gate(7), 0..40)) {
            let c = Circuit::from_gates(7, gates).unwrap();
            let mut batch = PauliBatch::new(7, &ps).unwrap();
            batch.conjugate_through(&c).unwrap();
            for (i, p) in ps.iter().enumerate() {
                prop_assert_eq!(batch.get(i), p.conjugate_through(&c).unwrap());
            }
        }

        #[test]
        fn conjugation_is_a_homomorphism(a in arb_string(5), b in arb_string(5), gates in proptest::collection::vec(arb_gate(5), 0..20)) {
            let c = Circuit::from_gates(5, gates).unwrap();
            let lhs = a.try_mul(&b).unwrap().conjugate_through(&c).unwrap();
            let rhs = a.conjugate_through(&c).unwrap().try_mul(&b.conjugate_through(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn jw_images_stay_majoranas(gates in proptest::collection::vec(arb_gate(6), 0..40)) {
            let c = Circuit::from_gates(6, gates).unwrap();
            let imgs: Vec<_> = jw_majoranas(6).iter().map(|p| p.conjugate_through(&c).unwrap()).collect();
            for i in 0..imgs.len() {
                prop_assert!(imgs[i].phase().is_real());
                for j in 0..i {
                    prop_assert!(!imgs[i].commutes_with(&imgs[j]));
                }
            }
        }
    }
}
