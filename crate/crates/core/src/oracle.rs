//! Dense small-N ground truth: fermionic operators, permutation unitaries,
//! tree encoders and statevector simulation.
//!
//! Basis index bit `N-1-q` belongs to qubit (or mode) `q`, so mode 0 is the
//! most significant bit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::pauli::{Pauli, PauliString};
use crate::routing::Permutation;
use crate::tree::TernaryTree;

pub const FERMION_MAX_MODES: usize = 12;
pub const PERMUTATION_MAX_MODES: usize = 10;
pub const ENCODER_MAX_MODES: usize = 8;
pub const SIMULATE_MAX_QUBITS: usize = 12;
pub const UNITARY_MAX_QUBITS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{what} supports at most {limit} qubits, got {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("statevector has {got} amplitudes, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("unknown rotation label {0:?}")]
    UnknownRotation(String),
    #[error("vacuum is not unique: common null space has trace {0}")]
    DegenerateVacuum(f64),
}

pub type OracleResult<T> = Result<T, OracleError>;

pub type DenseOperator = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn limit(what: &'static str, n: usize, max: usize) -> OracleResult<()> {
    if n > max {
        Err(OracleError::TooLarge { what, n, limit: max })
    } else {
        Ok(())
    }
}

fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: DVector<Complex64>,
}

impl Statevector {
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = DVector::zeros(1 << num_qubits);
        amps[index] = c(1.0, 0.0);
        Statevector { num_qubits, amps }
    }

    pub fn from_amplitudes(num_qubits: usize, amps: DVector<Complex64>) -> OracleResult<Self> {
        if amps.len() != 1 << num_qubits {
            return Err(OracleError::Dimension {
                got: amps.len(),
                expected: 1 << num_qubits,
            });
        }
        Ok(Statevector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }
}

/// `(a_k, a_k†)` for every mode, with `a_k` carrying `(-1)^(occupied modes before k)`.
pub fn fermion_ops(n: usize) -> OracleResult<Vec<(DenseOperator, DenseOperator)>> {
    limit("fermion_ops", n, FERMION_MAX_MODES)?;
    let dim = 1usize << n;
    Ok((0..n)
        .map(|k| {
            let b = bit(n, k);
            let before = (dim - 1) & !((b << 1) - 1);
            let mut a = DMatrix::zeros(dim, dim);
            for x in (0..dim).filter(|x| x & b != 0) {
                let sign = if (x & before).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                a[(x ^ b, x)] = c(sign, 0.0);
            }
            let ad = a.adjoint();
            (a, ad)
        })
        .collect())
}

/// Fermionic permutation unitary: conjugation maps `a_k` to `a_σ(k)` and the vacuum is fixed.
///
/// Column `x` is `Π_k (a†_σ(k))^(x_k) |vac⟩`, applying the rightmost factor first.
pub fn permutation_unitary(sigma: &Permutation) -> OracleResult<DenseOperator> {
    let n = sigma.len();
    limit("permutation_unitary", n, PERMUTATION_MAX_MODES)?;
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut y = 0usize;
        let mut sign = 1.0;
        for k in (0..n).rev() {
            if x & bit(n, k) == 0 {
                continue;
            }
            let t = sigma.apply(k);
            let before = (dim - 1) & !((bit(n, t) << 1) - 1);
            if (y & before).count_ones() % 2 == 1 {
                sign = -sign;
            }
            y |= bit(n, t);
        }
        u[(y, x)] = c(sign, 0.0);
    }
    Ok(u)
}

/// Fermionic swap of modes `i < j` written directly from its sign rule:
/// `(-1)^p` with `p = x_i Σ_{i<k<j} x_k + x_j Σ_{i≤k<j} x_k`.
pub fn fswap_matrix(i: usize, j: usize, n: usize) -> OracleResult<DenseOperator> {
    limit("fswap_matrix", n, PERMUTATION_MAX_MODES)?;
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let xb = |k: usize| (x & bit(n, k) != 0) as u32;
        let between: u32 = (i + 1..j).map(xb).sum();
        let p = xb(i) * between + xb(j) * (between + xb(i));
        let mut y = x & !bit(n, i) & !bit(n, j);
        if xb(i) == 1 {
            y |= bit(n, j);
        }
        if xb(j) == 1 {
            y |= bit(n, i);
        }
        u[(y, x)] = c(if p % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Ok(u)
}

/// Dense matrix of a Pauli string, phase included.
pub fn pauli_matrix(p: &PauliString) -> DenseOperator {
    let n = p.len();
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    let flip: usize = (0..n).filter(|&q| p.letter(q).x()).map(|q| bit(n, q)).sum();
    let base = p.phase().to_complex();
    for x in 0..dim {
        let mut v = base;
        for q in 0..n {
            let set = x & bit(n, q) != 0;
            v *= match (p.letter(q), set) {
                (Pauli::Z, true) => c(-1.0, 0.0),
                (Pauli::Y, false) => c(0.0, 1.0),
                (Pauli::Y, true) => c(0.0, -1.0),
                _ => c(1.0, 0.0),
            };
        }
        m[(x ^ flip, x)] = v;
    }
    m
}

/// Encoding isometry of a tree: column `x` is the image of Fock state `x`.
///
/// The vacuum spans the range of `Π_k (1 - n_k)`; its phase is fixed so its
/// first nonzero amplitude is positive real.
pub fn encoder_unitary(tree: &TernaryTree) -> OracleResult<DenseOperator> {
    let n = tree.num_qubits();
    limit("encoder_unitary", n, ENCODER_MAX_MODES)?;
    let dim = 1usize << n;
    let modes = tree.mode_operators();
    let half = c(0.5, 0.0);
    let i = c(0.0, 1.0);
    let mut creators = Vec::with_capacity(n);
    let mut projector = DMatrix::<Complex64>::identity(dim, dim);
    for m in &modes {
        let g0 = pauli_matrix(&m.plus_part);
        let g1 = pauli_matrix(&m.minus_part);
        let a = (&g0 + &g1 * i) * half;
        let ad = (&g0 - &g1 * i) * half;
        let number = &ad * &a;
        projector = &projector * (DMatrix::identity(dim, dim) - number);
        creators.push(ad);
    }
    let tr = projector.trace().re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(OracleError::DegenerateVacuum(tr));
    }
    let best = (0..dim)
        .max_by(|&a, &b| {
            projector
                .column(a)
                .norm()
                .total_cmp(&projector.column(b).norm())
        })
        .unwrap();
    let mut vac: DVector<Complex64> = projector.column(best).into_owned();
    vac /= c(vac.norm(), 0.0);
    let lead = vac.iter().find(|z| z.norm() > 1e-9).copied().unwrap();
    vac *= lead.conj() / lead.norm();
    let mut u = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut v = vac.clone();
        for k in (0..n).rev() {
            if x & bit(n, k) != 0 {
                v = &creators[k] * v;
            }
        }
        u.set_column(x, &v);
    }
    Ok(u)
}

/// Every column holds exactly one entry of unit modulus.
pub fn is_monomial(u: &DenseOperator, tol: f64) -> bool {
    u.column_iter().all(|col| {
        let big: Vec<f64> = col.iter().map(|z| z.norm()).filter(|&a| a > tol).collect();
        big.len() == 1 && (big[0] - 1.0).abs() < tol
    })
}

pub fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn apply_gate(amps: &mut [Complex64], n: usize, g: &Gate) -> OracleResult<()> {
    let dim = amps.len();
    let neg = |amps: &mut [Complex64], pred: &dyn Fn(usize) -> bool| {
        for (x, a) in amps.iter_mut().enumerate() {
            if pred(x) {
                *a = -*a;
            }
        }
    };
    match g {
        Gate::Cz(a, b) => {
            let m = bit(n, *a) | bit(n, *b);
            neg(amps, &|x| x & m == m);
        }
        Gate::Cnot(ctl, t) => {
            let (mc, mt) = (bit(n, *ctl), bit(n, *t));
            for x in 0..dim {
                if x & mc != 0 && x & mt == 0 {
                    amps.swap(x, x | mt);
                }
            }
        }
        Gate::Swap(a, b) => {
            let (ma, mb) = (bit(n, *a), bit(n, *b));
            for x in 0..dim {
                if x & ma != 0 && x & mb == 0 {
                    amps.swap(x, x ^ ma ^ mb);
                }
            }
        }
        Gate::X(q) => {
            let m = bit(n, *q);
            for x in 0..dim {
                if x & m == 0 {
                    amps.swap(x, x | m);
                }
            }
        }
        Gate::Z(q) => {
            let m = bit(n, *q);
            neg(amps, &|x| x & m != 0);
        }
        Gate::S(q) | Gate::Sdg(q) => {
            let m = bit(n, *q);
            let ph = if matches!(g, Gate::S(_)) { c(0.0, 1.0) } else { c(0.0, -1.0) };
            for (x, a) in amps.iter_mut().enumerate() {
                if x & m != 0 {
                    *a *= ph;
                }
            }
        }
        Gate::H(q) => {
            let m = bit(n, *q);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for x in 0..dim {
                if x & m == 0 {
                    let (u, v) = (amps[x], amps[x | m]);
                    amps[x] = (u + v) * r;
                    amps[x | m] = (u - v) * r;
                }
            }
        }
        Gate::CzFanout { control, targets } => {
            let mc = bit(n, *control);
            let mt: usize = targets.iter().map(|&t| bit(n, t)).sum();
            neg(amps, &|x| x & mc != 0 && (x & mt).count_ones() % 2 == 1);
        }
        Gate::ParityTransform(qs) | Gate::ParityTransformInv(qs) => {
            let inverse = matches!(g, Gate::ParityTransformInv(_));
            let old = amps.to_vec();
            for (x, a) in old.into_iter().enumerate() {
                let mut y = x;
                let mut step = |w: &[usize]| {
                    if y & bit(n, w[0]) != 0 {
                        y ^= bit(n, w[1]);
                    }
                };
                if inverse {
                    qs.windows(2).rev().for_each(&mut step);
                } else {
                    qs.windows(2).for_each(&mut step);
                }
                amps[y] = a;
            }
        }
        Gate::TwoModeRotation { a, b, label, angle } => {
            let (ma, mb) = (bit(n, *a), bit(n, *b));
            let (s, co) = angle.sin_cos();
            match label.as_str() {
                "hop" => {
                    for x in 0..dim {
                        if x & ma == 0 && x & mb == 0 {
                            let (i01, i10) = (x | mb, x | ma);
                            let (u, v) = (amps[i01], amps[i10]);
                            amps[i01] = u * co + v * c(0.0, -s);
                            amps[i10] = u * c(0.0, -s) + v * co;
                        }
                    }
                }
                "density" => {
                    let ph = c(co, -s);
                    let m = ma | mb;
                    for (x, amp) in amps.iter_mut().enumerate() {
                        if x & m == m {
                            *amp *= ph;
                        }
                    }
                }
                other => return Err(OracleError::UnknownRotation(other.to_string())),
            }
        }
    }
    Ok(())
}

pub fn simulate(circuit: &Circuit, input: &Statevector) -> OracleResult<Statevector> {
    let n = circuit.num_qubits();
    limit("simulate", n, SIMULATE_MAX_QUBITS)?;
    if input.num_qubits != n {
        return Err(OracleError::Dimension {
            got: input.amps.len(),
            expected: 1 << n,
        });
    }
    let mut amps: Vec<Complex64> = input.amps.iter().copied().collect();
    for g in circuit.gates() {
        apply_gate(&mut amps, n, g)?;
    }
    Ok(Statevector {
        num_qubits: n,
        amps: DVector::from_vec(amps),
    })
}

pub fn circuit_unitary(circuit: &Circuit) -> OracleResult<DenseOperator> {
    let n = circuit.num_qubits();
    limit("circuit_unitary", n, UNITARY_MAX_QUBITS)?;
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let out = simulate(circuit, &Statevector::basis(n, x))?;
        u.set_column(x, &out.amps);
    }
    Ok(u)
}
