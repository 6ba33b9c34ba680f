//! Symbolic and dense checks that a circuit implements a routing or an encoding transform.

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::oracle::{self, OracleError};
use crate::pauli::{jw_majoranas, PauliBatch, PauliError, PauliString, Phase};
use crate::routing::Permutation;
use crate::tree::TernaryTree;

/// Entrywise tolerance for dense comparisons.
pub const DENSE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("vacuum is not a basis state: {0}")]
    VacuumNotBasis(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub type VerifyResult<T> = Result<T, VerifyError>;

fn check_images(c: &Circuit, src: &[PauliString], dst: &[PauliString]) -> VerifyResult<()> {
    let mut batch = PauliBatch::new(c.num_qubits(), src)?;
    batch.conjugate_through(c)?;
    for (g, want) in dst.iter().enumerate() {
        let got = batch.get(g);
        if &got != want {
            return Err(VerifyError::Mismatch(format!(
                "Majorana {g} maps to {got}, expected {want}"
            )));
        }
    }
    Ok(())
}

fn check_basis(c: &Circuit, from: &[bool], to: &[bool]) -> VerifyResult<()> {
    let mut bits = from.to_vec();
    let phase = c.apply_to_basis(&mut bits)?;
    if bits != to || phase != Phase::ONE {
        return Err(VerifyError::Mismatch(format!(
            "vacuum image has phase i^{} and {} wrong bits",
            phase.power(),
            bits.iter().zip(to).filter(|(a, b)| a != b).count()
        )));
    }
    Ok(())
}

/// Every JW Majorana of mode `k` lands exactly on that of `sigma(k)`, and
/// the all-zeros state is fixed with phase +1.
pub fn routing_symbolic(c: &Circuit, sigma: &Permutation) -> VerifyResult<()> {
    let n = sigma.len();
    if c.num_qubits() != n {
        return Err(VerifyError::Mismatch(format!(
            "circuit has {} qubits, permutation {n}",
            c.num_qubits()
        )));
    }
    let jw = jw_majoranas(n);
    let want: Vec<PauliString> = (0..2 * n)
        .map(|g| jw[2 * sigma.apply(g / 2) + g % 2].clone())
        .collect();
    check_images(c, &jw, &want)?;
    check_basis(c, &vec![false; n], &vec![false; n])
}

pub fn routing_statevector(c: &Circuit, sigma: &Permutation) -> VerifyResult<()> {
    let u = oracle::circuit_unitary(c)?;
    let want = oracle::permutation_unitary(sigma)?;
    let d = oracle::max_abs_diff(&u, &want);
    if d >= DENSE_TOL {
        return Err(VerifyError::Mismatch(format!("max entry difference {d:e}")));
    }
    Ok(())
}

/// Basis state encoding the vacuum: every `i γ_2k γ_2k+1` must be diagonal,
/// and the vacuum is its common `-1` eigenvector.
pub fn vacuum_bits(tree: &TernaryTree) -> VerifyResult<Vec<bool>> {
    let n = tree.num_qubits();
    let words = n.div_ceil(64).max(1);
    let strings = tree.majorana_strings();
    // rows of [z | rhs] over GF(2)
    let mut rows: Vec<(Vec<u64>, bool)> = Vec::with_capacity(n);
    for k in 0..n {
        let p = strings[2 * k].try_mul(&strings[2 * k + 1])?;
        let phase = Phase::I * p.phase();
        if let Some(q) = (0..n).find(|&q| p.letter(q).x()) {
            return Err(VerifyError::VacuumNotBasis(format!(
                "mode {k} occupation flips qubit {q}"
            )));
        }
        let mut z = vec![0u64; words];
        for q in (0..n).filter(|&q| p.letter(q).z()) {
            z[q / 64] |= 1 << (q % 64);
        }
        // phase * (-1)^(z.b) = -1
        rows.push((z, phase == Phase::ONE));
    }
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(r) = (pivot_row..n).find(|&r| rows[r].0[w] & bit != 0) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let (pz, prhs) = rows[pivot_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pivot_row && row.0[w] & bit != 0 {
                for (a, b) in row.0.iter_mut().zip(&pz) {
                    *a ^= b;
                }
                row.1 ^= prhs;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if pivot_row != n {
        return Err(VerifyError::VacuumNotBasis("occupation operators are dependent".into()));
    }
    let mut bits = vec![false; n];
    for (r, &col) in pivots.iter().enumerate() {
        bits[col] = rows[r].1;
    }
    Ok(bits)
}

/// Mode operators of `src` conjugate exactly onto those of `dst`, and the
/// vacuum image of `src` maps to that of `dst` with phase +1.
pub fn transform_symbolic(c: &Circuit, src: &TernaryTree, dst: &TernaryTree) -> VerifyResult<()> {
    let n = src.num_qubits();
    let mut from = src.majorana_strings();
    let mut to = dst.majorana_strings();
    from.truncate(2 * n);
    to.truncate(2 * n);
    check_images(c, &from, &to)?;
    check_basis(c, &vacuum_bits(src)?, &vacuum_bits(dst)?)
}

pub fn transform_statevector(c: &Circuit, src: &TernaryTree, dst: &TernaryTree) -> VerifyResult<()> {
    let u = oracle::circuit_unitary(c)?;
    let want = oracle::encoder_unitary(dst)? * oracle::encoder_unitary(src)?.adjoint();
    let d = oracle::max_abs_diff(&u, &want);
    if d >= DENSE_TOL {
        return Err(VerifyError::Mismatch(format!("max entry difference {d:e}")));
    }
    Ok(())
}
