//! Jordan-Wigner routing: fermionic swaps, fanout compression and the
//! polylog-depth permutation compiler.

mod plan;

pub use plan::{
    ceil_log2, decompose_staircase, staircase_layer, Permutation, PermutationPlan,
    StaircasePermutation,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{Circuit, Gate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("mapping is not a bijection (offending value {0})")]
    NotABijection(usize),
    #[error("invalid transposition list {0}")]
    InvalidTranspositions(String),
    #[error("invalid staircase {0}")]
    InvalidStaircase(String),
    #[error("plan structure violated: {0}")]
    PlanStructure(String),
    #[error("fswap needs i < j < N, got i={i} j={j} N={n}")]
    BadSwap { i: usize, j: usize, n: usize },
    #[error("fanout #{index}: {reason}")]
    FanoutPrecondition { index: usize, reason: String },
    #[error("staircase range {range:?} exceeds {n} modes")]
    OutOfRange { range: (usize, usize), n: usize },
}

pub type RoutingResult<T> = Result<T, RoutingError>;

/// Fermionic swap of modes `i < j`: two fanouts carrying the exchange sign and
/// the parity of the modes in between, then a SWAP.
pub fn fswap_naive(i: usize, j: usize, n: usize) -> RoutingResult<Circuit> {
    if i >= j || j >= n {
        return Err(RoutingError::BadSwap { i, j, n });
    }
    let mut c = Circuit::new(n);
    c.push(Gate::CzFanout {
        control: j,
        targets: (i..j).collect(),
    });
    if j > i + 1 {
        c.push(Gate::CzFanout {
            control: i,
            targets: (i + 1..j).collect(),
        });
    }
    c.push(Gate::Swap(i, j));
    Ok(c)
}

/// Compresses fanouts whose target sets are contiguous index ranges into one
/// parity transform over the union of targets, two groups of boundary fanouts,
/// and the inverse parity transform.
pub fn compress_contiguous_fanouts(fanouts: &[Gate], n: usize) -> RoutingResult<Circuit> {
    let mut ranges = Vec::with_capacity(fanouts.len());
    let mut is_control = vec![false; n];
    let mut is_target = vec![false; n];
    for (index, g) in fanouts.iter().enumerate() {
        let fail = |reason: String| RoutingError::FanoutPrecondition { index, reason };
        let Gate::CzFanout { control, targets } = g else {
            return Err(fail(format!("{g} is not a fanout")));
        };
        g.validate(n).map_err(|e| fail(e.to_string()))?;
        let lo = *targets.iter().min().unwrap();
        let hi = *targets.iter().max().unwrap();
        if hi - lo + 1 != targets.len() {
            return Err(fail("targets are not a contiguous range".into()));
        }
        if is_control[*control] {
            return Err(fail(format!("control {control} is reused")));
        }
        is_control[*control] = true;
        for t in lo..=hi {
            is_target[t] = true;
        }
        ranges.push((*control, lo, hi));
    }
    for (index, &(c, _, _)) in ranges.iter().enumerate() {
        if is_target[c] {
            return Err(RoutingError::FanoutPrecondition {
                index,
                reason: format!("control {c} is also a target"),
            });
        }
    }
    let mut out = Circuit::new(n);
    if ranges.is_empty() {
        return Ok(out);
    }
    let union: Vec<usize> = (0..n).filter(|&q| is_target[q]).collect();
    // predecessor of each union member inside the union
    let mut pred = vec![usize::MAX; n];
    for w in union.windows(2) {
        pred[w[1]] = w[0];
    }
    let mut blue: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut red: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(c, lo, hi) in &ranges {
        blue.entry(hi).or_default().push(c);
        if lo != union[0] {
            red.entry(pred[lo]).or_default().push(c);
        }
    }
    if union.len() > 1 {
        out.push(Gate::ParityTransform(union.clone()));
    }
    for group in [blue, red] {
        for (q, mut cs) in group {
            cs.sort_unstable();
            if cs.len() == 1 {
                out.push(Gate::Cz(cs[0], q));
            } else {
                out.push(Gate::CzFanout {
                    control: q,
                    targets: cs,
                });
            }
        }
    }
    if union.len() > 1 {
        out.push(Gate::ParityTransformInv(union));
    }
    Ok(out)
}

/// Log-depth circuit for a staircase of fermionic swaps.
///
/// With all SWAPs commuted to the end, the fanout controlled on `n_i` targets
/// every `m_j` plus the unmarked qubits between `m_i` and `n_i`; the fanout on
/// `m_i` targets the other `m_j` (these cancel pairwise across the staircase)
/// plus the same unmarked qubits. Qubits are relabeled so that every target
/// set is contiguous, compressed, and mapped back.
pub fn staircase_circuit(s: &StaircasePermutation, n: usize) -> RoutingResult<Circuit> {
    let (lo, hi) = s.range();
    if hi >= n {
        return Err(RoutingError::OutOfRange {
            range: (lo, hi),
            n,
        });
    }
    let k = s.len();
    let mut marked = vec![false; hi - lo + 1];
    for &(a, b) in s.pairs() {
        marked[a - lo] = true;
        marked[b - lo] = true;
    }
    let unmarked: Vec<usize> = (lo..=hi).filter(|&q| !marked[q - lo]).collect();
    // logical order: m's, n's, unmarked
    let mut order: Vec<usize> = s.pairs().iter().map(|p| p.0).collect();
    order.extend(s.pairs().iter().map(|p| p.1));
    order.extend(&unmarked);
    let width = order.len();

    let mut cross = Vec::with_capacity(k);
    let mut inner = Vec::with_capacity(2 * k);
    for (i, &(m, nn)) in s.pairs().iter().enumerate() {
        cross.push(Gate::CzFanout {
            control: k + i,
            targets: (0..k).collect(),
        });
        let a = unmarked.partition_point(|&u| u < m);
        let b = unmarked.partition_point(|&u| u < nn);
        if a < b {
            let targets: Vec<usize> = (2 * k + a..2 * k + b).collect();
            inner.push(Gate::CzFanout {
                control: k + i,
                targets: targets.clone(),
            });
            inner.push(Gate::CzFanout {
                control: i,
                targets,
            });
        }
    }
    let mut out = Circuit::new(n);
    for part in [cross, inner] {
        let compressed = compress_contiguous_fanouts(&part, width)?;
        for g in compressed.gates() {
            out.push(g.map_qubits(|q| order[q]));
        }
    }
    for &(m, nn) in s.pairs() {
        out.push(Gate::Swap(m, nn));
    }
    Ok(out)
}

/// One layer of staircases with disjoint ranges; the scheduler runs them in parallel.
pub fn staircase_layer_circuit(layer: &[StaircasePermutation], n: usize) -> RoutingResult<Circuit> {
    let mut out = Circuit::new(n);
    for s in layer {
        out.append(&staircase_circuit(s, n)?)
            .expect("sizes agree by construction");
    }
    Ok(out)
}

/// Circuit implementing the fermionic permutation `sigma` under Jordan-Wigner:
/// conjugation sends mode `k` to mode `sigma(k)` and the all-zeros state is fixed.
pub fn synthesize_permutation(sigma: &Permutation) -> Circuit {
    let n = sigma.len();
    let plan = decompose_staircase(sigma);
    let mut out = Circuit::new(n);
    for layer in &plan.layers {
        let c = staircase_layer_circuit(layer, n).expect("plan staircases are valid");
        out.append(&c).expect("sizes agree by construction");
    }
    out
}
