//! Depth metering: worst-case staircase families, seeded depth scans and CSV output.

use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::random::{random_staircase, scrambled_tree};
use crate::routing::{staircase_circuit, synthesize_permutation, Permutation, StaircasePermutation};
use crate::transform::transform_between;
use crate::tree::{StandardKind, TernaryTree};
use crate::trotter::{fft_permutation_skeleton, skeleton_circuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// Random mode permutation.
    Permutation,
    /// Deepest of the structured staircase families.
    Staircase,
    /// Random scrambled tree to Jordan-Wigner.
    Transform,
    /// Fermionic FFT routing skeleton (powers of two only).
    FftSkeleton,
}

impl Construction {
    pub const ALL: [Construction; 4] = [
        Construction::Permutation,
        Construction::Staircase,
        Construction::Transform,
        Construction::FftSkeleton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::Permutation => "permutation",
            Construction::Staircase => "staircase",
            Construction::Transform => "transform",
            Construction::FftSkeleton => "fft-skeleton",
        }
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown construction {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub construction: &'static str,
    pub primitive_depth: usize,
    pub gate_count: usize,
    pub seed: u64,
}

/// Structured staircases that maximize the number of pairs or the spread of
/// the unmarked ranges between them.
pub fn staircase_families(n: usize) -> Vec<(&'static str, StaircasePermutation)> {
    let mut out = Vec::new();
    let half = n / 2;
    if half >= 1 {
        let full = (0..half).map(|i| (i, half + i)).collect();
        out.push(("full", StaircasePermutation::new(full).unwrap()));
    }
    let quarter = n / 4;
    if quarter >= 1 {
        let spread = (0..quarter).map(|i| (2 * i, half + 2 * i + 1)).collect();
        out.push(("interleaved", StaircasePermutation::new(spread).unwrap()));
        let gap = (0..quarter).map(|i| (i, n - quarter + i)).collect();
        out.push(("wide-gap", StaircasePermutation::new(gap).unwrap()));
    }
    if n >= 2 {
        out.push(("single", StaircasePermutation::new(vec![(0, n - 1)]).unwrap()));
    }
    for (name, groups) in [("clumped-2", 2), ("clumped-3", 3), ("clumped-4", 4)] {
        if let Some(s) = clumped(n, groups) {
            out.push((name, s));
        }
    }
    out
}

/// `groups` blocks of `m`s separated by unmarked gaps, then matching blocks of
/// `n`s, with three quarters of the qubits marked. Pairs in different groups
/// share no unmarked-range endpoint, so both boundary fanout sets are large;
/// two groups give the deepest circuits of all families measured.
fn clumped(n: usize, groups: usize) -> Option<StaircasePermutation> {
    let block = 3 * n / (8 * groups);
    if block == 0 {
        return None;
    }
    let gap = (n - 2 * groups * block) / (2 * groups);
    let half = groups * (block + gap);
    let pairs = (0..groups)
        .flat_map(|j| (0..block).map(move |t| j * (block + gap) + t))
        .map(|m| (m, half + m))
        .collect();
    StaircasePermutation::new(pairs).ok()
}

/// Largest primitive depth over the structured families and `random` seeded staircases.
pub fn worst_staircase_depth(n: usize, random: usize, seed: u64) -> (usize, usize) {
    let mut cases: Vec<StaircasePermutation> =
        staircase_families(n).into_iter().map(|(_, s)| s).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cases.extend((0..random).map(|_| random_staircase(n, &mut rng)));
    cases
        .par_iter()
        .map(|s| {
            let c = staircase_circuit(s, n).expect("family fits").expand_macros();
            (c.depth(true).unwrap(), c.len())
        })
        .max()
        .unwrap_or((0, 0))
}

fn sample_seed(base: u64, n: usize, sample: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((n as u64) << 20)
        .wrapping_add(sample as u64)
}

/// One metered sample; `None` when the construction does not apply at `n`.
pub fn measure(construction: Construction, n: usize, seed: u64) -> Option<DepthRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circuit = match construction {
        Construction::Permutation => synthesize_permutation(&Permutation::random(n, &mut rng)),
        Construction::Staircase => {
            if n < 2 {
                return None;
            }
            let (depth, gates) = worst_staircase_depth(n, 4, seed);
            return Some(DepthRow {
                n,
                construction: construction.name(),
                primitive_depth: depth,
                gate_count: gates,
                seed,
            });
        }
        Construction::Transform => {
            let src = scrambled_tree(n, 4 * n, &mut rng);
            let jw = TernaryTree::standard(StandardKind::JordanWigner, n).ok()?;
            transform_between(&src, &jw).ok()?
        }
        Construction::FftSkeleton => skeleton_circuit(&fft_permutation_skeleton(n).ok()?),
    };
    let expanded = circuit.expand_macros();
    Some(DepthRow {
        n,
        construction: construction.name(),
        primitive_depth: expanded.depth(true).unwrap(),
        gate_count: expanded.len(),
        seed,
    })
}

/// Seeded samples for every size and construction, run in parallel; rows are
/// ordered by construction, size and sample.
pub fn depth_scan(
    sizes: &[usize],
    constructions: &[Construction],
    samples: usize,
    seed: u64,
) -> Vec<DepthRow> {
    let jobs: Vec<(Construction, usize, usize)> = constructions
        .iter()
        .flat_map(|&c| {
            sizes
                .iter()
                .flat_map(move |&n| (0..samples).map(move |s| (c, n, s)))
        })
        .collect();
    jobs.par_iter()
        .filter_map(|&(c, n, s)| measure(c, n, sample_seed(seed, n, s)))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[DepthRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares line `y = a x + b`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (a, my - a * mx)
}
