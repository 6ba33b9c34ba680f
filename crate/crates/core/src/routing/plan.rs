//! Permutations, staircase permutations, and the recursive-halving layer plan.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{RoutingError, RoutingResult};

/// A bijection on `0..n`; entry `k` is `σ(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = RoutingError;

    fn try_from(v: Vec<usize>) -> RoutingResult<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0
    }
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> RoutingResult<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n || seen[v] {
                return Err(RoutingError::NotABijection(v));
            }
            seen[v] = true;
        }
        Ok(Permutation(mapping))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Permutation(v)
    }

    /// The permutation exchanging each given pair; pairs must be disjoint.
    pub fn from_transpositions(n: usize, pairs: &[(usize, usize)]) -> RoutingResult<Self> {
        let mut v: Vec<usize> = (0..n).collect();
        for &(a, b) in pairs {
            if a >= n || b >= n || a == b || v[a] != a || v[b] != b {
                return Err(RoutingError::InvalidTranspositions(format!("{pairs:?}")));
            }
            v.swap(a, b);
        }
        Ok(Permutation(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (k, &v) in self.0.iter().enumerate() {
            inv[v] = k;
        }
        Permutation(inv)
    }

    /// Apply `self` first, then `next`: returns `next ∘ self`.
    pub fn then(&self, next: &Permutation) -> Self {
        assert_eq!(self.len(), next.len(), "permutation sizes differ");
        Permutation(self.0.iter().map(|&v| next.0[v]).collect())
    }

    pub fn is_involution(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| self.0[v] == i)
    }

    /// Splits into two involutions `(first, second)` with `self = second ∘ first`.
    ///
    /// Every cycle of length L is the product of the reflections `i -> -i` and
    /// `i -> 1 - i` (mod L) over its positions.
    pub fn two_involutions(&self) -> (Permutation, Permutation) {
        let n = self.len();
        let mut first: Vec<usize> = (0..n).collect();
        let mut second: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.0[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.0[cur];
            }
            let l = cycle.len();
            for i in 0..l {
                // cycle[i] -> cycle[i+1]; reflect to -i, then map -i to i+1.
                first[cycle[i]] = cycle[(l - i) % l];
                second[cycle[(l - i) % l]] = cycle[(i + 1) % l];
            }
        }
        (Permutation(first), Permutation(second))
    }

    /// Disjoint transpositions `(a, σ(a))` with `a < σ(a)`; `None` unless an involution.
    pub fn transpositions(&self) -> Option<Vec<(usize, usize)>> {
        if !self.is_involution() {
            return None;
        }
        Some(
            self.0
                .iter()
                .enumerate()
                .filter(|(a, &b)| *a < b)
                .map(|(a, &b)| (a, b))
                .collect(),
        )
    }
}

/// Disjoint transpositions `(m_i, n_i)` with both sequences strictly increasing
/// and `m_k < n_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct StaircasePermutation {
    pairs: Vec<(usize, usize)>,
}

impl TryFrom<Vec<(usize, usize)>> for StaircasePermutation {
    type Error = RoutingError;

    fn try_from(v: Vec<(usize, usize)>) -> RoutingResult<Self> {
        StaircasePermutation::new(v)
    }
}

impl From<StaircasePermutation> for Vec<(usize, usize)> {
    fn from(s: StaircasePermutation) -> Self {
        s.pairs
    }
}

impl StaircasePermutation {
    pub fn new(pairs: Vec<(usize, usize)>) -> RoutingResult<Self> {
        let bad = |why: &str| RoutingError::InvalidStaircase(format!("{pairs:?}: {why}"));
        if pairs.is_empty() {
            return Err(bad("no pairs"));
        }
        if pairs.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1) {
            return Err(bad("indices not strictly increasing"));
        }
        if pairs.last().unwrap().0 >= pairs[0].1 {
            return Err(bad("last m is not below first n"));
        }
        Ok(StaircasePermutation { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Inclusive index range `[m_1, n_k]`.
    pub fn range(&self) -> (usize, usize) {
        (self.pairs[0].0, self.pairs.last().unwrap().1)
    }

    pub fn to_permutation(&self, n: usize) -> RoutingResult<Permutation> {
        Permutation::from_transpositions(n, &self.pairs)
    }
}

/// Splits an involution into staircases with pairwise-disjoint ranges, or
/// returns `None` when it is not a single layer of staircases.
pub fn staircase_layer(sigma: &Permutation) -> Option<Vec<StaircasePermutation>> {
    let mut pairs = sigma.transpositions()?;
    pairs.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let mut end = pairs[i].1;
        let mut j = i + 1;
        while j < pairs.len() && pairs[j].0 < end {
            end = end.max(pairs[j].1);
            j += 1;
        }
        out.push(StaircasePermutation::new(pairs[i..j].to_vec()).ok()?);
        i = j;
    }
    Some(out)
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Layers of staircases; layer 0 is applied first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationPlan {
    pub num_modes: usize,
    pub layers: Vec<Vec<StaircasePermutation>>,
}

impl PermutationPlan {
    /// The permutation obtained by applying every layer in order.
    pub fn compose(&self) -> Permutation {
        let mut v: Vec<usize> = (0..self.num_modes).collect();
        for layer in &self.layers {
            // current map k -> v[k]; the layer then moves position p to s(p)
            let mut s: Vec<usize> = (0..self.num_modes).collect();
            for st in layer {
                for &(a, b) in st.pairs() {
                    s[a] = b;
                    s[b] = a;
                }
            }
            for x in v.iter_mut() {
                *x = s[*x];
            }
        }
        Permutation(v)
    }

    pub fn staircase_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Structural check: ranges within each layer are disjoint and the layer
    /// count is within `ceil(log2 N)`.
    pub fn check_structure(&self) -> RoutingResult<()> {
        if self.layers.len() > ceil_log2(self.num_modes) {
            return Err(RoutingError::PlanStructure(format!(
                "{} layers for {} modes",
                self.layers.len(),
                self.num_modes
            )));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            let mut ranges: Vec<(usize, usize)> = layer.iter().map(|s| s.range()).collect();
            ranges.sort_unstable();
            if ranges.last().is_some_and(|r| r.1 >= self.num_modes) {
                return Err(RoutingError::PlanStructure(format!("layer {l} out of range")));
            }
            if ranges.windows(2).any(|w| w[0].1 >= w[1].0) {
                return Err(RoutingError::PlanStructure(format!(
                    "layer {l} has overlapping staircases"
                )));
            }
        }
        Ok(())
    }
}

/// Recursive halving: in each interval, left-half elements bound for the right
/// half are paired in ascending order with right-half elements bound left.
pub fn decompose_staircase(sigma: &Permutation) -> PermutationPlan {
    let n = sigma.len();
    let levels = ceil_log2(n);
    // rho[p]: final destination of the element currently at position p
    let mut rho = sigma.0.clone();
    let mut intervals = vec![(0usize, n)];
    let mut layers = Vec::with_capacity(levels);
    for _ in 0..levels {
        let mut layer = Vec::new();
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for &(lo, hi) in &intervals {
            if hi - lo < 2 {
                continue;
            }
            let mid = lo + (hi - lo) / 2;
            let xs = (lo..mid).filter(|&p| rho[p] >= mid);
            let ys = (mid..hi).filter(|&p| rho[p] < mid);
            let pairs: Vec<(usize, usize)> = xs.zip(ys).collect();
            for &(x, y) in &pairs {
                rho.swap(x, y);
            }
            if !pairs.is_empty() {
                layer.push(StaircasePermutation { pairs });
            }
            next.push((lo, mid));
            next.push((mid, hi));
        }
        layers.push(layer);
        intervals = next;
    }
    debug_assert!(rho.iter().enumerate().all(|(i, &v)| i == v));
    PermutationPlan {
        num_modes: n,
        layers,
    }
}
