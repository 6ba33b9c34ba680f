//! Permutation-interleaved Trotter scheduling and the fermionic FFT routing skeleton.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::routing::{
    staircase_layer, staircase_layer_circuit, synthesize_permutation, Permutation,
    StaircasePermutation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrotterError {
    #[error("term {index}: {reason}")]
    BadTerm { index: usize, reason: String },
    #[error("FFT skeleton needs a power of two, got {0}")]
    NotPowerOfTwo(usize),
}

pub type TrotterResult<T> = Result<T, TrotterError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HamiltonianTerm {
    Hopping {
        i: usize,
        j: usize,
        #[serde(rename = "J")]
        coeff: f64,
    },
    Density {
        i: usize,
        j: usize,
        #[serde(rename = "U")]
        coeff: f64,
    },
    Quartic {
        i: usize,
        j: usize,
        k: usize,
        m: usize,
        #[serde(rename = "V")]
        coeff: f64,
    },
}

impl HamiltonianTerm {
    pub fn modes(&self) -> Vec<usize> {
        match *self {
            HamiltonianTerm::Hopping { i, j, .. } | HamiltonianTerm::Density { i, j, .. } => {
                vec![i, j]
            }
            HamiltonianTerm::Quartic { i, j, k, m, .. } => vec![i, j, k, m],
        }
    }

    pub fn coeff(&self) -> f64 {
        match *self {
            HamiltonianTerm::Hopping { coeff, .. }
            | HamiltonianTerm::Density { coeff, .. }
            | HamiltonianTerm::Quartic { coeff, .. } => coeff,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    pub num_modes: usize,
    pub terms: Vec<HamiltonianTerm>,
}

impl Hamiltonian {
    pub fn validate(&self) -> TrotterResult<()> {
        for (index, t) in self.terms.iter().enumerate() {
            let mut ms = t.modes();
            if ms.iter().any(|&m| m >= self.num_modes) {
                return Err(TrotterError::BadTerm {
                    index,
                    reason: format!("mode out of range for {} modes", self.num_modes),
                });
            }
            ms.sort_unstable();
            ms.dedup();
            if ms.len() != t.modes().len() {
                return Err(TrotterError::BadTerm {
                    index,
                    reason: "repeated mode".into(),
                });
            }
        }
        Ok(())
    }

    /// 1D open chain of nearest-neighbor hoppings.
    pub fn chain(n: usize, j: f64) -> Self {
        Hamiltonian {
            num_modes: n,
            terms: (0..n.saturating_sub(1))
                .map(|i| HamiltonianTerm::Hopping { i, j: i + 1, coeff: j })
                .collect(),
        }
    }

    /// Open `rows x cols` grid, mode `r * cols + c`; row bonds first, then column bonds.
    pub fn grid(rows: usize, cols: usize, j: f64) -> Self {
        let idx = |r: usize, c: usize| r * cols + c;
        let mut terms = Vec::new();
        for r in 0..rows {
            for c in 0..cols.saturating_sub(1) {
                terms.push(HamiltonianTerm::Hopping {
                    i: idx(r, c),
                    j: idx(r, c + 1),
                    coeff: j,
                });
            }
        }
        for r in 0..rows.saturating_sub(1) {
            for c in 0..cols {
                terms.push(HamiltonianTerm::Hopping {
                    i: idx(r, c),
                    j: idx(r + 1, c),
                    coeff: j,
                });
            }
        }
        Hamiltonian {
            num_modes: rows * cols,
            terms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanLayer {
    /// Mode `k` sits at Jordan-Wigner position `sigma(k)` during this layer.
    pub sigma: Permutation,
    /// Indices into the Hamiltonian's term list.
    pub terms: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutingStep {
    pub permutation: Permutation,
    pub circuit: Circuit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub num_modes: usize,
    pub layers: Vec<PlanLayer>,
    /// `U_{σ_1}`, `U_{σ_2 σ_1^{-1}}`, ..., `U_{σ_L^{-1}}`; empty when there are no layers.
    pub merged_routing: Vec<RoutingStep>,
}

fn greedy_colors(order: &[usize], neighbors: &[Vec<usize>]) -> Vec<usize> {
    let mut color = vec![usize::MAX; neighbors.len()];
    let mut used = Vec::new();
    for &t in order {
        used.clear();
        used.extend(neighbors[t].iter().map(|&u| color[u]).filter(|&c| c != usize::MAX));
        used.sort_unstable();
        used.dedup();
        let c = used.iter().enumerate().find(|(i, &c)| *i != c).map_or(used.len(), |(i, _)| i);
        color[t] = c;
    }
    color
}

/// Term coloring: largest-degree-first greedy, replaced by input-order greedy
/// when that uses fewer colors.
fn color_terms(h: &Hamiltonian) -> Vec<usize> {
    let mut by_mode = vec![Vec::new(); h.num_modes];
    for (t, term) in h.terms.iter().enumerate() {
        for m in term.modes() {
            by_mode[m].push(t);
        }
    }
    let neighbors: Vec<Vec<usize>> = h
        .terms
        .iter()
        .enumerate()
        .map(|(t, term)| {
            let mut v: Vec<usize> = term
                .modes()
                .iter()
                .flat_map(|&m| by_mode[m].iter().copied())
                .filter(|&u| u != t)
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut ldf: Vec<usize> = (0..h.terms.len()).collect();
    ldf.sort_by_key(|&t| std::cmp::Reverse(neighbors[t].len()));
    let a = greedy_colors(&ldf, &neighbors);
    let input: Vec<usize> = (0..h.terms.len()).collect();
    let b = greedy_colors(&input, &neighbors);
    let count = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
    if count(&b) < count(&a) {
        b
    } else {
        a
    }
}

/// Positions for one layer: terms already on consecutive positions stay, the
/// rest take the lowest free run in input order, idle modes fill what is left.
fn pack_layer(n: usize, groups: &[Vec<usize>]) -> Permutation {
    let attempt = |keep_in_place: bool| -> Option<Vec<usize>> {
        let mut pos = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        let mut pending = Vec::new();
        for g in groups {
            let mut s = g.clone();
            s.sort_unstable();
            let contiguous = s.windows(2).all(|w| w[1] == w[0] + 1);
            if keep_in_place && contiguous {
                for &m in &s {
                    pos[m] = m;
                    taken[m] = true;
                }
            } else {
                pending.push(s);
            }
        }
        for s in pending {
            let len = s.len();
            let start = (0..=n - len).find(|&p| (p..p + len).all(|q| !taken[q]))?;
            for (off, &m) in s.iter().enumerate() {
                pos[m] = start + off;
                taken[start + off] = true;
            }
        }
        for m in 0..n {
            if pos[m] == usize::MAX && !taken[m] {
                pos[m] = m;
                taken[m] = true;
            }
        }
        let mut free = (0..n).filter(|&q| !taken[q]);
        for p in pos.iter_mut().filter(|p| **p == usize::MAX) {
            *p = free.next().unwrap();
        }
        Some(pos)
    };
    let pos = attempt(true)
        .or_else(|| attempt(false))
        .expect("packing from the left always fits disjoint groups");
    Permutation::new(pos).expect("packing is a bijection")
}

pub fn plan_layers(h: &Hamiltonian) -> TrotterResult<TrotterPlan> {
    h.validate()?;
    let n = h.num_modes;
    let colors = color_terms(h);
    let count = colors.iter().max().map_or(0, |m| m + 1);
    let mut layers = Vec::with_capacity(count);
    for c in 0..count {
        let terms: Vec<usize> = (0..h.terms.len()).filter(|&t| colors[t] == c).collect();
        let groups: Vec<Vec<usize>> = terms.iter().map(|&t| h.terms[t].modes()).collect();
        layers.push(PlanLayer {
            sigma: pack_layer(n, &groups),
            terms,
        });
    }
    let mut merged_routing = Vec::new();
    if !layers.is_empty() {
        let mut prev = Permutation::identity(n);
        let targets = layers
            .iter()
            .map(|l| l.sigma.clone())
            .chain(std::iter::once(Permutation::identity(n)));
        for next in targets {
            let permutation = prev.inverse().then(&next);
            merged_routing.push(RoutingStep {
                circuit: synthesize_permutation(&permutation),
                permutation,
            });
            prev = next;
        }
    }
    Ok(TrotterPlan {
        num_modes: n,
        layers,
        merged_routing,
    })
}

impl TrotterPlan {
    /// Every term's modes sit on consecutive positions in its layer, and the
    /// terms of a layer are disjoint.
    pub fn adjacency_holds(&self, h: &Hamiltonian) -> bool {
        self.layers.iter().all(|layer| {
            let mut seen = vec![false; self.num_modes];
            layer.terms.iter().all(|&t| {
                let mut ps: Vec<usize> = h.terms[t]
                    .modes()
                    .iter()
                    .map(|&m| layer.sigma.apply(m))
                    .collect();
                ps.sort_unstable();
                let disjoint = h.terms[t].modes().iter().all(|&m| !std::mem::replace(&mut seen[m], true));
                disjoint && ps.windows(2).all(|w| w[1] == w[0] + 1)
            })
        })
    }
}

/// First-order product formula: routing steps interleaved with rotation
/// placeholders on adjacent positions.
pub fn emit_trotter_circuit(plan: &TrotterPlan, h: &Hamiltonian, dt: f64) -> Circuit {
    let mut c = Circuit::new(plan.num_modes);
    for (l, layer) in plan.layers.iter().enumerate() {
        c.append(&plan.merged_routing[l].circuit).expect("sizes agree");
        for &t in &layer.terms {
            let term = &h.terms[t];
            let mut ps: Vec<usize> = term.modes().iter().map(|&m| layer.sigma.apply(m)).collect();
            ps.sort_unstable();
            let angle = dt * term.coeff();
            let rot = |a: usize, b: usize, label: &str| Gate::TwoModeRotation {
                a,
                b,
                label: label.to_string(),
                angle,
            };
            match term {
                HamiltonianTerm::Hopping { .. } => c.push(rot(ps[0], ps[1], "hop")),
                HamiltonianTerm::Density { .. } => c.push(rot(ps[0], ps[1], "density")),
                HamiltonianTerm::Quartic { .. } => {
                    c.push(rot(ps[0], ps[1], "quartic"));
                    c.push(rot(ps[2], ps[3], "quartic"));
                }
            }
        }
    }
    if let Some(last) = plan.merged_routing.last() {
        c.append(&last.circuit).expect("sizes agree");
    }
    c
}

/// The circuit with every rotation placeholder removed.
pub fn clifford_part(c: &Circuit) -> Circuit {
    Circuit::from_gates(
        c.num_qubits(),
        c.gates().iter().filter(|g| g.is_clifford()).cloned().collect(),
    )
    .expect("subset of a valid circuit")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonStep {
    pub permutation: Permutation,
    /// Present when the step is a single layer of staircases.
    pub staircases: Option<Vec<StaircasePermutation>>,
}

impl SkeletonStep {
    pub fn is_staircase(&self) -> bool {
        self.staircases.is_some()
    }

    pub fn circuit(&self) -> Circuit {
        match &self.staircases {
            Some(layer) => staircase_layer_circuit(layer, self.permutation.len())
                .expect("validated staircases"),
            None => synthesize_permutation(&self.permutation),
        }
    }
}

fn bit_permutation(n: usize, m: usize, target_bit: &[usize]) -> Permutation {
    Permutation::new(
        (0..n)
            .map(|i| {
                (0..m)
                    .filter(|&b| i >> b & 1 == 1)
                    .map(|b| 1 << target_bit[b])
                    .sum()
            })
            .collect(),
    )
    .expect("bit permutations are bijections")
}

/// Reorderings of the radix-2 fermionic FFT: before butterfly level `l` the
/// partner bit is moved to position bit 0 (a staircase layer), and a final
/// step puts frequencies in natural order when that is not already the case.
pub fn fft_permutation_skeleton(n: usize) -> TrotterResult<Vec<SkeletonStep>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(TrotterError::NotPowerOfTwo(n));
    }
    let m = n.trailing_zeros() as usize;
    // pos_of[b]: position bit currently holding logical bit b
    let mut pos_of: Vec<usize> = (0..m).collect();
    let mut steps = Vec::with_capacity(m + 1);
    for level in 0..m {
        let b = m - 1 - level;
        let p = pos_of[b];
        let mut swap: Vec<usize> = (0..m).collect();
        swap.swap(0, p);
        if let Some(other) = pos_of.iter().position(|&x| x == 0) {
            pos_of[other] = p;
        }
        pos_of[b] = 0;
        let permutation = bit_permutation(n, m, &swap);
        steps.push(SkeletonStep {
            staircases: staircase_layer(&permutation),
            permutation,
        });
    }
    // logical bit b must end at position bit m-1-b
    let mut to_final = vec![0; m];
    for b in 0..m {
        to_final[pos_of[b]] = m - 1 - b;
    }
    let last = bit_permutation(n, m, &to_final);
    if !last.is_identity() {
        steps.push(SkeletonStep {
            staircases: staircase_layer(&last),
            permutation: last,
        });
    }
    Ok(steps)
}

pub fn skeleton_circuit(steps: &[SkeletonStep]) -> Circuit {
    let n = steps.first().map_or(0, |s| s.permutation.len());
    let mut c = Circuit::new(n);
    for s in steps {
        c.append(&s.circuit()).expect("sizes agree");
    }
    c
}
