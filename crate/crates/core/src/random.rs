//! Seeded generators for permutations, staircases and encoding trees.

use rand::seq::index::sample;
use rand::Rng;

use crate::circuit::Gate;
use crate::routing::StaircasePermutation;
use crate::tree::{BinaryShape, Branch, StandardKind, TernaryTree};

/// A random staircase on `0..n` (`n >= 2`).
pub fn random_staircase<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StaircasePermutation {
    assert!(n >= 2, "a staircase needs two modes");
    let split = rng.random_range(1..n);
    let k = rng.random_range(1..=split.min(n - split));
    let mut ms = sample(rng, split, k).into_vec();
    let mut ns: Vec<usize> = sample(rng, n - split, k)
        .into_iter()
        .map(|x| x + split)
        .collect();
    ms.sort_unstable();
    ns.sort_unstable();
    StaircasePermutation::new(ms.into_iter().zip(ns).collect()).expect("valid by construction")
}

/// Uniformly random binary tree shape with `n` internal nodes (Rémy's algorithm).
pub fn random_binary_shape<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BinaryShape {
    // all nodes, leaves included: children None for leaves
    let mut kids: Vec<Option<[usize; 2]>> = vec![None];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut root = 0;
    for _ in 0..n {
        let x = rng.random_range(0..kids.len());
        let y = kids.len();
        let z = y + 1;
        let side = rng.random_range(0..2usize);
        let mut ch = [z, z];
        ch[side] = x;
        kids.push(Some(ch));
        kids.push(None);
        parent.push(parent[x]);
        parent.push(Some((y, 1 - side)));
        match parent[x] {
            None => root = y,
            Some((p, s)) => kids[p].as_mut().unwrap()[s] = y,
        }
        parent[x] = Some((y, side));
    }
    // compact internal nodes
    let mut index = vec![usize::MAX; kids.len()];
    let mut count = 0;
    for (i, k) in kids.iter().enumerate() {
        if k.is_some() {
            index[i] = count;
            count += 1;
        }
    }
    let children = kids
        .iter()
        .filter_map(|k| *k)
        .map(|[l, r]| [kids[l].map(|_| index[l]), kids[r].map(|_| index[r])])
        .collect();
    BinaryShape {
        root: kids[root].map(|_| index[root]),
        children,
    }
}

pub fn random_binary_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TernaryTree {
    TernaryTree::from_binary_shape(&random_binary_shape(n, rng)).expect("valid by construction")
}

/// A random gate from {SWAP, S, Sdg, CNOT rotation} that acts on `tree`.
pub fn applicable_tree_gate<R: Rng + ?Sized>(tree: &TernaryTree, rng: &mut R) -> Gate {
    let n = tree.num_qubits();
    loop {
        match rng.random_range(0..4) {
            0 if n >= 2 => {
                let ab = sample(rng, n, 2);
                return Gate::Swap(ab.index(0), ab.index(1));
            }
            1 => return Gate::S(rng.random_range(0..n)),
            2 => return Gate::Sdg(rng.random_range(0..n)),
            3 => {
                let k = rng.random_range(0..n);
                let node = tree.node_of_qubit(k);
                let mut options = Vec::with_capacity(2);
                if let Some(j) = tree.child(node, Branch::Left).and_then(|c| tree.qubit(c)) {
                    options.push(Gate::Cnot(j, k));
                }
                if let Some(r) = tree.child(node, Branch::Right).and_then(|c| tree.qubit(c)) {
                    options.push(Gate::Cnot(k, r));
                }
                if !options.is_empty() {
                    let i = rng.random_range(0..options.len());
                    return options.swap_remove(i);
                }
            }
            _ => {}
        }
    }
}

/// Jordan-Wigner tree scrambled by `steps` random tree-compatible gates;
/// product preserving by construction.
pub fn scrambled_tree<R: Rng + ?Sized>(n: usize, steps: usize, rng: &mut R) -> TernaryTree {
    let mut t = TernaryTree::standard(StandardKind::JordanWigner, n).expect("n >= 1");
    for _ in 0..steps {
        let g = applicable_tree_gate(&t, rng);
        t.apply_gate_in_place(&g).expect("gate chosen to apply");
    }
    t
}
