//! Circuits between ternary-tree encodings: spine flattening, heavy-path
//! balancing, general ternary-to-JW reduction and end-to-end transforms.

use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::pauli::{PauliBatch, PauliString, Phase};
use crate::routing::{synthesize_permutation, Permutation};
use crate::tree::{Branch, NodeId, Slot, TernaryTree, TreeError};

/// Rotations fire at nodes whose halving depth reaches this value.
pub const ROTATE_THRESHOLD: usize = 4;
/// Balancing continues while some node has at least this halving depth.
pub const BALANCE_GUARD: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("tree is not binary shaped")]
    NotBinaryShaped,
    #[error("tree is not product preserving: {0}")]
    NotProductPreserving(String),
    #[error("trees have {src} and {dst} qubits")]
    SizeMismatch { src: usize, dst: usize },
    #[error("balancing did not settle within {0} rounds")]
    RoundLimit(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

pub type TransformResult<T> = Result<T, TransformError>;

/// Weights, depths and heavy paths over the binary view below one node.
///
/// A non-leaf middle child counts as a single opaque leaf.
#[derive(Debug, Clone)]
pub struct HeavyPathInfo {
    top: NodeId,
    view: Vec<NodeId>,
    weight: Vec<usize>,
    depth: Vec<usize>,
}

impl HeavyPathInfo {
    pub fn new(tree: &TernaryTree, top: NodeId) -> Self {
        let view = tree.binary_view(top);
        let mut weight = vec![1; tree.node_count()];
        let mut depth = vec![0; tree.node_count()];
        for &id in view.iter().rev() {
            let ch = tree.children(id).unwrap();
            weight[id] = 1 + weight[ch[0]] + weight[ch[2]];
        }
        for &id in &view {
            let ch = tree.children(id).unwrap();
            depth[ch[0]] = depth[id] + 1;
            depth[ch[2]] = depth[id] + 1;
        }
        HeavyPathInfo {
            top,
            view,
            weight,
            depth,
        }
    }

    pub fn top(&self) -> NodeId {
        self.top
    }

    /// Parent nodes of the view in preorder.
    pub fn view(&self) -> &[NodeId] {
        &self.view
    }

    pub fn weight(&self, id: NodeId) -> usize {
        self.weight[id]
    }

    /// Depth below the view's top.
    pub fn depth(&self, id: NodeId) -> usize {
        self.depth[id]
    }

    /// `A` followed by every descendant whose weight exceeds half of `A`'s.
    pub fn heavy_path(&self, tree: &TernaryTree, a: NodeId) -> Vec<NodeId> {
        let w = self.weight[a];
        let mut path = vec![a];
        let mut cur = a;
        while let Some(ch) = tree.children(cur) {
            match [ch[0], ch[2]].into_iter().find(|&c| 2 * self.weight[c] > w) {
                Some(c) => {
                    path.push(c);
                    cur = c;
                }
                None => break,
            }
        }
        path
    }

    pub fn halving_depth(&self, tree: &TernaryTree, a: NodeId) -> usize {
        self.heavy_path(tree, a).len()
    }
}

/// Per-round instrumentation of the balancing loop.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoundStats {
    pub rotations: usize,
    /// Subtrees rooted at depth divisible by 3 that were checked.
    pub checks: usize,
    /// Checks with `hd(Y) > (2 hd(X) + 5) / 3`.
    pub violations: usize,
    /// Largest `hd(Y) - (2 hd(X) + 5) / 3` seen.
    pub worst_slack: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BalanceReport {
    pub rounds: Vec<RoundStats>,
}

impl BalanceReport {
    pub fn violations(&self) -> usize {
        self.rounds.iter().map(|r| r.violations).sum()
    }
}

fn rotation_gates(tree: &TernaryTree, path: &[NodeId]) -> (Vec<Gate>, NodeId) {
    let q = |id: NodeId| tree.qubit(id).unwrap();
    let (a, a1, a2) = (path[0], path[1], path[2]);
    let first = tree.branch_of(a1).unwrap();
    let second = tree.branch_of(a2).unwrap();
    match (first, second) {
        (Branch::Left, Branch::Left) => (vec![Gate::Cnot(q(a1), q(a))], a1),
        (Branch::Right, Branch::Right) => (vec![Gate::Cnot(q(a), q(a1))], a1),
        (Branch::Left, Branch::Right) => (
            vec![Gate::Cnot(q(a1), q(a2)), Gate::Cnot(q(a2), q(a))],
            a2,
        ),
        (Branch::Right, Branch::Left) => (
            vec![Gate::Cnot(q(a2), q(a1)), Gate::Cnot(q(a), q(a2))],
            a2,
        ),
        _ => unreachable!("heavy paths follow left and right children"),
    }
}

fn round_limit(n: usize) -> usize {
    4 * n + 64
}

/// Heavy-path balancing of the binary view hanging at `slot`; appends gates to `out`.
fn balance_at(
    tree: &mut TernaryTree,
    slot: Slot,
    out: &mut Circuit,
    report: &mut BalanceReport,
) -> TransformResult<()> {
    let limit = round_limit(tree.num_qubits());
    let mut info = HeavyPathInfo::new(tree, tree.node_at(slot));
    for _ in 0..limit {
        let hd: Vec<(NodeId, usize)> = info
            .view()
            .iter()
            .map(|&id| (id, info.halving_depth(tree, id)))
            .collect();
        if hd.iter().all(|&(_, h)| h < BALANCE_GUARD) {
            return Ok(());
        }
        let mut stats = RoundStats::default();
        // (top after the round, halving depth before)
        let mut tracked = Vec::new();
        let mut gates = Vec::new();
        for &(id, h) in hd.iter().filter(|(id, _)| info.depth(*id) % 3 == 0) {
            let mut new_top = id;
            if h >= ROTATE_THRESHOLD {
                let path = info.heavy_path(tree, id);
                let (g, top) = rotation_gates(tree, &path);
                gates.extend(g);
                new_top = top;
                stats.rotations += 1;
            }
            tracked.push((new_top, h));
        }
        for g in &gates {
            tree.apply_gate_in_place(g)?;
            out.push(g.clone());
        }
        info = HeavyPathInfo::new(tree, tree.node_at(slot));
        for (y, d) in tracked {
            let bound = (2.0 * d as f64 + 5.0) / 3.0;
            let slack = info.halving_depth(tree, y) as f64 - bound;
            stats.checks += 1;
            if slack > 1e-9 {
                stats.violations += 1;
            }
            stats.worst_slack = if stats.checks == 1 {
                slack
            } else {
                stats.worst_slack.max(slack)
            };
        }
        report.rounds.push(stats);
    }
    Err(TransformError::RoundLimit(limit))
}

/// Rotates every left subtree onto the right spine below `slot`, one CNOT layer
/// per iteration. Returns the number of layers.
fn flatten_at(tree: &mut TernaryTree, slot: Slot, out: &mut Circuit) -> TransformResult<usize> {
    let mut layers = 0;
    loop {
        let mut layer = Vec::new();
        let mut cur = tree.node_at(slot);
        while let Some(ch) = tree.children(cur) {
            if let Some(j) = tree.qubit(ch[0]) {
                layer.push(Gate::Cnot(j, tree.qubit(cur).unwrap()));
            }
            cur = ch[2];
        }
        if layer.is_empty() {
            return Ok(layers);
        }
        for g in layer {
            tree.apply_gate_in_place(&g)?;
            out.push(g);
        }
        layers += 1;
    }
}

pub fn flatten_to_spine(tree: &TernaryTree) -> TransformResult<(Circuit, TernaryTree)> {
    if !tree.is_binary_shaped() {
        return Err(TransformError::NotBinaryShaped);
    }
    let mut t = tree.clone();
    let mut c = Circuit::new(t.num_qubits());
    flatten_at(&mut t, Slot::Root, &mut c)?;
    Ok((c, t))
}

pub fn balance_binary(tree: &TernaryTree) -> TransformResult<(Circuit, TernaryTree)> {
    let (c, t, _) = balance_binary_instrumented(tree)?;
    Ok((c, t))
}

pub fn balance_binary_instrumented(
    tree: &TernaryTree,
) -> TransformResult<(Circuit, TernaryTree, BalanceReport)> {
    if !tree.is_binary_shaped() {
        return Err(TransformError::NotBinaryShaped);
    }
    let mut t = tree.clone();
    let mut c = Circuit::new(t.num_qubits());
    let mut report = BalanceReport::default();
    balance_at(&mut t, Slot::Root, &mut c, &mut report)?;
    Ok((c, t, report))
}

/// CNOT and S circuit turning any ternary tree into a right spine.
///
/// Binary views at the root and at every non-leaf middle child are balanced
/// and flattened independently, S moves each middle spine into the left slot,
/// and the now binary-shaped tree is balanced and flattened once more.
pub fn ternary_to_jw_shape(tree: &TernaryTree) -> TransformResult<(Circuit, TernaryTree)> {
    let mut t = tree.clone();
    let mut c = Circuit::new(t.num_qubits());
    let mut report = BalanceReport::default();
    let middle_owners = |t: &TernaryTree| -> Vec<NodeId> {
        (0..t.num_qubits())
            .map(|q| t.node_of_qubit(q))
            .filter(|&id| !t.is_leaf(t.child(id, Branch::Middle).unwrap()))
            .collect()
    };
    let mut slots = vec![Slot::Root];
    slots.extend(middle_owners(&t).into_iter().map(|id| Slot::Child(id, Branch::Middle)));
    for slot in slots {
        balance_at(&mut t, slot, &mut c, &mut report)?;
        flatten_at(&mut t, slot, &mut c)?;
    }
    for id in middle_owners(&t) {
        let g = Gate::S(t.qubit(id).unwrap());
        t.apply_gate_in_place(&g)?;
        c.push(g);
    }
    debug_assert!(t.is_binary_shaped());
    balance_at(&mut t, Slot::Root, &mut c, &mut report)?;
    flatten_at(&mut t, Slot::Root, &mut c)?;
    Ok((c, t))
}

/// A circuit taking an encoding exactly onto Jordan-Wigner up to a mode permutation.
#[derive(Debug, Clone)]
pub struct JwFrame {
    /// Satisfies `C φ_tree = φ_JW U_σ` including global phase.
    pub circuit: Circuit,
    /// `sigma(k)` is the Jordan-Wigner position that mode `k` lands on.
    pub sigma: Permutation,
}

fn phase_gadget(phase: Phase) -> Vec<Gate> {
    match phase {
        Phase::I => vec![Gate::X(0), Gate::S(0), Gate::X(0), Gate::S(0)],
        Phase::MINUS_ONE => vec![Gate::X(0), Gate::Z(0), Gate::X(0), Gate::Z(0)],
        Phase::MINUS_I => vec![Gate::X(0), Gate::Sdg(0), Gate::X(0), Gate::Sdg(0)],
        _ => vec![],
    }
}

pub fn jw_frame(tree: &TernaryTree) -> TransformResult<JwFrame> {
    let n = tree.num_qubits();
    let (mut c, mut t) = ternary_to_jw_shape(tree)?;

    // relabel the spine to 0..n with two SWAP layers
    let spine = t.right_spine();
    let mut relabel = vec![0; n];
    for (pos, &q) in spine.iter().enumerate() {
        relabel[q] = pos;
    }
    let relabel = Permutation::new(relabel).expect("spine visits every qubit once");
    let (first, second) = relabel.two_involutions();
    for inv in [first, second] {
        for (a, b) in inv.transpositions().unwrap() {
            let g = Gate::Swap(a, b);
            t.apply_gate_in_place(&g)?;
            c.push(g);
        }
    }

    // each mode's pair must sit on the left and middle leaves of one spine node
    let mut sigma = vec![usize::MAX; n];
    let mut braided = Vec::new();
    for pos in 0..n {
        let node = t.node_of_qubit(pos);
        let leaf = |b| t.majorana(t.child(node, b).unwrap()).unwrap();
        let (gl, gm) = (leaf(Branch::Left), leaf(Branch::Middle));
        if gl / 2 != gm / 2 || gl / 2 >= n {
            return Err(TransformError::NotProductPreserving(format!(
                "qubit {pos} carries Majoranas {gl} and {gm}, not one mode's pair"
            )));
        }
        sigma[gl / 2] = pos;
        if gl % 2 == 1 {
            braided.push(pos);
        }
    }
    let sigma = Permutation::new(sigma).expect("pairs cover all modes");
    for q in braided {
        let g = Gate::S(q);
        t.apply_gate_in_place(&g)?;
        c.push(g);
    }

    // flip signs with a Pauli built from the offending Majorana images
    let strings = tree.majorana_strings();
    let mut batch = PauliBatch::new(n, &strings).expect("lengths agree");
    batch.conjugate_through(&c).expect("tree circuits are Clifford");
    let images = batch.to_strings();
    let mut flips: Vec<usize> = (0..2 * n)
        .filter(|&g| images[g].phase() == Phase::MINUS_ONE)
        .collect();
    if flips.len() % 2 == 1 {
        flips.push(2 * n);
    }
    let mut fix = PauliString::identity(n);
    for g in flips {
        fix = fix.try_mul(&images[g]).expect("lengths agree");
    }
    for (q, l) in fix.letters().iter().enumerate() {
        if l.x() {
            c.push(Gate::X(q));
        }
        if l.z() {
            c.push(Gate::Z(q));
        }
    }

    // global phase: C^{-1}|0> = λ|b>, so λC sends |b> to |0>
    let mut bits = vec![false; n];
    let lambda = c
        .inverse()
        .apply_to_basis(&mut bits)
        .expect("tree circuits are monomial");
    for g in phase_gadget(lambda) {
        c.push(g);
    }
    Ok(JwFrame { circuit: c, sigma })
}

/// Circuit `C` with `C φ_src = φ_dst`: every mode operator and the vacuum
/// are carried over exactly. Gates are CNOT, S, Sdg, SWAP, X and Z only.
pub fn transform_between(src: &TernaryTree, dst: &TernaryTree) -> TransformResult<Circuit> {
    let n = src.num_qubits();
    if dst.num_qubits() != n {
        return Err(TransformError::SizeMismatch {
            src: n,
            dst: dst.num_qubits(),
        });
    }
    let from = jw_frame(src)?;
    let to = jw_frame(dst)?;
    let route = synthesize_permutation(&from.sigma.inverse().then(&to.sigma));
    let mut c = from.circuit;
    c.append(&route).expect("sizes agree");
    c.append(&to.circuit.inverse()).expect("sizes agree");
    Ok(c.expand_macros().lower_cz())
}
