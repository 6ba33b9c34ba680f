//! Ternary-tree fermion encodings and the tree action of CNOT, SWAP and S gates.
//!
//! Parents carry qubit labels `0..N`, leaves carry Majorana labels `0..=2N`.
//! Mode `k` uses leaves `2k` and `2k+1`; leaf `2N` is redundant.

use std::fmt;

use serde_json::Value;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::pauli::{ModeOperator, Pauli, PauliString};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("invalid tree: {0}")]
    Invalid(String),
    #[error("{gate} does not act on this tree: {reason}")]
    GateNotApplicable { gate: String, reason: String },
    #[error("tree with {n} qubits exceeds the oracle limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("bad tree JSON: {0}")]
    Json(String),
}

pub type TreeResult<T> = Result<T, TreeError>;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Left,
    Middle,
    Right,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Left, Branch::Middle, Branch::Right];

    fn idx(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> Pauli {
        match self {
            Branch::Left => Pauli::X,
            Branch::Middle => Pauli::Y,
            Branch::Right => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Parent { qubit: usize, children: [NodeId; 3] },
    Leaf { majorana: usize },
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    parent: Option<NodeId>,
}

/// Where a subtree hangs: the root position or a child slot of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Root,
    Child(NodeId, Branch),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    JordanWigner,
    Parity,
    BravyiKitaev,
}

impl std::str::FromStr for StandardKind {
    type Err = TreeError;

    fn from_str(s: &str) -> TreeResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jw" | "jordan-wigner" => Ok(StandardKind::JordanWigner),
            "parity" => Ok(StandardKind::Parity),
            "bk" | "bravyi-kitaev" => Ok(StandardKind::BravyiKitaev),
            _ => Err(TreeError::Invalid(format!("unknown encoding {s:?}"))),
        }
    }
}

/// Internal nodes of a binary tree; `None` children are leaves.
#[derive(Debug, Clone)]
pub struct BinaryShape {
    pub root: Option<usize>,
    pub children: Vec<[Option<usize>; 2]>,
}

#[derive(Debug, Clone)]
pub struct TernaryTree {
    nodes: Vec<Node>,
    root: NodeId,
    qubit_node: Vec<NodeId>,
    leaf_node: Vec<NodeId>,
}

/// Arena builder; nodes are created bottom-up and checked by `finish`.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, majorana: usize) -> NodeId {
        self.nodes.push(Node {
            kind: NodeKind::Leaf { majorana },
            parent: None,
        });
        self.nodes.len() - 1
    }

    pub fn parent(&mut self, qubit: usize, l: NodeId, m: NodeId, r: NodeId) -> NodeId {
        let id = self.nodes.len();
        for c in [l, m, r] {
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(Node {
            kind: NodeKind::Parent {
                qubit,
                children: [l, m, r],
            },
            parent: None,
        });
        id
    }

    pub fn finish(self, root: NodeId) -> TreeResult<TernaryTree> {
        let bad = |m: String| Err(TreeError::Invalid(m));
        if root >= self.nodes.len() || self.nodes[root].parent.is_some() {
            return bad("root is missing or has a parent".into());
        }
        let parents = self
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Parent { .. }))
            .count();
        let leaves = self.nodes.len() - parents;
        if leaves != 2 * parents + 1 {
            return bad(format!("{parents} parents but {leaves} leaves"));
        }
        let mut qubit_node = vec![usize::MAX; parents];
        let mut leaf_node = vec![usize::MAX; leaves];
        let mut reached = 0usize;
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            reached += 1;
            match self.nodes[id].kind {
                NodeKind::Parent { qubit, children } => {
                    if qubit >= parents || qubit_node[qubit] != usize::MAX {
                        return bad(format!("qubit label {qubit} invalid or repeated"));
                    }
                    qubit_node[qubit] = id;
                    for c in children {
                        if self.nodes[c].parent != Some(id) {
                            return bad("child shared between parents".into());
                        }
                        stack.push(c);
                    }
                }
                NodeKind::Leaf { majorana } => {
                    if majorana >= leaves || leaf_node[majorana] != usize::MAX {
                        return bad(format!("leaf label {majorana} invalid or repeated"));
                    }
                    leaf_node[majorana] = id;
                }
            }
            if reached > self.nodes.len() {
                return bad("cycle".into());
            }
        }
        if reached != self.nodes.len() {
            return bad("unreachable nodes".into());
        }
        Ok(TernaryTree {
            nodes: self.nodes,
            root,
            qubit_node,
            leaf_node,
        })
    }
}

impl TernaryTree {
    /// Binary-shaped tree from `shape`: middle children are leaves, qubits are
    /// labeled in inorder and leaves left to right.
    pub fn from_binary_shape(shape: &BinaryShape) -> TreeResult<Self> {
        let n = shape.children.len();
        let Some(root) = shape.root else {
            return Err(TreeError::Invalid("a tree needs at least one qubit".into()));
        };
        // inorder numbering of internal nodes
        let mut qubit = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        let mut cur = Some(root);
        while cur.is_some() || !stack.is_empty() {
            while let Some(c) = cur {
                stack.push(c);
                cur = shape.children[c][0];
            }
            let c = stack.pop().unwrap();
            if qubit[c] != usize::MAX {
                return Err(TreeError::Invalid("shape is not a tree".into()));
            }
            qubit[c] = next;
            next += 1;
            cur = shape.children[c][1];
        }
        if next != n {
            return Err(TreeError::Invalid("unreachable shape nodes".into()));
        }
        // leaves numbered in depth-first L, M, R order
        let mut b = TreeBuilder::new();
        let mut leaf_count = 0;
        enum Frame {
            Enter(Option<usize>),
            Exit(usize, usize),
        }
        let mut built: Vec<NodeId> = Vec::new();
        let mut frames = vec![Frame::Enter(Some(root))];
        while let Some(f) = frames.pop() {
            match f {
                Frame::Enter(None) => {
                    built.push(b.leaf(leaf_count));
                    leaf_count += 1;
                }
                Frame::Enter(Some(c)) => {
                    let base = built.len();
                    frames.push(Frame::Exit(c, base));
                    frames.push(Frame::Enter(shape.children[c][1]));
                    frames.push(Frame::Enter(None));
                    frames.push(Frame::Enter(shape.children[c][0]));
                }
                Frame::Exit(c, base) => {
                    let r = built.pop().unwrap();
                    let m = built.pop().unwrap();
                    let l = built.pop().unwrap();
                    debug_assert_eq!(built.len(), base);
                    built.push(b.parent(qubit[c], l, m, r));
                }
            }
        }
        b.finish(built[0])
    }

    pub fn standard(kind: StandardKind, n: usize) -> TreeResult<Self> {
        if n == 0 {
            return Err(TreeError::Invalid("a tree needs at least one qubit".into()));
        }
        let mut children = vec![[None, None]; n];
        let root = match kind {
            StandardKind::JordanWigner => {
                for (i, c) in children.iter_mut().enumerate().take(n - 1) {
                    c[1] = Some(i + 1);
                }
                0
            }
            StandardKind::Parity => {
                for (i, c) in children.iter_mut().enumerate().take(n - 1) {
                    c[0] = Some(i + 1);
                }
                0
            }
            StandardKind::BravyiKitaev => {
                // Fenwick shape: the root of [lo, hi) is the index with the
                // largest lowbit(i + 1).
                fn build(lo: usize, hi: usize, ch: &mut [[Option<usize>; 2]]) -> Option<usize> {
                    if lo >= hi {
                        return None;
                    }
                    let r = (lo..hi).max_by_key(|&i| (i + 1) & (i + 1).wrapping_neg())?;
                    ch[r] = [build(lo, r, ch), build(r + 1, hi, ch)];
                    Some(r)
                }
                build(0, n, &mut children).unwrap()
            }
        };
        TernaryTree::from_binary_shape(&BinaryShape {
            root: Some(root),
            children,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_node.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id].kind
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: NodeId) -> Option<[NodeId; 3]> {
        match self.nodes[id].kind {
            NodeKind::Parent { children, .. } => Some(children),
            NodeKind::Leaf { .. } => None,
        }
    }

    pub fn child(&self, id: NodeId, b: Branch) -> Option<NodeId> {
        self.children(id).map(|c| c[b.idx()])
    }

    pub fn qubit(&self, id: NodeId) -> Option<usize> {
        match self.nodes[id].kind {
            NodeKind::Parent { qubit, .. } => Some(qubit),
            NodeKind::Leaf { .. } => None,
        }
    }

    pub fn majorana(&self, id: NodeId) -> Option<usize> {
        match self.nodes[id].kind {
            NodeKind::Leaf { majorana } => Some(majorana),
            NodeKind::Parent { .. } => None,
        }
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        matches!(self.nodes[id].kind, NodeKind::Leaf { .. })
    }

    pub fn node_of_qubit(&self, q: usize) -> NodeId {
        self.qubit_node[q]
    }

    pub fn node_of_leaf(&self, g: usize) -> NodeId {
        self.leaf_node[g]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Which child slot of its parent `id` occupies.
    pub fn branch_of(&self, id: NodeId) -> Option<Branch> {
        let p = self.nodes[id].parent?;
        let ch = self.children(p).unwrap();
        Branch::ALL.into_iter().find(|b| ch[b.idx()] == id)
    }

    pub fn slot_of(&self, id: NodeId) -> Slot {
        match self.nodes[id].parent {
            None => Slot::Root,
            Some(p) => Slot::Child(p, self.branch_of(id).unwrap()),
        }
    }

    pub fn node_at(&self, slot: Slot) -> NodeId {
        match slot {
            Slot::Root => self.root,
            Slot::Child(p, b) => self.child(p, b).expect("slot owner is a parent"),
        }
    }

    /// Parent nodes reachable from `top` through left and right children only.
    pub fn binary_view(&self, top: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![top];
        while let Some(id) = stack.pop() {
            if let Some(ch) = self.children(id) {
                out.push(id);
                stack.push(ch[2]);
                stack.push(ch[0]);
            }
        }
        out
    }

    pub fn is_binary_shaped(&self) -> bool {
        self.binary_view(self.root).len() == self.num_qubits()
    }

    /// Qubit labels of the binary view below `top`, in inorder.
    pub fn inorder_qubits(&self, top: NodeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        let mut cur = Some(top).filter(|&t| !self.is_leaf(t));
        while cur.is_some() || !stack.is_empty() {
            while let Some(c) = cur {
                stack.push(c);
                cur = self.child(c, Branch::Left).filter(|&l| !self.is_leaf(l));
            }
            let c = stack.pop().unwrap();
            out.push(self.qubit(c).unwrap());
            cur = self.child(c, Branch::Right).filter(|&r| !self.is_leaf(r));
        }
        out
    }

    /// Qubit labels along the right spine from the root.
    pub fn right_spine(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.root;
        while let Some(q) = self.qubit(cur) {
            out.push(q);
            cur = self.child(cur, Branch::Right).unwrap();
        }
        out
    }

    pub fn is_jw_shaped(&self) -> bool {
        self.right_spine().len() == self.num_qubits()
    }

    /// Edge depth of every node from the root.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if let Some(ch) = self.children(id) {
                for c in ch {
                    d[c] = d[id] + 1;
                    stack.push(c);
                }
            }
        }
        d
    }

    /// Largest root-to-leaf edge count.
    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Root-to-leaf Pauli strings in Majorana-label order, all with phase +1.
    pub fn majorana_strings(&self) -> Vec<PauliString> {
        let n = self.num_qubits();
        self.leaf_node
            .iter()
            .map(|&leaf| {
                let mut p = PauliString::identity(n);
                let mut cur = leaf;
                while let Some(par) = self.nodes[cur].parent {
                    let b = self.branch_of(cur).unwrap();
                    p.set_letter(self.qubit(par).unwrap(), b.letter());
                    cur = par;
                }
                p
            })
            .collect()
    }

    /// Mode operators from Majorana pairs `(2k, 2k+1)`; the last leaf is dropped.
    pub fn mode_operators(&self) -> Vec<ModeOperator> {
        let mut strings = self.majorana_strings();
        strings.pop();
        let mut it = strings.into_iter();
        let mut out = Vec::with_capacity(self.num_qubits());
        while let (Some(plus_part), Some(minus_part)) = (it.next(), it.next()) {
            out.push(ModeOperator {
                plus_part,
                minus_part,
            });
        }
        out
    }

    fn set_child(&mut self, p: NodeId, b: Branch, c: NodeId) {
        if let NodeKind::Parent { children, .. } = &mut self.nodes[p].kind {
            children[b.idx()] = c;
        }
        self.nodes[c].parent = Some(p);
    }

    /// Puts `new` where `old` hung.
    fn replace_in_slot(&mut self, old: NodeId, new: NodeId) {
        match self.nodes[old].parent {
            None => {
                self.root = new;
                self.nodes[new].parent = None;
            }
            Some(p) => {
                let b = self.branch_of(old).unwrap();
                self.set_child(p, b, new);
            }
        }
    }

    fn not_applicable(gate: &Gate, reason: impl Into<String>) -> TreeError {
        TreeError::GateNotApplicable {
            gate: gate.to_string(),
            reason: reason.into(),
        }
    }

    pub fn apply_gate_in_place(&mut self, gate: &Gate) -> TreeResult<()> {
        gate.validate(self.num_qubits())
            .map_err(|e| Self::not_applicable(gate, e.to_string()))?;
        match *gate {
            Gate::Swap(a, b) => {
                let (na, nb) = (self.qubit_node[a], self.qubit_node[b]);
                for (id, q) in [(na, b), (nb, a)] {
                    if let NodeKind::Parent { qubit, .. } = &mut self.nodes[id].kind {
                        *qubit = q;
                    }
                }
                self.qubit_node.swap(a, b);
            }
            Gate::S(k) | Gate::Sdg(k) => {
                let id = self.qubit_node[k];
                if let NodeKind::Parent { children, .. } = &mut self.nodes[id].kind {
                    children.swap(0, 1);
                }
            }
            Gate::X(_) | Gate::Z(_) => {}
            Gate::Cnot(j, k) => {
                let (nj, nk) = (self.qubit_node[j], self.qubit_node[k]);
                let kc = self.children(nk).unwrap();
                let jc = self.children(nj).unwrap();
                if kc[0] == nj {
                    // j is the left child of k: j moves up, k keeps (C, D, E)
                    self.replace_in_slot(nk, nj);
                    self.set_child(nk, Branch::Left, jc[2]);
                    self.set_child(nj, Branch::Right, nk);
                } else if jc[2] == nk {
                    // k is the right child of j: the inverse rotation
                    self.replace_in_slot(nj, nk);
                    self.set_child(nj, Branch::Right, kc[0]);
                    self.set_child(nk, Branch::Left, nj);
                } else {
                    return Err(Self::not_applicable(
                        gate,
                        "control is neither the left child of the target nor its parent via a right edge",
                    ));
                }
            }
            _ => {
                return Err(Self::not_applicable(
                    gate,
                    "only SWAP, CNOT rotations, S/Sdg, X and Z act on trees",
                ))
            }
        }
        Ok(())
    }

    pub fn apply_gate(&self, gate: &Gate) -> TreeResult<TernaryTree> {
        let mut t = self.clone();
        t.apply_gate_in_place(gate)?;
        Ok(t)
    }

    pub fn apply_circuit(&self, c: &Circuit) -> TreeResult<TernaryTree> {
        let mut t = self.clone();
        for g in c.gates() {
            t.apply_gate_in_place(g)?;
        }
        Ok(t)
    }

    /// Oracle check that every Fock basis state maps to a computational basis state.
    pub fn is_product_preserving(&self, n_max_check: usize) -> TreeResult<bool> {
        let n = self.num_qubits();
        let limit = n_max_check.min(crate::oracle::ENCODER_MAX_MODES);
        if n > limit {
            return Err(TreeError::TooLarge { n, limit });
        }
        let u = crate::oracle::encoder_unitary(self).map_err(|e| TreeError::Oracle(e.to_string()))?;
        Ok(crate::oracle::is_monomial(&u, 1e-10))
    }

    pub fn to_json(&self) -> String {
        enum Tok {
            Node(NodeId),
            Text(&'static str),
        }
        let mut out = String::new();
        let mut stack = vec![Tok::Node(self.root)];
        while let Some(t) = stack.pop() {
            match t {
                Tok::Text(s) => out.push_str(s),
                Tok::Node(id) => match self.nodes[id].kind {
                    NodeKind::Leaf { majorana } => out.push_str(&format!("{{\"g\":{majorana}}}")),
                    NodeKind::Parent { qubit, children } => {
                        out.push_str(&format!("{{\"q\":{qubit},\"L\":"));
                        stack.push(Tok::Text("}"));
                        stack.push(Tok::Node(children[2]));
                        stack.push(Tok::Text(",\"R\":"));
                        stack.push(Tok::Node(children[1]));
                        stack.push(Tok::Text(",\"M\":"));
                        stack.push(Tok::Node(children[0]));
                    }
                },
            }
        }
        out
    }

    pub fn from_json(text: &str) -> TreeResult<TernaryTree> {
        let owned = text.to_string();
        // Deeply nested documents are parsed and dropped on a large stack.
        std::thread::Builder::new()
            .stack_size(1 << 28)
            .spawn(move || {
                let mut de = serde_json::Deserializer::from_str(&owned);
                de.disable_recursion_limit();
                let value: Value = serde::Deserialize::deserialize(&mut de)
                    .map_err(|e| TreeError::Json(e.to_string()))?;
                de.end().map_err(|e| TreeError::Json(e.to_string()))?;
                Self::from_value(&value)
            })
            .map_err(|e| TreeError::Json(e.to_string()))?
            .join()
            .map_err(|_| TreeError::Json("parser thread panicked".into()))?
    }

    fn from_value(root: &Value) -> TreeResult<TernaryTree> {
        let field = |v: &Value, k: &str| -> TreeResult<usize> {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| TreeError::Json(format!("missing integer field {k:?}")))
        };
        let mut b = TreeBuilder::new();
        let mut built: Vec<NodeId> = Vec::new();
        enum Frame<'a> {
            Enter(&'a Value),
            Exit(usize),
        }
        let mut frames = vec![Frame::Enter(root)];
        while let Some(f) = frames.pop() {
            match f {
                Frame::Enter(v) => {
                    let obj = v
                        .as_object()
                        .ok_or_else(|| TreeError::Json("node is not an object".into()))?;
                    if obj.contains_key("g") {
                        if obj.len() != 1 {
                            return Err(TreeError::Json("leaf has extra fields".into()));
                        }
                        built.push(b.leaf(field(v, "g")?));
                    } else {
                        if obj.len() != 4 {
                            return Err(TreeError::Json("parent needs q, L, M, R".into()));
                        }
                        frames.push(Frame::Exit(field(v, "q")?));
                        for k in ["R", "M", "L"] {
                            let c = obj
                                .get(k)
                                .ok_or_else(|| TreeError::Json(format!("missing child {k}")))?;
                            frames.push(Frame::Enter(c));
                        }
                    }
                }
                Frame::Exit(q) => {
                    let r = built.pop().unwrap();
                    let m = built.pop().unwrap();
                    let l = built.pop().unwrap();
                    built.push(b.parent(q, l, m, r));
                }
            }
        }
        b.finish(built[0])
    }
}

impl PartialEq for TernaryTree {
    /// Structural equality of labeled trees, independent of arena layout.
    fn eq(&self, other: &Self) -> bool {
        if self.nodes.len() != other.nodes.len() {
            return false;
        }
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            match (self.nodes[a].kind, other.nodes[b].kind) {
                (NodeKind::Leaf { majorana: x }, NodeKind::Leaf { majorana: y }) if x == y => {}
                (
                    NodeKind::Parent {
                        qubit: p,
                        children: ca,
                    },
                    NodeKind::Parent {
                        qubit: q,
                        children: cb,
                    },
                ) if p == q => stack.extend(ca.into_iter().zip(cb)),
                _ => return false,
            }
        }
        true
    }
}

impl Eq for TernaryTree {}

impl fmt::Display for TernaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}
