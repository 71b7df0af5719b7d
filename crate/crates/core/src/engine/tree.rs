use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{applicable_clauses, branch_avoid, step_at, SelectionRule, StepResult, DEFAULT_DEPTH_BOUND};
use crate::syntax::{ClauseId, Program, Query, Substitution};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeConfig {
    /// Maximum number of resolution steps on a branch.
    pub depth_bound: usize,
    /// Expansion stops once this many nodes exist; the remaining frontier
    /// becomes depth terminals.
    pub max_nodes: usize,
    pub selection: SelectionRule,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { depth_bound: DEFAULT_DEPTH_BOUND, max_nodes: 200_000, selection: SelectionRule::Leftmost }
    }
}

impl TreeConfig {
    pub fn with_depth(depth_bound: usize) -> TreeConfig {
        TreeConfig { depth_bound, ..TreeConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    /// The empty query `□`.
    Success,
    False,
    Wrong,
    /// Expansion stopped at the depth bound or node budget.
    Depth,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::Success => "□",
            Terminal::False => "false",
            Terminal::Wrong => "wrong",
            Terminal::Depth => "depth",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Query { query: Query, selected: usize },
    Success,
    False,
    Wrong,
    /// An unexpanded query.
    Depth(Query),
}

impl NodeKind {
    pub fn terminal(&self) -> Option<Terminal> {
        match self {
            NodeKind::Query { .. } => None,
            NodeKind::Success => Some(Terminal::Success),
            NodeKind::False => Some(Terminal::False),
            NodeKind::Wrong => Some(Terminal::Wrong),
            NodeKind::Depth(_) => Some(Terminal::Depth),
        }
    }

    pub fn query(&self) -> Option<&Query> {
        match self {
            NodeKind::Query { query, .. } | NodeKind::Depth(query) => Some(query),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub clause: ClauseId,
    /// Present when typed unification produced an mgu.
    pub mgu: Option<Substitution>,
    pub target: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub depth: usize,
    pub parent: Option<NodeId>,
    pub edges: Vec<TreeEdge>,
}

/// A TSLD-tree stored as an arena. Node ids follow a depth-first preorder
/// with children in clause order; the root is node 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsldTree {
    pub(crate) nodes: Vec<TreeNode>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TreeClassification {
    Successful,
    FinitelyErroneous,
    FinitelyFailed,
    DepthBounded,
}

impl fmt::Display for TreeClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeClassification::Successful => "SUCCESSFUL",
            TreeClassification::FinitelyErroneous => "FINITELY_ERRONEOUS",
            TreeClassification::FinitelyFailed => "FINITELY_FAILED",
            TreeClassification::DepthBounded => "DEPTH_BOUNDED",
        })
    }
}

/// A root-to-leaf path: node labels and the clauses between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub nodes: Vec<String>,
    pub clauses: Vec<ClauseId>,
    pub end: Terminal,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, label) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, " ⟹_{} ", self.clauses[i - 1])?;
            }
            f.write_str(label)?;
        }
        Ok(())
    }
}

impl NodeKind {
    /// Text shown for the node: the query, or `□`, `false`, `wrong`.
    /// Unexpanded queries end in `…`.
    pub fn label(&self) -> String {
        match self {
            NodeKind::Query { query, .. } => query.to_string(),
            NodeKind::Depth(query) => format!("{query} …"),
            NodeKind::Success => "□".into(),
            NodeKind::False => "false".into(),
            NodeKind::Wrong => "wrong".into(),
        }
    }
}

impl TsldTree {
    pub fn from_nodes(nodes: Vec<TreeNode>) -> TsldTree {
        assert!(!nodes.is_empty(), "a tree has a root");
        TsldTree { nodes }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.edges.len()).sum()
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = &TreeEdge> {
        self.nodes[id].edges.iter()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].kind.terminal().is_some())
    }

    pub fn leaf_terminals(&self) -> Vec<Terminal> {
        self.leaves().filter_map(|i| self.nodes[i].kind.terminal()).collect()
    }

    pub fn contains_terminal(&self, t: Terminal) -> bool {
        self.nodes.iter().any(|n| n.kind.terminal() == Some(t))
    }

    /// Clause ids labelling at least one edge.
    pub fn used_clauses(&self) -> BTreeSet<ClauseId> {
        self.nodes.iter().flat_map(|n| n.edges.iter().map(|e| e.clause)).collect()
    }

    /// Clause labels from the root down to `leaf`.
    pub fn path_clauses(&self, leaf: NodeId) -> Vec<ClauseId> {
        let mut out = Vec::new();
        let mut cur = leaf;
        while let Some(parent) = self.nodes[cur].parent {
            let e = self.nodes[parent].edges.iter().find(|e| e.target == cur).expect("parent links child");
            out.push(e.clause);
            cur = parent;
        }
        out.reverse();
        out
    }

    pub fn branch(&self, leaf: NodeId) -> Branch {
        let mut ids = vec![leaf];
        let mut cur = leaf;
        while let Some(parent) = self.nodes[cur].parent {
            ids.push(parent);
            cur = parent;
        }
        ids.reverse();
        Branch {
            nodes: ids.iter().map(|&i| self.nodes[i].kind.label()).collect(),
            clauses: self.path_clauses(leaf),
            end: self.nodes[leaf].kind.terminal().expect("branch ends at a leaf"),
        }
    }

    pub fn branches(&self) -> Vec<Branch> {
        self.leaves().map(|l| self.branch(l)).collect()
    }

    /// Composition of the mgus from the root to `node`, restricted to the
    /// root query's variables.
    pub fn answer_at(&self, node: NodeId) -> Substitution {
        let vars = self.nodes[0].kind.query().map(|q| q.vars()).unwrap_or_default();
        let mut mgus = Vec::new();
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            let e = self.nodes[parent].edges.iter().find(|e| e.target == cur).expect("parent links child");
            if let Some(m) = &e.mgu {
                mgus.push(m);
            }
            cur = parent;
        }
        mgus.iter().rev().fold(Substitution::new(), |acc, m| acc.then(m).restrict(&vars))
    }

    /// Computed answers of the `□` leaves in preorder, restricted to the
    /// root query's variables.
    pub fn answers(&self) -> Vec<Substitution> {
        self.leaves()
            .filter(|&l| self.nodes[l].kind == NodeKind::Success)
            .map(|l| self.answer_at(l))
            .collect()
    }
}

struct Pending {
    parent: Option<(NodeId, ClauseId, Option<Substitution>)>,
    kind: PendingKind,
    depth: usize,
    answer: Substitution,
}

enum PendingKind {
    Query(Query),
    Wrong,
}

/// Expands the whole TSLD-tree of `q`, depth first and in clause order.
pub fn build_tree(p: &Program, q: &Query, config: &TreeConfig) -> TsldTree {
    let root_vars = q.vars();
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut stack = vec![Pending {
        parent: None,
        kind: PendingKind::Query(q.clone()),
        depth: 0,
        answer: Substitution::new(),
    }];
    while let Some(item) = stack.pop() {
        let id = nodes.len();
        let parent = item.parent.as_ref().map(|(pid, _, _)| *pid);
        if let Some((pid, clause, mgu)) = item.parent {
            nodes[pid].edges.push(TreeEdge { clause, mgu, target: id });
        }
        let query = match item.kind {
            PendingKind::Wrong => {
                nodes.push(TreeNode { kind: NodeKind::Wrong, depth: item.depth, parent, edges: vec![] });
                continue;
            }
            PendingKind::Query(query) => query,
        };
        let leaf = |kind| TreeNode { kind, depth: item.depth, parent, edges: vec![] };
        if query.is_success() {
            nodes.push(leaf(NodeKind::Success));
            continue;
        }
        if query.is_failure() {
            nodes.push(leaf(NodeKind::False));
            continue;
        }
        if item.depth >= config.depth_bound || nodes.len() + stack.len() >= config.max_nodes {
            nodes.push(leaf(NodeKind::Depth(query)));
            continue;
        }
        let selected = config.selection.select(&query).expect("non-empty query");
        let clauses = applicable_clauses(p, &query.atoms[selected]);
        if clauses.is_empty() {
            nodes.push(leaf(NodeKind::False));
            continue;
        }
        let mut avoid = branch_avoid(&query, &root_vars, &item.answer);
        let mut children = Vec::with_capacity(clauses.len());
        for c in clauses {
            let step = step_at(p, &query, selected, c, &mut avoid).expect("applicable clause");
            let (mgu, kind) = match step {
                StepResult::Progress { next, mgu, .. } => (Some(mgu), PendingKind::Query(next)),
                StepResult::FalseProgress { next, .. } => (None, PendingKind::Query(next)),
                StepResult::WrongHalt { .. } => (None, PendingKind::Wrong),
                StepResult::NoApplicableClause => unreachable!("clause was applicable"),
            };
            let answer = match &mgu {
                Some(m) => item.answer.then(m).restrict(&root_vars),
                None => item.answer.clone(),
            };
            children.push((c, mgu, kind, answer));
        }
        nodes.push(TreeNode { kind: NodeKind::Query { query, selected }, depth: item.depth, parent, edges: vec![] });
        for (c, mgu, kind, answer) in children.into_iter().rev() {
            stack.push(Pending { parent: Some((id, c, mgu)), kind, depth: item.depth + 1, answer });
        }
    }
    TsldTree { nodes }
}

pub fn classify(t: &TsldTree) -> TreeClassification {
    let leaves = t.leaf_terminals();
    if leaves.contains(&Terminal::Success) {
        TreeClassification::Successful
    } else if leaves.contains(&Terminal::Depth) {
        TreeClassification::DepthBounded
    } else if leaves.iter().all(|&l| l == Terminal::Wrong) {
        TreeClassification::FinitelyErroneous
    } else {
        TreeClassification::FinitelyFailed
    }
}

/// Clauses used on at least one edge whose every branch ends in `wrong`.
/// Depth terminals count as not erroneous.
pub fn blamed_clauses(t: &TsldTree) -> BTreeSet<ClauseId> {
    // Children have larger ids than their parent, so a reverse scan sees
    // every subtree before its root.
    let mut all_wrong = vec![true; t.nodes.len()];
    for id in (0..t.nodes.len()).rev() {
        let n = &t.nodes[id];
        all_wrong[id] = match n.kind.terminal() {
            Some(term) => term == Terminal::Wrong,
            None => n.edges.iter().all(|e| all_wrong[e.target]),
        };
    }
    let mut blamed: BTreeMap<ClauseId, bool> = BTreeMap::new();
    for n in &t.nodes {
        for e in &n.edges {
            *blamed.entry(e.clause).or_insert(true) &= all_wrong[e.target];
        }
    }
    blamed.into_iter().filter(|&(_, w)| w).map(|(c, _)| c).collect()
}
