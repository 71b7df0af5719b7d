//! Tree serialization.
//!
//! The JSON document is a flat list of nodes in preorder:
//!
//! ```json
//! {"root": 0, "nodes": [
//!   {"id": 0, "kind": "query", "label": "p(1)", "atoms": ["p(1)"],
//!    "false_marker": false, "selected": 0, "depth": 0,
//!    "edges": [{"clause": "c1", "mgu": null, "target": 1}]},
//!   {"id": 1, "kind": "false", "label": "false", "depth": 1, "edges": []}
//! ]}
//! ```
//!
//! `kind` is one of `query`, `success`, `false`, `wrong`, `depth`. Query and
//! depth nodes carry `atoms` and `false_marker`; query nodes also carry
//! `selected`. An edge's `mgu` maps variables to printed terms and is null
//! unless typed unification produced an mgu.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tree::{NodeId, NodeKind, TreeEdge, TreeNode, TsldTree};
use crate::syntax::{parse_atom, parse_term, ClauseId, Query, Substitution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub root: NodeId,
    pub nodes: Vec<NodeDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDocument {
    pub id: NodeId,
    pub kind: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub false_marker: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<usize>,
    pub depth: usize,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub clause: ClauseId,
    pub mgu: Option<BTreeMap<String, String>>,
    pub target: NodeId,
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid tree document: {0}")]
    Invalid(String),
}

fn kind_name(kind: &NodeKind) -> &'static str {
    match kind {
        NodeKind::Query { .. } => "query",
        NodeKind::Success => "success",
        NodeKind::False => "false",
        NodeKind::Wrong => "wrong",
        NodeKind::Depth(_) => "depth",
    }
}

impl TreeDocument {
    pub fn from_tree(t: &TsldTree) -> TreeDocument {
        let nodes = t
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, n)| {
                let query = n.kind.query();
                NodeDocument {
                    id,
                    kind: kind_name(&n.kind).into(),
                    label: n.kind.label(),
                    atoms: query.map(|q| q.atoms.iter().map(|a| a.to_string()).collect()),
                    false_marker: query.map(|q| q.false_marker),
                    selected: match &n.kind {
                        NodeKind::Query { selected, .. } => Some(*selected),
                        _ => None,
                    },
                    depth: n.depth,
                    edges: n
                        .edges
                        .iter()
                        .map(|e| EdgeDocument {
                            clause: e.clause,
                            mgu: e.mgu.as_ref().map(|m| m.iter().map(|(v, t)| (v.clone(), t.to_string())).collect()),
                            target: e.target,
                        })
                        .collect(),
                }
            })
            .collect();
        TreeDocument { root: t.root(), nodes }
    }

    pub fn to_tree(&self) -> Result<TsldTree, ImportError> {
        let invalid = |m: String| ImportError::Invalid(m);
        if self.nodes.is_empty() || self.root != 0 {
            return Err(invalid("the root must be node 0".into()));
        }
        let mut parents: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(invalid(format!("node at position {i} has id {}", n.id)));
            }
            for e in &n.edges {
                if e.target <= i || e.target >= self.nodes.len() || parents[e.target].is_some() {
                    return Err(invalid(format!("bad edge {i} -> {}", e.target)));
                }
                parents[e.target] = Some(i);
            }
        }
        if parents.iter().skip(1).any(Option::is_none) {
            return Err(invalid("unreachable node".into()));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let query = || -> Result<Query, ImportError> {
                let atoms = n.atoms.as_ref().ok_or_else(|| invalid(format!("node {i} lacks atoms")))?;
                let atoms = atoms
                    .iter()
                    .map(|a| parse_atom(a).map_err(|e| invalid(format!("node {i}: {e}"))))
                    .collect::<Result<_, _>>()?;
                Ok(Query { atoms, false_marker: n.false_marker.unwrap_or(false) })
            };
            let kind = match n.kind.as_str() {
                "query" => NodeKind::Query {
                    query: query()?,
                    selected: n.selected.ok_or_else(|| invalid(format!("node {i} lacks selected")))?,
                },
                "depth" => NodeKind::Depth(query()?),
                "success" => NodeKind::Success,
                "false" => NodeKind::False,
                "wrong" => NodeKind::Wrong,
                other => return Err(invalid(format!("unknown node kind `{other}`"))),
            };
            if kind.terminal().is_some() && !n.edges.is_empty() {
                return Err(invalid(format!("terminal node {i} has edges")));
            }
            let mut edges = Vec::with_capacity(n.edges.len());
            for e in &n.edges {
                let mgu = match &e.mgu {
                    None => None,
                    Some(m) => Some(
                        m.iter()
                            .map(|(v, t)| {
                                parse_term(t).map(|t| (v.clone(), t)).map_err(|e| invalid(format!("node {i}: {e}")))
                            })
                            .collect::<Result<Substitution, _>>()?,
                    ),
                };
                edges.push(TreeEdge { clause: e.clause, mgu, target: e.target });
            }
            nodes.push(TreeNode { kind, depth: n.depth, parent: parents[i], edges });
        }
        Ok(TsldTree::from_nodes(nodes))
    }
}

pub fn tree_to_json(t: &TsldTree) -> String {
    serde_json::to_string_pretty(&TreeDocument::from_tree(t)).expect("tree documents serialize")
}

pub fn tree_from_json(s: &str) -> Result<TsldTree, ImportError> {
    serde_json::from_str::<TreeDocument>(s)?.to_tree()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: boxes for queries, a double circle for `□`, an
/// octagon for `wrong`, plain text for `false` and dashed boxes for
/// unexpanded queries. Edges are labelled with clause ids.
pub fn to_dot(t: &TsldTree) -> String {
    let mut out = String::from("digraph tsld {\n");
    for (id, n) in t.nodes().iter().enumerate() {
        let style = match n.kind {
            NodeKind::Query { .. } => "shape=box",
            NodeKind::Success => "shape=doublecircle",
            NodeKind::Wrong => "shape=octagon",
            NodeKind::False => "shape=plaintext",
            NodeKind::Depth(_) => "shape=box, style=dashed",
        };
        let _ = writeln!(out, "  n{id} [label=\"{}\", {style}];", dot_escape(&n.kind.label()));
    }
    for (id, n) in t.nodes().iter().enumerate() {
        for e in &n.edges {
            let _ = writeln!(out, "  n{id} -> n{} [label=\"{}\"];", e.target, e.clause);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_tree, TreeConfig};
    use crate::syntax::{parse_program, parse_query};

    fn tree(program: &str, query: &str) -> TsldTree {
        build_tree(&parse_program(program).unwrap(), &parse_query(query).unwrap(), &TreeConfig::default())
    }

    #[test]
    fn mixed_type_tree_dot() {
        let dot = to_dot(&tree("p(0).\np(1).\np(a).", "p(1)."));
        assert_eq!(dot.matches("[label=").count(), 7);
        assert_eq!(dot.matches(" -> ").count(), 3);
        assert!(dot.contains("n0 [label=\"p(1)\", shape=box];"));
        assert!(dot.contains("n1 [label=\"false\", shape=plaintext];"));
        assert!(dot.contains("n2 [label=\"□\", shape=doublecircle];"));
        assert!(dot.contains("n3 [label=\"wrong\", shape=octagon];"));
        assert!(dot.contains("n0 -> n2 [label=\"c2\"];"));
    }

    #[test]
    fn dot_escapes_strings() {
        let dot = to_dot(&tree("s(\"a\\\"b\").", "s(\"a\\\"b\")."));
        assert!(dot.contains(r#"n0 [label="s(\"a\\\"b\")", shape=box];"#));
    }

    #[test]
    fn json_round_trip() {
        for (p, q) in [
            ("p(0).\np(1).\np(a).", "p(1)."),
            ("p(1).\np(2).\nq(1).\nq(a).\nr(X) :- p(X), q(X).", "r(Y)."),
            ("n(z).\nn(s(X)) :- n(X).", "n(\"x\"),n(1.5)."),
            ("n(X) :- n(f(X)).", "n(A)."),
        ] {
            let t = tree(p, q);
            let back = tree_from_json(&tree_to_json(&t)).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn json_rejects_malformed_documents() {
        assert!(tree_from_json("{").is_err());
        assert!(tree_from_json(r#"{"root":0,"nodes":[]}"#).is_err());
        let bad_edge = r#"{"root":0,"nodes":[{"id":0,"kind":"wrong","label":"wrong","depth":0,
            "edges":[{"clause":"c1","mgu":null,"target":0}]}]}"#;
        assert!(tree_from_json(bad_edge).is_err());
    }
}
