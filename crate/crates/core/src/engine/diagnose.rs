use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tree::{blamed_clauses, build_tree, classify, Branch, TreeClassification, TreeConfig};
use crate::syntax::{ClauseId, PredAtom, Program, Query, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    TypeErrorInProgram,
    TypeErrorInQuery,
    NoTypeError,
    UnknownDepthBounded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TypeErrorInProgram => "TYPE_ERROR_IN_PROGRAM",
            Verdict::TypeErrorInQuery => "TYPE_ERROR_IN_QUERY",
            Verdict::NoTypeError => "NO_TYPE_ERROR",
            Verdict::UnknownDepthBounded => "UNKNOWN_DEPTH_BOUNDED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub verdict: Verdict,
    pub blamed: BTreeSet<ClauseId>,
    /// The query whose tree was examined last.
    pub query: String,
    pub classification: TreeClassification,
    /// For a program error, the branches through blamed clauses; for a
    /// query error, every branch of the query tree.
    pub evidence: Vec<Branch>,
}

/// One atom `p(X1,…,Xn)` per head predicate in order of first occurrence,
/// with pairwise distinct variables numbered across the whole query.
pub fn generic_query(p: &Program) -> Query {
    let mut next = 0usize;
    let atoms = p
        .head_predicates()
        .into_iter()
        .map(|key| {
            let args = (0..key.arity)
                .map(|_| {
                    next += 1;
                    Term::var(format!("X{next}"))
                })
                .collect();
            PredAtom::new(key.name, args)
        })
        .collect();
    Query::new(atoms)
}

pub fn diagnose_program(p: &Program, config: &TreeConfig) -> Diagnosis {
    let q = generic_query(p);
    let tree = build_tree(p, &q, config);
    let classification = classify(&tree);
    let blamed = blamed_clauses(&tree);
    let verdict = if !blamed.is_empty() {
        Verdict::TypeErrorInProgram
    } else if classification == TreeClassification::DepthBounded {
        Verdict::UnknownDepthBounded
    } else {
        Verdict::NoTypeError
    };
    let evidence = tree
        .leaves()
        .filter(|&l| tree.path_clauses(l).iter().any(|c| blamed.contains(c)))
        .map(|l| tree.branch(l))
        .collect();
    Diagnosis { verdict, blamed, query: q.to_string(), classification, evidence }
}

/// A program type error takes precedence over any verdict on the query.
pub fn diagnose_query(p: &Program, q: &Query, config: &TreeConfig) -> Diagnosis {
    let program = diagnose_program(p, config);
    if program.verdict == Verdict::TypeErrorInProgram {
        return program;
    }
    let tree = build_tree(p, q, config);
    let classification = classify(&tree);
    let verdict = match (program.verdict, classification) {
        (Verdict::UnknownDepthBounded, _) | (_, TreeClassification::DepthBounded) => Verdict::UnknownDepthBounded,
        (_, TreeClassification::FinitelyErroneous) => Verdict::TypeErrorInQuery,
        _ => Verdict::NoTypeError,
    };
    let evidence = if verdict == Verdict::TypeErrorInQuery { tree.branches() } else { Vec::new() };
    Diagnosis { verdict, blamed: BTreeSet::new(), query: q.to_string(), classification, evidence }
}
