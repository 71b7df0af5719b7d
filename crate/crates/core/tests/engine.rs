mod common;

use std::collections::BTreeSet;

use common::{canonical, random_program, random_query, reference_sld, rng, ProgramShape};
use tsld_core::engine::{
    blamed_clauses, build_tree, classify, derive, diagnose_program, DerivationOutcome, NodeKind, SelectionRule,
    Solutions, Terminal, TreeClassification, TreeConfig, TsldTree,
};
use tsld_core::syntax::{Program, Query};

const DEPTH: usize = 12;

fn config(selection: SelectionRule) -> TreeConfig {
    TreeConfig { depth_bound: DEPTH, max_nodes: 20_000, selection }
}

fn answer_set(p: &Program, q: &Query, selection: SelectionRule) -> BTreeSet<String> {
    Solutions::new(p, q, config(selection)).map(|a| canonical(&a.apply_query(q))).collect()
}

fn samples(seed: u64, n: usize, shape: ProgramShape) -> Vec<(Program, Query)> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let p = random_program(&mut r, shape);
            let q = random_query(&mut r, shape, &p);
            (p, q)
        })
        .collect()
}

const MIXED: ProgramShape = ProgramShape { single_type: false, functors: true };
const UNIFORM: ProgramShape = ProgramShape { single_type: true, functors: true };

fn check_structure(t: &TsldTree) {
    assert_eq!(t.edge_count() + 1, t.len());
    for (id, node) in t.nodes().iter().enumerate() {
        for e in &node.edges {
            assert!(e.target > id);
            assert_eq!(t.node(e.target).parent, Some(id));
            assert_eq!(t.node(e.target).depth, node.depth + 1);
        }
        match &node.kind {
            NodeKind::Query { .. } => assert!(!node.edges.is_empty() || node.depth == 0 && t.len() == 1),
            _ => assert!(node.edges.is_empty()),
        }
    }
    let leaves = t.leaf_terminals();
    let class = classify(t);
    assert_eq!(class == TreeClassification::Successful, leaves.contains(&Terminal::Success));
    if class == TreeClassification::FinitelyErroneous {
        assert!(leaves.iter().all(|l| *l == Terminal::Wrong));
    }
    assert!(blamed_clauses(t).is_subset(&t.used_clauses()));
}

#[test]
fn tree_structure_invariants() {
    for (p, q) in samples(10, 300, MIXED) {
        let t = build_tree(&p, &q, &config(SelectionRule::Leftmost));
        check_structure(&t);
        let g = build_tree(&p, &tsld_core::engine::generic_query(&p), &config(SelectionRule::Leftmost));
        check_structure(&g);
    }
}

#[test]
fn branches_replay_as_derivations() {
    for (p, q) in samples(11, 200, MIXED) {
        let t = build_tree(&p, &q, &config(SelectionRule::Leftmost));
        for leaf in t.leaves() {
            let end = t.node(leaf).kind.terminal().unwrap();
            if end == Terminal::Depth {
                continue;
            }
            let d = derive(&p, &q, &t.path_clauses(leaf), DEPTH)
                .unwrap_or_else(|e| panic!("{p:?} {q}: {e}"));
            let ok = match (&d.outcome, end) {
                (DerivationOutcome::Success(a), Terminal::Success) => *a == t.answer_at(leaf),
                (DerivationOutcome::Failed, Terminal::False) => true,
                (DerivationOutcome::Erroneous, Terminal::Wrong) => true,
                _ => false,
            };
            assert!(ok, "{q}: {} vs {end}", d.render());
        }
    }
}

#[test]
fn lazy_answers_match_the_tree() {
    for (p, q) in samples(12, 200, MIXED) {
        let t = build_tree(&p, &q, &config(SelectionRule::Leftmost));
        let tree_answers: Vec<String> = t.answers().iter().map(|a| canonical(&a.apply_query(&q))).collect();
        let lazy: Vec<String> =
            Solutions::new(&p, &q, config(SelectionRule::Leftmost)).map(|a| canonical(&a.apply_query(&q))).collect();
        assert_eq!(tree_answers, lazy, "{q}");
    }
}

#[test]
fn wrong_free_trees_agree_with_untyped_resolution() {
    let mut compared = 0;
    for (p, q) in samples(13, 400, UNIFORM) {
        let t = build_tree(&p, &q, &config(SelectionRule::Leftmost));
        if t.contains_terminal(Terminal::Wrong) || t.contains_terminal(Terminal::Depth) {
            continue;
        }
        let Some(reference) = reference_sld(&p, &q, DEPTH) else { continue };
        assert_eq!(answer_set(&p, &q, SelectionRule::Leftmost), reference, "{q}");
        compared += 1;
    }
    assert!(compared >= 100, "{compared}");
}

#[test]
fn success_does_not_depend_on_the_selection_rule() {
    let mut compared = 0;
    for (p, q) in samples(14, 300, MIXED) {
        let left = build_tree(&p, &q, &config(SelectionRule::Leftmost));
        let right = build_tree(&p, &q, &config(SelectionRule::Rightmost));
        if left.contains_terminal(Terminal::Depth) || right.contains_terminal(Terminal::Depth) {
            continue;
        }
        compared += 1;
        assert_eq!(
            answer_set(&p, &q, SelectionRule::Leftmost),
            answer_set(&p, &q, SelectionRule::Rightmost),
            "{q}"
        );
    }
    assert!(compared >= 100, "{compared}");
}

#[test]
fn trees_are_deterministic() {
    for (p, q) in samples(15, 50, MIXED) {
        let c = config(SelectionRule::Leftmost);
        assert_eq!(build_tree(&p, &q, &c), build_tree(&p, &q, &c));
        assert_eq!(diagnose_program(&p, &c), diagnose_program(&p, &c));
    }
}
