//! TSLD-resolution: SLD-resolution driven by typed unification.
//!
//! A derivation step on the selected atom has three possible results. A
//! most general unifier gives the usual resolvent. A `false` unification
//! drops the selected atom, keeps the rest of the query unchanged and sets
//! the query's false marker, because a later atom may still produce
//! `wrong`. A `wrong` unification halts the derivation.

mod diagnose;
mod export;
mod solve;
mod tree;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{rename_apart, Clause, ClauseId, PredAtom, Program, Query, Substitution};
use crate::unify::{typed_unify_atoms, UnificationOutcome};

pub use diagnose::{diagnose_program, diagnose_query, generic_query, Diagnosis, Verdict};
pub use export::{to_dot, tree_from_json, tree_to_json, EdgeDocument, ImportError, NodeDocument, TreeDocument};
pub use solve::{format_answer, solve, SolveResult, Solutions};
pub use tree::{
    blamed_clauses, build_tree, classify, Branch, NodeId, NodeKind, Terminal, TreeClassification, TreeConfig, TreeEdge,
    TreeNode, TsldTree,
};

pub const DEFAULT_DEPTH_BOUND: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("cannot select an atom from an empty query")]
    EmptyQuery,
    #[error("no clause {0} in the program")]
    UnknownClause(ClauseId),
    #[error("clause {clause} is not applicable to `{atom}`")]
    NotApplicable { clause: ClauseId, atom: String },
    #[error("derivation needs more clause choices after {0} steps")]
    ChoicesExhausted(usize),
    #[error("derivation ended after {used} steps but {given} clause choices were given")]
    UnusedChoices { used: usize, given: usize },
    #[error("resultants are only defined for unifying steps")]
    NotProgress,
}

/// Which atom of a query is resolved next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelectionRule {
    #[default]
    Leftmost,
    Rightmost,
}

impl SelectionRule {
    pub fn select(self, q: &Query) -> Result<usize, EngineError> {
        if q.atoms.is_empty() {
            return Err(EngineError::EmptyQuery);
        }
        Ok(match self {
            SelectionRule::Leftmost => 0,
            SelectionRule::Rightmost => q.atoms.len() - 1,
        })
    }
}

/// Index of the atom chosen by the leftmost selection rule. The false
/// marker is not an atom and is never selected.
pub fn select_atom(q: &Query) -> Result<usize, EngineError> {
    SelectionRule::Leftmost.select(q)
}

/// Clauses whose head has the atom's predicate symbol and arity, in
/// program order.
pub fn applicable_clauses(p: &Program, a: &PredAtom) -> Vec<ClauseId> {
    p.clauses.iter().filter(|c| c.head.same_predicate(a)).map(|c| c.id).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Progress { next: Query, clause: ClauseId, mgu: Substitution },
    /// Typed unification returned `false`: the selected atom is removed,
    /// the clause body is not inserted and no substitution is applied.
    FalseProgress { next: Query, clause: ClauseId },
    WrongHalt { clause: ClauseId },
    NoApplicableClause,
}

impl StepResult {
    pub fn clause(&self) -> Option<ClauseId> {
        match self {
            StepResult::Progress { clause, .. }
            | StepResult::FalseProgress { clause, .. }
            | StepResult::WrongHalt { clause } => Some(*clause),
            StepResult::NoApplicableClause => None,
        }
    }
}

/// Resolves atom `idx` of `q` with an already renamed clause.
pub(crate) fn resolve_with(q: &Query, idx: usize, renamed: &Clause) -> StepResult {
    let selected = &q.atoms[idx];
    // Head first, so a variable-variable equation binds the clause variable.
    let (outcome, _) = typed_unify_atoms(&renamed.head, selected);
    match outcome {
        UnificationOutcome::Mgu(mgu) => {
            let atoms: Vec<PredAtom> = q.atoms[..idx]
                .iter()
                .chain(renamed.body.iter())
                .chain(q.atoms[idx + 1..].iter())
                .map(|a| mgu.apply_atom(a))
                .collect();
            StepResult::Progress {
                next: Query { atoms, false_marker: q.false_marker },
                clause: renamed.id,
                mgu,
            }
        }
        UnificationOutcome::False => {
            let atoms = q.atoms[..idx].iter().chain(q.atoms[idx + 1..].iter()).cloned().collect();
            StepResult::FalseProgress { next: Query { atoms, false_marker: true }, clause: renamed.id }
        }
        UnificationOutcome::Wrong => StepResult::WrongHalt { clause: renamed.id },
    }
}

/// Names a renamed clause must not reuse on a branch: the variables of the
/// current query, of the root query, and of the partial answer (kept
/// restricted to the root variables). Names outside this set are dead.
pub(crate) fn branch_avoid(q: &Query, root_vars: &[String], answer: &Substitution) -> BTreeSet<String> {
    let mut avoid: BTreeSet<String> = q.vars().into_iter().collect();
    avoid.extend(root_vars.iter().cloned());
    avoid.extend(answer.all_vars());
    avoid
}

/// One step on atom `idx`, renaming the clause apart from `avoid`. The
/// renamed clause's variables are added to `avoid`.
pub(crate) fn step_at(
    p: &Program,
    q: &Query,
    idx: usize,
    clause: ClauseId,
    avoid: &mut BTreeSet<String>,
) -> Result<StepResult, EngineError> {
    let c = p.clause(clause).ok_or(EngineError::UnknownClause(clause))?;
    let selected = &q.atoms[idx];
    if !c.head.same_predicate(selected) {
        return Err(EngineError::NotApplicable { clause, atom: selected.to_string() });
    }
    let renamed = rename_apart(c, avoid);
    avoid.extend(renamed.vars());
    Ok(resolve_with(q, idx, &renamed))
}

/// A single TSLD-derivation step on the leftmost atom of `q` with the given
/// input clause, renamed apart from the variables of `q`.
pub fn tsld_step(p: &Program, q: &Query, clause: ClauseId) -> Result<StepResult, EngineError> {
    let idx = select_atom(q)?;
    let mut avoid: BTreeSet<String> = q.vars().into_iter().collect();
    step_at(p, q, idx, clause, &mut avoid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationOutcome {
    /// Reached `□`; carries the computed answer restricted to the
    /// variables of the initial query.
    Success(Substitution),
    Failed,
    Erroneous,
    DepthExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub initial: Query,
    /// Each query together with the step taken from it.
    pub steps: Vec<(Query, StepResult)>,
    pub outcome: DerivationOutcome,
}

impl Derivation {
    /// `Q0 ⟹ Q1 ⟹ … ⟹ end`.
    pub fn render(&self) -> String {
        let mut out = self.initial.to_string();
        for (_, step) in &self.steps {
            out.push_str(" ⟹ ");
            match step {
                StepResult::Progress { next, .. } | StepResult::FalseProgress { next, .. } => {
                    out.push_str(&next.to_string())
                }
                StepResult::WrongHalt { .. } => out.push_str("wrong"),
                StepResult::NoApplicableClause => out.push_str("false"),
            }
        }
        out
    }
}

/// Follows the given clause choices from `q` under the leftmost selection
/// rule until `□`, `false`, `wrong` or the depth bound.
///
/// Every choice must be used; a choice that is not applicable, running out
/// of choices, or leftover choices are errors.
pub fn derive(p: &Program, q: &Query, choices: &[ClauseId], depth_bound: usize) -> Result<Derivation, EngineError> {
    let query_vars = q.vars();
    let mut answer = Substitution::new();
    let mut current = q.clone();
    let mut steps = Vec::new();
    let mut remaining = choices.iter();
    let outcome = loop {
        if current.is_success() {
            break DerivationOutcome::Success(answer);
        }
        if current.is_failure() {
            break DerivationOutcome::Failed;
        }
        if steps.len() >= depth_bound {
            break DerivationOutcome::DepthExceeded;
        }
        let idx = select_atom(&current)?;
        if applicable_clauses(p, &current.atoms[idx]).is_empty() {
            steps.push((current.clone(), StepResult::NoApplicableClause));
            break DerivationOutcome::Failed;
        }
        let Some(&clause) = remaining.next() else {
            return Err(EngineError::ChoicesExhausted(steps.len()));
        };
        let mut avoid = branch_avoid(&current, &query_vars, &answer);
        let step = step_at(p, &current, idx, clause, &mut avoid)?;
        let next = match &step {
            StepResult::Progress { next, mgu, .. } => {
                answer = answer.then(mgu).restrict(&query_vars);
                Some(next.clone())
            }
            StepResult::FalseProgress { next, .. } => Some(next.clone()),
            StepResult::WrongHalt { .. } | StepResult::NoApplicableClause => None,
        };
        steps.push((current.clone(), step));
        match next {
            Some(n) => current = n,
            None => break DerivationOutcome::Erroneous,
        }
    };
    let used = steps.iter().filter(|(_, s)| s.clause().is_some()).count();
    if used < choices.len() {
        return Err(EngineError::UnusedChoices { used, given: choices.len() });
    }
    Ok(Derivation { initial: q.clone(), steps, outcome })
}

/// `θ(Q1) ← Q2` for a step `Q1 ⟹ Q2` with mgu `θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resultant {
    pub head: Query,
    pub body: Query,
}

impl std::fmt::Display for Resultant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ← {}", self.head, self.body)
    }
}

/// One resultant per step. Only defined for derivations made entirely of
/// unifying steps.
pub fn resultants(d: &Derivation) -> Result<Vec<Resultant>, EngineError> {
    d.steps
        .iter()
        .map(|(q, step)| match step {
            StepResult::Progress { next, mgu, .. } => Ok(Resultant { head: mgu.apply_query(q), body: next.clone() }),
            _ => Err(EngineError::NotProgress),
        })
        .collect()
}
