use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::fixpoint::tp_fixpoint;
use super::pool::{Bounds, ValuePool};
use super::typing::{find_context_exists, is_ill_typed_program, is_ill_typed_query, models_of_program, TypeVerdict};
use super::{domain_match, domain_of, ground_tuple, term_domain, Context, Expression, SemDomain};
use crate::engine::{diagnose_program, diagnose_query, resultants, solve, Derivation, EngineError, TreeClassification, TreeConfig, Verdict};
use crate::syntax::{ClauseId, PredAtom, PredKey, Program, Query};

/// How the per-position domain comparison in the blamed-clause check is
/// read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaReading {
    /// Some argument position has differing domains.
    #[default]
    Differs,
    /// Some argument position has equal domains.
    Equals,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LemmaError {
    #[error("no clause {0} in the program")]
    UnknownClause(ClauseId),
    #[error("clause {0} is not blamed")]
    NotBlamed(ClauseId),
}

/// Whether the body atom `a` satisfies the blamed-clause condition against every
/// atom of its predicate in the fixpoint.
///
/// Under `Differs`, some state equalising all domains exists exactly when
/// the arguments can be matched against the atom's domain tuple. Under
/// `Equals`, a state can make every position containing a variable differ,
/// so only ground positions can be forced equal.
fn atom_condition(a: &PredAtom, fixpoint: &[&PredAtom], reading: LemmaReading) -> bool {
    fixpoint.iter().all(|s| {
        let domains: Vec<SemDomain> = ground_tuple(s).expect("ground").iter().map(domain_of).collect();
        match reading {
            LemmaReading::Differs => {
                let mut ctx = Context::new();
                !a.args.iter().zip(&domains).all(|(t, d)| domain_match(t, d, &mut ctx))
            }
            LemmaReading::Equals => a
                .args
                .iter()
                .zip(&domains)
                .any(|(t, d)| t.is_ground() && term_domain(t, &Context::new()).as_ref() == Some(d)),
        }
    })
}

/// Checks that some body atom of the blamed clause can never agree in
/// domains with any atom of the least fixpoint.
pub fn check_lemma_blamed_clause(
    p: &Program,
    blamed: ClauseId,
    reading: LemmaReading,
    bounds: &Bounds,
    config: &TreeConfig,
) -> Result<bool, LemmaError> {
    let clause = p.clause(blamed).ok_or(LemmaError::UnknownClause(blamed))?;
    if !diagnose_program(p, config).blamed.contains(&blamed) {
        return Err(LemmaError::NotBlamed(blamed));
    }
    let pool = ValuePool::for_program(p, bounds);
    let s = tp_fixpoint(p, &pool, bounds);
    Ok(clause.body.iter().any(|a| {
        let same: Vec<&PredAtom> = s.atoms.iter().filter(|x| x.same_predicate(a)).collect();
        atom_condition(a, &same, reading)
    }))
}

/// Every enumerated model of the program models every resultant of the
/// derivation, each in a context of its own.
pub fn check_resultant_soundness(p: &Program, d: &Derivation, bounds: &Bounds) -> Result<bool, EngineError> {
    let rs = resultants(d)?;
    let mut pool = ValuePool::for_program(p, bounds);
    let mut extra = BTreeSet::new();
    for r in &rs {
        pool.add_query(&r.head);
        pool.add_query(&r.body);
        extra.extend(r.head.atoms.iter().chain(&r.body.atoms).map(PredAtom::key));
    }
    let (_, models, _) = models_of_program(p, &extra, &pool, bounds);
    Ok(models.iter().all(|m| {
        rs.iter()
            .all(|r| find_context_exists(&Expression::Resultant(r.clone()), &m.interpretation, &pool, bounds))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub classification: TreeClassification,
    pub answers: Vec<String>,
    pub models: usize,
    pub engine_program: Verdict,
    pub engine_query: Verdict,
    pub semantic_program: TypeVerdict,
    pub semantic_query: TypeVerdict,
    pub truncated: bool,
    pub violations: Vec<String>,
}

impl SoundnessReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs the engine and the semantic checkers on `p` and `q` and lists any
/// case where they disagree: a computed answer not modelled by some model
/// of the program, or an engine type error that the declarative side calls
/// well-typed.
pub fn check_soundness_theorem(p: &Program, q: &Query, bounds: &Bounds, config: &TreeConfig) -> SoundnessReport {
    const MAX_ANSWERS: usize = 16;
    let solved = solve(p, q, config, MAX_ANSWERS);
    let mut pool = ValuePool::for_program(p, bounds);
    pool.add_query(q);
    let extra: BTreeSet<PredKey> = q.atoms.iter().map(PredAtom::key).collect();
    let (_, models, models_truncated) = models_of_program(p, &extra, &pool, bounds);
    let mut violations = Vec::new();
    for theta in &solved.answers {
        let instance = theta.apply_query(q);
        pool.add_query(&instance);
        for m in &models {
            if !find_context_exists(&Expression::Query(instance.clone()), &m.interpretation, &pool, bounds) {
                violations.push(format!("answer {theta}: {} does not model {instance}", m.interpretation));
            }
        }
    }
    let engine_program = diagnose_program(p, config).verdict;
    let engine_query = diagnose_query(p, q, config).verdict;
    let program_check = is_ill_typed_program(p, bounds);
    let query_check = is_ill_typed_query(p, q, bounds);
    if engine_program == Verdict::TypeErrorInProgram && program_check.verdict == TypeVerdict::WellTyped {
        violations.push("engine reports a type error in the program but the program is well-typed".into());
    }
    if engine_query == Verdict::TypeErrorInQuery && query_check.verdict == TypeVerdict::WellTyped {
        violations.push("engine reports a type error in the query but the query is well-typed".into());
    }
    SoundnessReport {
        classification: solved.classification,
        answers: solved.answers.iter().map(|a| a.to_string()).collect(),
        models: models.len(),
        engine_program,
        engine_query,
        semantic_program: program_check.verdict,
        semantic_query: query_check.verdict,
        truncated: models_truncated || program_check.truncated || query_check.truncated,
        violations,
    }
}
