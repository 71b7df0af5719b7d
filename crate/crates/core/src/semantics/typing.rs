use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::fixpoint::{derived_interpretation, tp_fixpoint, AtomSet};
use super::pool::{product, Bounds, ValuePool};
use super::{
    domain_match, domain_of, eval_term, Context, Expression, Interpretation, PredInterp, SemDomain, SemValue, Signature, State, Truth,
};
use crate::kleene::TruthValue;
use crate::syntax::{ClauseId, PredAtom, PredKey, Program, Query, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TypeVerdict {
    IllTyped,
    WellTyped,
    Unknown,
}

impl fmt::Display for TypeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeVerdict::IllTyped => "ILL_TYPED",
            TypeVerdict::WellTyped => "WELL_TYPED",
            TypeVerdict::Unknown => "UNKNOWN",
        })
    }
}

/// An interpretation that models every clause, with the context used for
/// each clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgramModel {
    pub interpretation: Interpretation,
    #[serde(serialize_with = "serialize_clause_map")]
    pub contexts: BTreeMap<ClauseId, Context>,
}

fn serialize_clause_map<S: serde::Serializer>(m: &BTreeMap<ClauseId, Context>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
}

/// An expression that is not true in some state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<ClauseId>,
    pub expression: String,
    pub context: Context,
    pub state: State,
    pub value: TruthValue,
    pub interpretation: Interpretation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgramCheck {
    pub verdict: TypeVerdict,
    pub fixpoint: AtomSet,
    /// Some enumeration bound was hit.
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ProgramModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QueryCheck {
    pub verdict: TypeVerdict,
    pub truncated: bool,
    /// No interpretation models the program, so every query is ill-typed.
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ProgramModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_context: Option<Context>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

/// Contexts under which no atom evaluates to `wrong`: each atom's argument
/// domains must form a tuple of its predicate's signature. Variables left
/// unconstrained get the integer domain. The flag reports truncation at
/// `max` contexts.
pub fn clause_contexts(atoms: &[&PredAtom], vars: &[String], i: &Interpretation, max: usize) -> (Vec<Context>, bool) {
    fn go(
        atoms: &[&PredAtom],
        i: &Interpretation,
        ctx: Context,
        vars: &[String],
        out: &mut BTreeSet<Context>,
        max: usize,
    ) -> bool {
        let Some((first, rest)) = atoms.split_first() else {
            let mut full = ctx;
            for v in vars {
                full.entry(v.clone()).or_insert(SemDomain::Int);
            }
            out.insert(full);
            return out.len() < max;
        };
        match i.get(&first.key()) {
            None => true,
            Some(PredInterp { signature: Signature::Any, .. }) => go(rest, i, ctx, vars, out, max),
            Some(PredInterp { signature: Signature::Listed(tuples), .. }) => {
                for tuple in tuples {
                    let mut ext = ctx.clone();
                    if first.args.iter().zip(tuple).all(|(t, d)| domain_match(t, d, &mut ext))
                        && !go(rest, i, ext, vars, out, max)
                    {
                        return false;
                    }
                }
                true
            }
        }
    }
    let mut out = BTreeSet::new();
    let complete = go(atoms, i, Context::new(), vars, &mut out, max);
    (out.into_iter().collect(), !complete)
}

fn states(vars: &[String], ctx: &Context, pool: &ValuePool, max: usize) -> Option<Vec<State>> {
    let choices: Vec<Vec<SemValue>> = vars
        .iter()
        .map(|v| {
            let d = ctx.get(v).cloned().unwrap_or(SemDomain::Int);
            pool.values_of(&d).iter().map(|t| eval_term(t, &State::new()).expect("pool values are ground")).collect()
        })
        .collect();
    let count = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()))?;
    if count > max {
        return None;
    }
    Some(product(&choices, count).into_iter().map(|vals| vars.iter().cloned().zip(vals).collect()).collect())
}

enum StateCheck {
    Holds,
    Fails(State, TruthValue),
    Truncated,
}

fn check_states(e: &Expression, i: &Interpretation, ctx: &Context, pool: &ValuePool, max: usize) -> StateCheck {
    let vars = dedup(e.vars());
    let Some(all) = states(&vars, ctx, pool, max) else {
        return StateCheck::Truncated;
    };
    for s in all {
        let v = e.eval(i, &s).expect("states bind every variable");
        if v != TruthValue::True {
            return StateCheck::Fails(s, v);
        }
    }
    StateCheck::Holds
}

fn dedup(vars: Vec<String>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    vars.into_iter().filter(|v| seen.insert(v.clone())).collect()
}

/// Whether `i` is a model of `e` in `d`: every pool state complying with
/// `d` makes `e` true. Variables of `e` outside `d` make it false.
pub fn models(i: &Interpretation, e: &Expression, d: &Context, pool: &ValuePool) -> bool {
    let vars = dedup(e.vars());
    if vars.iter().any(|v| !d.contains_key(v)) {
        return false;
    }
    matches!(check_states(e, i, d, pool, usize::MAX), StateCheck::Holds)
}

enum ContextSearch {
    Found(Context),
    NotFound { context: Context, state: State, value: TruthValue },
    Truncated,
}

/// Looks for a context in which `i` models `e`.
fn find_context(e: &Expression, i: &Interpretation, pool: &ValuePool, bounds: &Bounds) -> ContextSearch {
    let vars = dedup(e.vars());
    let (candidates, mut truncated) = clause_contexts(&e.atoms(), &vars, i, bounds.max_contexts);
    let mut first_failure = None;
    for ctx in candidates {
        match check_states(e, i, &ctx, pool, bounds.max_states) {
            StateCheck::Holds => return ContextSearch::Found(ctx),
            StateCheck::Fails(state, value) => {
                first_failure.get_or_insert((ctx, state, value));
            }
            StateCheck::Truncated => truncated = true,
        }
    }
    if truncated {
        return ContextSearch::Truncated;
    }
    let (context, state, value) = first_failure.unwrap_or_else(|| {
        let ctx: Context = vars.iter().map(|v| (v.clone(), SemDomain::Int)).collect();
        let state: State = vars
            .iter()
            .filter_map(|v| {
                let t = pool.values_of(&SemDomain::Int).into_iter().next()?;
                Some((v.clone(), eval_term(&t, &State::new()).expect("pool values are ground")))
            })
            .collect();
        let value = e.eval(i, &state).expect("state binds every variable");
        (ctx, state, value)
    });
    ContextSearch::NotFound { context, state, value }
}

/// Whether some context makes `i` a model of `e`. Truncated searches
/// count as failures.
pub(crate) fn find_context_exists(e: &Expression, i: &Interpretation, pool: &ValuePool, bounds: &Bounds) -> bool {
    matches!(find_context(e, i, pool, bounds), ContextSearch::Found(_))
}

/// Result of enumerating the derived interpretations of a program.
pub(crate) struct ModelSearch {
    pub models: Vec<ProgramModel>,
    pub truncated: bool,
    pub violation: Option<Violation>,
}

fn program_predicates(p: &Program) -> BTreeSet<PredKey> {
    p.clauses.iter().flat_map(|c| c.atoms().map(PredAtom::key)).collect()
}

/// Every interpretation derived from `s` that models `p`. Predicates of
/// `p` or `extra` with no atom in `s` get the full signature and are
/// either true everywhere or false everywhere.
pub(crate) fn search_models(
    p: &Program,
    s: &AtomSet,
    extra: &BTreeSet<PredKey>,
    pool: &ValuePool,
    bounds: &Bounds,
) -> ModelSearch {
    let present = s.predicates();
    let free: Vec<PredKey> =
        program_predicates(p).union(extra).filter(|k| !present.contains(k)).cloned().collect();
    if free.len() > bounds.max_free_predicates {
        return ModelSearch { models: Vec::new(), truncated: true, violation: None };
    }
    let mut search = ModelSearch { models: Vec::new(), truncated: false, violation: None };
    let mut memo: HashMap<(usize, Vec<bool>), Option<Context>> = HashMap::new();
    for mask in 0u64..(1u64 << free.len()) {
        let choice: Vec<bool> = (0..free.len()).map(|b| mask & (1 << b) != 0).collect();
        let extra_interps: BTreeMap<PredKey, PredInterp> = free
            .iter()
            .zip(&choice)
            .map(|(k, &all)| {
                (k.clone(), PredInterp { signature: Signature::Any, truth: if all { Truth::All } else { Truth::none() } })
            })
            .collect();
        let interp = derived_interpretation(s, &extra_interps);
        let mut contexts = BTreeMap::new();
        let mut is_model = true;
        for (idx, c) in p.clauses.iter().enumerate() {
            let keys: BTreeSet<PredKey> = c.atoms().map(PredAtom::key).collect();
            let relevant: Vec<bool> =
                free.iter().zip(&choice).filter(|(k, _)| keys.contains(k)).map(|(_, &b)| b).collect();
            let cached = memo.get(&(idx, relevant.clone())).cloned();
            let found = match cached {
                Some(found) => found,
                None => {
                    let found = match find_context(&Expression::Clause(c.clone()), &interp, pool, bounds) {
                        ContextSearch::Found(ctx) => Some(ctx),
                        ContextSearch::Truncated => {
                            search.truncated = true;
                            None
                        }
                        ContextSearch::NotFound { context, state, value } => {
                            search.violation.get_or_insert(Violation {
                                clause: Some(c.id),
                                expression: c.to_string(),
                                context,
                                state,
                                value,
                                interpretation: interp.clone(),
                            });
                            None
                        }
                    };
                    memo.insert((idx, relevant), found.clone());
                    found
                }
            };
            match found {
                Some(ctx) => {
                    contexts.insert(c.id, ctx);
                }
                None => {
                    is_model = false;
                    break;
                }
            }
        }
        if is_model {
            search.models.push(ProgramModel { interpretation: interp, contexts });
        }
    }
    search
}

/// All enumerated models of `p`, with the fixpoint they derive from.
pub fn models_of_program(p: &Program, extra: &BTreeSet<PredKey>, pool: &ValuePool, bounds: &Bounds) -> (AtomSet, Vec<ProgramModel>, bool) {
    let s = tp_fixpoint(p, pool, bounds);
    let search = search_models(p, &s, extra, pool, bounds);
    let truncated = s.truncated || search.truncated;
    (s, search.models, truncated)
}

/// `ILL_TYPED` when no interpretation derived from the least fixpoint
/// models the program, each clause in a context of its own.
pub fn is_ill_typed_program(p: &Program, bounds: &Bounds) -> ProgramCheck {
    let pool = ValuePool::for_program(p, bounds);
    let s = tp_fixpoint(p, &pool, bounds);
    let search = search_models(p, &s, &BTreeSet::new(), &pool, bounds);
    let truncated = s.truncated || search.truncated;
    let witness = search.models.into_iter().next();
    let verdict = if s.truncated {
        TypeVerdict::Unknown
    } else if witness.is_some() {
        TypeVerdict::WellTyped
    } else if truncated {
        TypeVerdict::Unknown
    } else {
        TypeVerdict::IllTyped
    };
    let violation = if verdict == TypeVerdict::IllTyped { search.violation } else { None };
    ProgramCheck { verdict, fixpoint: s, truncated, witness, violation }
}

/// `ILL_TYPED` when every derived interpretation that models the program
/// fails to model the query. Query variables range over all states of the
/// chosen context.
pub fn is_ill_typed_query(p: &Program, q: &Query, bounds: &Bounds) -> QueryCheck {
    let mut pool = ValuePool::for_program(p, bounds);
    pool.add_query(q);
    let s = tp_fixpoint(p, &pool, bounds);
    let extra: BTreeSet<PredKey> = q.atoms.iter().map(PredAtom::key).collect();
    let search = search_models(p, &s, &extra, &pool, bounds);
    let mut truncated = s.truncated || search.truncated;
    let expr = Expression::Query(Query::new(q.atoms.clone()));
    let mut violation = None;
    let mut result = QueryCheck {
        verdict: TypeVerdict::Unknown,
        truncated,
        vacuous: false,
        witness: None,
        query_context: None,
        violation: None,
    };
    if s.truncated {
        return result;
    }
    let no_models = search.models.is_empty();
    for m in search.models {
        match find_context(&expr, &m.interpretation, &pool, bounds) {
            ContextSearch::Found(ctx) => {
                result.verdict = TypeVerdict::WellTyped;
                result.witness = Some(m);
                result.query_context = Some(ctx);
                return result;
            }
            ContextSearch::Truncated => truncated = true,
            ContextSearch::NotFound { context, state, value } => {
                violation.get_or_insert(Violation {
                    clause: None,
                    expression: expr.to_string(),
                    context,
                    state,
                    value,
                    interpretation: m.interpretation.clone(),
                });
            }
        }
    }
    result.truncated = truncated;
    if !truncated {
        result.verdict = TypeVerdict::IllTyped;
        result.vacuous = no_models;
        result.violation = violation;
    }
    result
}

fn truth_sets(i: &Interpretation, universe: &BTreeMap<PredKey, BTreeSet<Vec<SemValue>>>) -> (BTreeSet<(PredKey, Vec<SemValue>)>, BTreeSet<(PredKey, Vec<SemValue>)>) {
    let mut t = BTreeSet::new();
    let mut f = BTreeSet::new();
    for (key, tuples) in universe {
        let Some(pi) = i.get(key) else { continue };
        for tuple in tuples {
            let domains: Vec<SemDomain> = tuple.iter().map(domain_of).collect();
            if !pi.signature.contains(&domains) {
                continue;
            }
            if pi.truth.contains(tuple) {
                t.insert((key.clone(), tuple.clone()));
            } else {
                f.insert((key.clone(), tuple.clone()));
            }
        }
    }
    (t, f)
}

/// `T1 ⊆ T2`, and `F1 ⊆ F2` when `T1 = T2`, where `T` and `F` collect the
/// tuples of every predicate mapped to true and false. Tuples range over
/// the listed truth sets and the pool values of each signature.
pub fn is_smaller(i1: &Interpretation, i2: &Interpretation, pool: &ValuePool) -> bool {
    const MAX_TUPLES: usize = 10_000;
    let to_values = |ts: Vec<Term>| -> Vec<SemValue> {
        ts.iter().map(|t| eval_term(t, &State::new()).expect("pool values are ground")).collect()
    };
    let mut universe: BTreeMap<PredKey, BTreeSet<Vec<SemValue>>> = BTreeMap::new();
    for i in [i1, i2] {
        for (key, pi) in &i.preds {
            let entry = universe.entry(key.clone()).or_default();
            if let Truth::Listed(ts) = &pi.truth {
                entry.extend(ts.iter().cloned());
            }
            let columns: Vec<Vec<Vec<SemValue>>> = match &pi.signature {
                Signature::Listed(sig) => sig
                    .iter()
                    .map(|tuple| tuple.iter().map(|d| to_values(pool.values_of(d))).collect())
                    .collect(),
                Signature::Any => vec![vec![to_values(pool.all_values()); key.arity]],
            };
            for cols in columns {
                entry.extend(product(&cols, MAX_TUPLES));
            }
        }
    }
    let (t1, f1) = truth_sets(i1, &universe);
    let (t2, f2) = truth_sets(i2, &universe);
    t1.is_subset(&t2) && (t1 != t2 || f1.is_subset(&f2))
}
