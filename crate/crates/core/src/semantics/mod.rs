//! Three-valued declarative semantics.
//!
//! Terms denote values in typed domains and predicates are interpreted by
//! partial boolean functions: an atom whose argument domains fall outside
//! its predicate's signature evaluates to `wrong`. The universally
//! quantified notions (models, ill-typedness) are decided over finite value
//! pools, so every verdict that depends on a truncated bound is `UNKNOWN`.

mod checks;
mod fixpoint;
mod pool;
mod typing;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ordered_float::OrderedFloat;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::engine::Resultant;
use crate::kleene::{fold_and, TruthValue};
use crate::syntax::{BaseType, Clause, PredAtom, PredKey, Query, Term};

pub use checks::{
    check_lemma_blamed_clause, check_resultant_soundness, check_soundness_theorem, LemmaError, LemmaReading,
    SoundnessReport,
};
pub use fixpoint::{derived_interpretation, tp_fixpoint, tp_step, AtomSet};
pub use pool::{Bounds, ValuePool};
pub use typing::{
    clause_contexts, is_ill_typed_program, is_ill_typed_query, is_smaller, models, models_of_program, ProgramCheck,
    ProgramModel, QueryCheck, TypeVerdict, Violation,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemDomain {
    Int,
    Float,
    Atom,
    String,
    /// Trees whose root is the functor and whose children lie in the given
    /// domains.
    Tree(String, Vec<SemDomain>),
    Bool,
    W,
}

impl SemDomain {
    pub const BASE: [SemDomain; 4] = [SemDomain::Int, SemDomain::Float, SemDomain::Atom, SemDomain::String];

    pub fn base(t: BaseType) -> SemDomain {
        match t {
            BaseType::Int => SemDomain::Int,
            BaseType::Float => SemDomain::Float,
            BaseType::Atom => SemDomain::Atom,
            BaseType::String => SemDomain::String,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SemDomain::Tree(_, ds) => 1 + ds.iter().map(SemDomain::depth).max().unwrap_or(0),
            _ => 0,
        }
    }
}

impl fmt::Display for SemDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemDomain::Int => f.write_str("int"),
            SemDomain::Float => f.write_str("float"),
            SemDomain::Atom => f.write_str("atom"),
            SemDomain::String => f.write_str("string"),
            SemDomain::Bool => f.write_str("bool"),
            SemDomain::W => f.write_str("wrong"),
            SemDomain::Tree(name, ds) => {
                write!(f, "{name}(")?;
                for (i, d) in ds.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{d}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemValue {
    Int(i64),
    Float(OrderedFloat<f64>),
    Atom(String),
    Str(String),
    Tree(String, Vec<SemValue>),
}

impl fmt::Display for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemValue::Int(i) => write!(f, "{i}"),
            SemValue::Float(x) => write!(f, "{:?}", x.0),
            SemValue::Atom(a) => f.write_str(a),
            SemValue::Str(s) => write!(f, "{s:?}"),
            SemValue::Tree(name, vs) => {
                write!(f, "{name}(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

macro_rules! serialize_as_display {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

serialize_as_display!(SemDomain, SemValue);

pub fn domain_of(v: &SemValue) -> SemDomain {
    match v {
        SemValue::Int(_) => SemDomain::Int,
        SemValue::Float(_) => SemDomain::Float,
        SemValue::Atom(_) => SemDomain::Atom,
        SemValue::Str(_) => SemDomain::String,
        SemValue::Tree(name, vs) => SemDomain::Tree(name.clone(), vs.iter().map(domain_of).collect()),
    }
}

pub type State = BTreeMap<String, SemValue>;
pub type Context = BTreeMap<String, SemDomain>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable {0} is not bound by the state")]
    Unbound(String),
}

/// The canonical value of a constant.
pub fn constant_value(lexeme: &str, ty: BaseType) -> SemValue {
    match ty {
        BaseType::Int => SemValue::Int(lexeme.parse().expect("integer lexemes are valid")),
        BaseType::Float => SemValue::Float(OrderedFloat(lexeme.parse().expect("float lexemes are valid"))),
        BaseType::Atom => SemValue::Atom(lexeme.to_string()),
        BaseType::String => SemValue::Str(lexeme.to_string()),
    }
}

/// Ground term for a value; inverse of evaluation on ground terms up to
/// the spelling of floats.
pub fn value_term(v: &SemValue) -> Term {
    match v {
        SemValue::Int(i) => Term::int(*i),
        SemValue::Float(x) => Term::float(format!("{:?}", x.0)),
        SemValue::Atom(a) => Term::atom(a.clone()),
        SemValue::Str(s) => Term::string(s.clone()),
        SemValue::Tree(name, vs) => Term::compound(name.clone(), vs.iter().map(value_term).collect()),
    }
}

pub fn eval_term(t: &Term, s: &State) -> Result<SemValue, EvalError> {
    match t {
        Term::Var(v) => s.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.clone())),
        Term::Const { lexeme, ty } => Ok(constant_value(lexeme, *ty)),
        Term::Compound(f, args) => {
            Ok(SemValue::Tree(f.clone(), args.iter().map(|a| eval_term(a, s)).collect::<Result<_, _>>()?))
        }
    }
}

/// Ground atoms as value tuples.
pub fn ground_tuple(a: &PredAtom) -> Result<Vec<SemValue>, EvalError> {
    a.args.iter().map(|t| eval_term(t, &State::new())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Signature {
    Listed(BTreeSet<Vec<SemDomain>>),
    /// Every tuple of domains.
    Any,
}

impl Signature {
    pub fn contains(&self, tuple: &[SemDomain]) -> bool {
        match self {
            Signature::Listed(s) => s.contains(tuple),
            Signature::Any => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Truth {
    Listed(BTreeSet<Vec<SemValue>>),
    /// True on the whole signature.
    All,
}

impl Truth {
    pub fn none() -> Truth {
        Truth::Listed(BTreeSet::new())
    }

    pub fn contains(&self, tuple: &[SemValue]) -> bool {
        match self {
            Truth::Listed(s) => s.contains(tuple),
            Truth::All => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredInterp {
    pub signature: Signature,
    pub truth: Truth,
}

/// Predicates missing from the map have the empty signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub preds: BTreeMap<PredKey, PredInterp>,
}

impl Interpretation {
    pub fn get(&self, key: &PredKey) -> Option<&PredInterp> {
        self.preds.get(key)
    }

    pub fn insert(&mut self, key: PredKey, interp: PredInterp) {
        self.preds.insert(key, interp);
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (key, pi)) in self.preds.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let doc = PredDoc::from(pi);
            write!(f, "{key} :: {}", doc.signature.join(" ∪ "))?;
            write!(f, " true on {{{}}}", doc.truth.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct PredDoc {
    signature: Vec<String>,
    truth: Vec<String>,
}

fn tuple_text<T: fmt::Display>(t: &[T]) -> String {
    let inner: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

impl From<&PredInterp> for PredDoc {
    fn from(pi: &PredInterp) -> PredDoc {
        PredDoc {
            signature: match &pi.signature {
                Signature::Listed(s) => s.iter().map(|t| tuple_text(t)).collect(),
                Signature::Any => vec!["any".into()],
            },
            truth: match &pi.truth {
                Truth::Listed(s) => s.iter().map(|t| tuple_text(t)).collect(),
                Truth::All => vec!["all".into()],
            },
        }
    }
}

impl Serialize for Interpretation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.preds.iter().map(|(k, v)| (k.to_string(), PredDoc::from(v))))
    }
}

pub fn eval_atom(a: &PredAtom, i: &Interpretation, s: &State) -> Result<TruthValue, EvalError> {
    let values: Vec<SemValue> = a.args.iter().map(|t| eval_term(t, s)).collect::<Result<_, _>>()?;
    let domains: Vec<SemDomain> = values.iter().map(domain_of).collect();
    Ok(match i.get(&a.key()) {
        Some(pi) if pi.signature.contains(&domains) => TruthValue::from(pi.truth.contains(&values)),
        _ => TruthValue::Wrong,
    })
}

/// Conjunction of the atoms; the false marker is not part of the
/// conjunction.
pub fn eval_query(q: &Query, i: &Interpretation, s: &State) -> Result<TruthValue, EvalError> {
    eval_conjunction(&q.atoms, i, s)
}

fn eval_conjunction(atoms: &[PredAtom], i: &Interpretation, s: &State) -> Result<TruthValue, EvalError> {
    let values: Vec<TruthValue> = atoms.iter().map(|a| eval_atom(a, i, s)).collect::<Result<_, _>>()?;
    Ok(fold_and(values))
}

pub fn eval_clause(c: &Clause, i: &Interpretation, s: &State) -> Result<TruthValue, EvalError> {
    let head = eval_atom(&c.head, i, s)?;
    if c.is_fact() {
        return Ok(head);
    }
    Ok(eval_conjunction(&c.body, i, s)?.implies(head))
}

/// Anything that can be evaluated under an interpretation and a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expression {
    Atom(PredAtom),
    Query(Query),
    Clause(Clause),
    /// `head ← body` with a conjunction as head.
    Resultant(Resultant),
}

impl Expression {
    pub fn atoms(&self) -> Vec<&PredAtom> {
        match self {
            Expression::Atom(a) => vec![a],
            Expression::Query(q) => q.atoms.iter().collect(),
            Expression::Clause(c) => c.atoms().collect(),
            Expression::Resultant(r) => r.head.atoms.iter().chain(r.body.atoms.iter()).collect(),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.atoms() {
            a.collect_vars(&mut out);
        }
        out
    }

    pub fn eval(&self, i: &Interpretation, s: &State) -> Result<TruthValue, EvalError> {
        match self {
            Expression::Atom(a) => eval_atom(a, i, s),
            Expression::Query(q) => eval_query(q, i, s),
            Expression::Clause(c) => eval_clause(c, i, s),
            Expression::Resultant(r) => {
                let head = eval_conjunction(&r.head.atoms, i, s)?;
                if r.body.atoms.is_empty() {
                    return Ok(head);
                }
                Ok(eval_conjunction(&r.body.atoms, i, s)?.implies(head))
            }
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Atom(a) => write!(f, "{a}"),
            Expression::Query(q) => write!(f, "{q}"),
            Expression::Clause(c) => write!(f, "{c}"),
            Expression::Resultant(r) => write!(f, "{r}"),
        }
    }
}

/// Every binding of the state is for a variable of the context and its
/// value lies in that variable's domain.
pub fn complies(s: &State, d: &Context) -> bool {
    s.iter().all(|(x, v)| d.get(x).is_some_and(|dom| *dom == domain_of(v)))
}

/// Extends `ctx` so that the term's domain is `d`.
pub(crate) fn domain_match(t: &Term, d: &SemDomain, ctx: &mut Context) -> bool {
    match (t, d) {
        (Term::Var(v), _) => match ctx.get(v) {
            Some(bound) => bound == d,
            None => {
                ctx.insert(v.clone(), d.clone());
                true
            }
        },
        (Term::Const { ty, .. }, _) => SemDomain::base(*ty) == *d,
        (Term::Compound(f, args), SemDomain::Tree(g, ds)) => {
            f == g && args.len() == ds.len() && args.iter().zip(ds).all(|(a, d)| domain_match(a, d, ctx))
        }
        _ => false,
    }
}

/// Domain of a term whose variables take values in the given domains.
pub fn term_domain(t: &Term, d: &Context) -> Option<SemDomain> {
    match t {
        Term::Var(v) => d.get(v).cloned(),
        Term::Const { ty, .. } => Some(SemDomain::base(*ty)),
        Term::Compound(f, args) => {
            Some(SemDomain::Tree(f.clone(), args.iter().map(|a| term_domain(a, d)).collect::<Option<_>>()?))
        }
    }
}
