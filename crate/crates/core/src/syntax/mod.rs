//! Terms, atoms, clauses, queries and programs.
//!
//! Constants carry their base type, assigned from their lexical class when
//! parsed. Variables are untyped; their types are only checked dynamically
//! by typed unification.

mod parser;
mod subst;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::{parse_atom, parse_program, parse_query, parse_term, ParseError};
pub use subst::{compose, rename_apart, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseType {
    Int,
    Float,
    Atom,
    String,
}

impl BaseType {
    pub const ALL: [BaseType; 4] = [BaseType::Int, BaseType::Float, BaseType::Atom, BaseType::String];
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseType::Int => "int",
            BaseType::Float => "float",
            BaseType::Atom => "atom",
            BaseType::String => "string",
        })
    }
}

/// Type of a ground term: a base type, or a compound type `f(σ1, …, σn)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundType {
    Base(BaseType),
    Tree(String, Vec<GroundType>),
}

impl fmt::Display for GroundType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundType::Base(b) => b.fmt(f),
            GroundType::Tree(functor, children) => {
                write!(f, "{functor}(")?;
                write_joined(f, children, ",")?;
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("term `{0}` is not ground")]
pub struct NotGround(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// A typed constant. For strings the lexeme is the unquoted content.
    Const { lexeme: String, ty: BaseType },
    /// `f(t1, …, tn)` with `n ≥ 1`.
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(lexeme: impl Into<String>, ty: BaseType) -> Term {
        Term::Const { lexeme: lexeme.into(), ty }
    }

    pub fn int(value: i64) -> Term {
        Term::constant(value.to_string(), BaseType::Int)
    }

    pub fn atom(name: impl Into<String>) -> Term {
        Term::constant(name, BaseType::Atom)
    }

    pub fn float(lexeme: impl Into<String>) -> Term {
        Term::constant(lexeme, BaseType::Float)
    }

    pub fn string(content: impl Into<String>) -> Term {
        Term::constant(content, BaseType::String)
    }

    /// Builds a compound term. Panics on an empty argument list, since
    /// arity-zero function symbols are constants.
    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        assert!(!args.is_empty(), "compound terms need at least one argument");
        Term::Compound(functor.into(), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const { .. } => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Const { .. } => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(name)),
        }
    }

    /// Number of symbol occurrences (variables, constants and functors).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const { .. } => 1,
            Term::Compound(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const { .. } => 0,
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Appends variables in first-occurrence order, without duplicates.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const { .. } => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn ground_type(&self) -> Result<GroundType, NotGround> {
        match self {
            Term::Var(_) => Err(NotGround(self.to_string())),
            Term::Const { ty, .. } => Ok(GroundType::Base(*ty)),
            Term::Compound(functor, args) => {
                let children = args
                    .iter()
                    .map(Term::ground_type)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| NotGround(self.to_string()))?;
                Ok(GroundType::Tree(functor.clone(), children))
            }
        }
    }

    pub fn visit_constants<'a>(&'a self, f: &mut impl FnMut(&'a str, BaseType)) {
        match self {
            Term::Var(_) => {}
            Term::Const { lexeme, ty } => f(lexeme, *ty),
            Term::Compound(_, args) => args.iter().for_each(|a| a.visit_constants(f)),
        }
    }
}

/// Type of a ground term.
pub fn ground_type_of(t: &Term) -> Result<GroundType, NotGround> {
    t.ground_type()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const { lexeme, ty: BaseType::String } => {
                f.write_str("\"")?;
                for c in lexeme.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Term::Const { lexeme, .. } => f.write_str(lexeme),
            Term::Compound(functor, args) => {
                write!(f, "{functor}(")?;
                write_joined(f, args, ",")?;
                f.write_str(")")
            }
        }
    }
}

/// A predicate symbol with its arity; `p/2` and `p/3` are distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredKey {
    pub name: String,
    pub arity: usize,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredAtom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl PredAtom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> PredAtom {
        PredAtom { pred: pred.into(), args }
    }

    pub fn key(&self) -> PredKey {
        PredKey { name: self.pred.clone(), arity: self.args.len() }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn same_predicate(&self, other: &PredAtom) -> bool {
        self.pred == other.pred && self.args.len() == other.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }
}

impl fmt::Display for PredAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_joined(f, &self.args, ",")?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// 1-based source position of a clause, printed `c<k>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseId(pub usize);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl std::str::FromStr for ClauseId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('c')
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|n| *n >= 1)
            .map(ClauseId)
            .ok_or_else(|| format!("invalid clause id `{s}`"))
    }
}

impl Serialize for ClauseId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClauseId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub id: ClauseId,
    pub head: PredAtom,
    pub body: Vec<PredAtom>,
}

impl Clause {
    pub fn new(id: ClauseId, head: PredAtom, body: Vec<PredAtom>) -> Clause {
        Clause { id, head, body }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &PredAtom> {
        std::iter::once(&self.head).chain(self.body.iter())
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.atoms().for_each(|a| a.collect_vars(&mut out));
        out
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            write_joined(f, &self.body, ", ")?;
        }
        f.write_str(".")
    }
}

/// A sequence of atoms plus a marker recording that a unification in this
/// derivation already returned `false`.
///
/// No atoms and no marker is the empty query `□`; no atoms with the marker
/// set is the terminal `false`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Query {
    pub atoms: Vec<PredAtom>,
    pub false_marker: bool,
}

impl Query {
    pub fn new(atoms: Vec<PredAtom>) -> Query {
        Query { atoms, false_marker: false }
    }

    pub fn empty() -> Query {
        Query::default()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `□`: no atoms left and no `false` recorded.
    pub fn is_success(&self) -> bool {
        self.atoms.is_empty() && !self.false_marker
    }

    /// The terminal `false`: no atoms left but a `false` was recorded.
    pub fn is_failure(&self) -> bool {
        self.atoms.is_empty() && self.false_marker
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.atoms.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.false_marker, self.atoms.is_empty()) {
            (false, true) => f.write_str("□"),
            (true, true) => f.write_str("false"),
            (marker, false) => {
                if marker {
                    f.write_str("false,")?;
                }
                write_joined(f, &self.atoms, ",")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Program {
    pub clauses: Vec<Clause>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        Program { clauses }
    }

    /// Builds a program from clause bodies, numbering clauses in order.
    pub fn from_rules(rules: Vec<(PredAtom, Vec<PredAtom>)>) -> Program {
        let clauses = rules
            .into_iter()
            .enumerate()
            .map(|(i, (head, body))| Clause::new(ClauseId(i + 1), head, body))
            .collect();
        Program { clauses }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    /// Predicates occurring in clause heads, in order of first occurrence.
    pub fn head_predicates(&self) -> Vec<PredKey> {
        let mut out: Vec<PredKey> = Vec::new();
        for c in &self.clauses {
            let key = c.head.key();
            if !out.contains(&key) {
                out.push(key);
            }
        }
        out
    }

    /// Function symbols (name, arity ≥ 1) used anywhere in the program.
    pub fn functors(&self) -> BTreeSet<(String, usize)> {
        fn walk(t: &Term, out: &mut BTreeSet<(String, usize)>) {
            if let Term::Compound(f, args) = t {
                out.insert((f.clone(), args.len()));
                args.iter().for_each(|a| walk(a, out));
            }
        }
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            for a in c.atoms() {
                a.args.iter().for_each(|t| walk(t, &mut out));
            }
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub(crate) fn write_joined<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: &[T],
    sep: &str,
) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_type_cases() {
        assert_eq!(ground_type_of(&Term::int(1)), Ok(GroundType::Base(BaseType::Int)));
        let t = Term::compound("f", vec![Term::int(1), Term::atom("a")]);
        assert_eq!(
            ground_type_of(&t),
            Ok(GroundType::Tree(
                "f".into(),
                vec![GroundType::Base(BaseType::Int), GroundType::Base(BaseType::Atom)]
            ))
        );
        assert!(ground_type_of(&Term::var("X")).is_err());
        assert!(ground_type_of(&Term::compound("f", vec![Term::var("X")])).is_err());
    }

    #[test]
    fn constants_differ_by_type() {
        assert_ne!(Term::int(1), Term::float("1.0"));
        assert_ne!(Term::atom("a"), Term::string("a"));
        assert_eq!(Term::atom("a"), Term::atom("a"));
    }

    #[test]
    fn query_display() {
        let q = Query::new(vec![PredAtom::new("p", vec![Term::int(1), Term::atom("a")])]);
        assert_eq!(q.to_string(), "p(1,a)");
        let marked = Query { false_marker: true, ..q };
        assert_eq!(marked.to_string(), "false,p(1,a)");
        assert_eq!(Query::empty().to_string(), "□");
        assert_eq!(Query { atoms: vec![], false_marker: true }.to_string(), "false");
    }

    #[test]
    fn clause_id_parse() {
        assert_eq!("c3".parse::<ClauseId>(), Ok(ClauseId(3)));
        assert!("c0".parse::<ClauseId>().is_err());
        assert!("3".parse::<ClauseId>().is_err());
    }

    #[test]
    fn string_escapes_print() {
        assert_eq!(Term::string("a\"b").to_string(), "\"a\\\"b\"");
    }
}
