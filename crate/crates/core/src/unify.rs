//! Typed unification.
//!
//! Unification is phrased as rewriting a pair `(S, F)` of an equation set
//! and a flag. Besides succeeding with a most general unifier, it can end in
//! `false` (the terms do not unify but could have the same type) or `wrong`
//! (no substitution gives them the same type).
//!
//! The rules, applied to some equation of `S`:
//!
//! | rule | equation                       | result                          |
//! |------|--------------------------------|---------------------------------|
//! | 1    | `f(t̄) = f(s̄)`                  | replace by `t_i = s_i`          |
//! | 2    | `f(t̄) = g(s̄)`, `f/n ≠ g/m`     | `wrong`                         |
//! | 3    | `c = c`                        | delete                          |
//! | 4    | `c = d`, same type             | delete, `F := false`            |
//! | 5    | `c = d`, different types       | `wrong`                         |
//! | 6    | `c = f(t̄)`                     | `wrong`                         |
//! | 7    | `f(t̄) = c`                     | `wrong`                         |
//! | 8    | `X = X`                        | delete                          |
//! | 9    | `t = X`, `t` not a variable    | `X = t`                         |
//! | 10   | `X = t`, `X ∉ t`, `X` in rest  | apply `[X ↦ t]` to the rest     |
//! | 11   | `X = t`, `X ∈ t`, `X ≠ t`      | delete, `F := false`            |
//!
//! Rewriting continues after the flag drops to `false`; a later rule can
//! still halt with `wrong`.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{BaseType, PredAtom, Substitution, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnificationOutcome {
    Mgu(Substitution),
    False,
    Wrong,
}

impl UnificationOutcome {
    pub fn is_mgu(&self) -> bool {
        matches!(self, UnificationOutcome::Mgu(_))
    }

    pub fn mgu(&self) -> Option<&Substitution> {
        match self {
            UnificationOutcome::Mgu(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for UnificationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnificationOutcome::Mgu(s) => write!(f, "{s}"),
            UnificationOutcome::False => f.write_str("false"),
            UnificationOutcome::Wrong => f.write_str("wrong"),
        }
    }
}

/// Number of a rewrite rule, 1 to 11.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule(pub u8);

impl Rule {
    pub fn halts_with_wrong(self) -> bool {
        matches!(self.0, 2 | 5 | 6 | 7)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub equations: Vec<(Term, Term)>,
    /// `true` while the system may still be unifiable.
    pub flag: bool,
}

impl EquationSystem {
    pub fn new(lhs: Term, rhs: Term) -> EquationSystem {
        EquationSystem { equations: vec![(lhs, rhs)], flag: true }
    }

    pub fn from_pairs(pairs: Vec<(Term, Term)>) -> EquationSystem {
        EquationSystem { equations: pairs, flag: true }
    }

    fn occurs_elsewhere(&self, var: &str, skip: usize) -> bool {
        self.equations
            .iter()
            .enumerate()
            .any(|(j, (l, r))| j != skip && (l.occurs(var) || r.occurs(var)))
    }

    /// The lowest-numbered rule that applies to equation `idx`, if any.
    pub fn rule_at(&self, idx: usize) -> Option<Rule> {
        let (lhs, rhs) = &self.equations[idx];
        let n = match (lhs, rhs) {
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f == g && xs.len() == ys.len() {
                    1
                } else {
                    2
                }
            }
            (Term::Const { lexeme: c, ty: tc }, Term::Const { lexeme: d, ty: td }) => {
                if c == d && tc == td {
                    3
                } else if tc == td {
                    4
                } else {
                    5
                }
            }
            (Term::Const { .. }, Term::Compound(..)) => 6,
            (Term::Compound(..), Term::Const { .. }) => 7,
            (Term::Var(x), Term::Var(y)) if x == y => 8,
            (_, Term::Var(_)) if !lhs.is_var() => 9,
            (Term::Var(x), t) => {
                if t.occurs(x) {
                    11
                } else if self.occurs_elsewhere(x, idx) {
                    10
                } else {
                    return None;
                }
            }
            _ => unreachable!("all shapes are covered"),
        };
        Some(Rule(n))
    }

    /// Every (equation index, rule) redex, one per equation.
    pub fn redexes(&self) -> Vec<(usize, Rule)> {
        (0..self.equations.len()).filter_map(|i| self.rule_at(i).map(|r| (i, r))).collect()
    }

    /// The redex chosen by the deterministic strategy: the leftmost
    /// equation that some rule rewrites, with its lowest-numbered rule.
    pub fn leftmost_redex(&self) -> Option<(usize, Rule)> {
        (0..self.equations.len()).find_map(|i| self.rule_at(i).map(|r| (i, r)))
    }

    /// Rewrites equation `idx` with `rule`, which must be the rule returned
    /// by [`rule_at`](Self::rule_at). Returns `false` when the rule halts
    /// with `wrong`.
    pub fn rewrite(&mut self, idx: usize, rule: Rule) -> bool {
        debug_assert_eq!(self.rule_at(idx), Some(rule));
        match rule.0 {
            1 => {
                let (lhs, rhs) = self.equations.remove(idx);
                let (Term::Compound(_, xs), Term::Compound(_, ys)) = (lhs, rhs) else {
                    unreachable!()
                };
                for (k, pair) in xs.into_iter().zip(ys).enumerate() {
                    self.equations.insert(idx + k, pair);
                }
            }
            2 | 5 | 6 | 7 => return false,
            3 | 8 => {
                self.equations.remove(idx);
            }
            4 | 11 => {
                self.equations.remove(idx);
                self.flag = false;
            }
            9 => {
                let (lhs, rhs) = &mut self.equations[idx];
                std::mem::swap(lhs, rhs);
            }
            10 => {
                let (Term::Var(x), t) = &self.equations[idx] else { unreachable!() };
                let binding = Substitution::from_bindings([(x.clone(), t.clone())]);
                for (j, (l, r)) in self.equations.iter_mut().enumerate() {
                    if j != idx {
                        *l = binding.apply(l);
                        *r = binding.apply(r);
                    }
                }
            }
            n => panic!("no rewrite rule {n}"),
        }
        true
    }

    /// Reads a solved system as a substitution.
    pub fn solved_substitution(&self) -> Substitution {
        Substitution::from_bindings(self.equations.iter().map(|(l, r)| match l {
            Term::Var(x) => (x.clone(), r.clone()),
            _ => panic!("equation `{l} = {r}` is not solved"),
        }))
    }

    pub fn size(&self) -> usize {
        self.equations.iter().map(|(l, r)| l.size() + r.size()).sum()
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("({")?;
        for (i, (l, r)) in self.equations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l} = {r}")?;
        }
        write!(f, "}}, {})", self.flag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub consumed: (Term, Term),
    /// `None` when the rule halted with `wrong`.
    pub result: Option<EquationSystem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnifTrace {
    pub initial: EquationSystem,
    pub steps: Vec<TraceStep>,
}

impl UnifTrace {
    pub fn rules(&self) -> Vec<u8> {
        self.steps.iter().map(|s| s.rule.0).collect()
    }

    /// The last system reached before halting.
    pub fn final_system(&self) -> &EquationSystem {
        self.steps
            .iter()
            .rev()
            .find_map(|s| s.result.as_ref())
            .unwrap_or(&self.initial)
    }

    /// Re-runs the recorded rule applications from the initial system and
    /// checks that each step reproduces the recorded result.
    pub fn replay(&self) -> Option<UnificationOutcome> {
        let mut sys = self.initial.clone();
        for step in &self.steps {
            let idx = sys.equations.iter().position(|e| *e == step.consumed)?;
            if sys.rule_at(idx) != Some(step.rule) {
                return None;
            }
            if !sys.rewrite(idx, step.rule) {
                return step.result.is_none().then_some(UnificationOutcome::Wrong);
            }
            if step.result.as_ref() != Some(&sys) {
                return None;
            }
        }
        if sys.leftmost_redex().is_some() {
            return None;
        }
        Some(if sys.flag { UnificationOutcome::Mgu(sys.solved_substitution()) } else { UnificationOutcome::False })
    }

    /// Renders the trace as `(S, F) →_k (S', F') … → outcome`.
    pub fn render(&self, outcome: &UnificationOutcome) -> String {
        let mut out = self.initial.to_string();
        for step in &self.steps {
            match &step.result {
                Some(sys) => out.push_str(&format!(" →_{} {sys}", step.rule)),
                None => out.push_str(&format!(" →_{} wrong", step.rule)),
            }
        }
        if !matches!(outcome, UnificationOutcome::Wrong) {
            out.push_str(&format!(" → {outcome}"));
        }
        out
    }
}

/// Runs the rewrite system to completion, choosing redexes with `choose`.
pub fn run_system<F>(mut sys: EquationSystem, mut choose: F) -> (UnificationOutcome, UnifTrace)
where
    F: FnMut(&EquationSystem) -> Option<(usize, Rule)>,
{
    let mut trace = UnifTrace { initial: sys.clone(), steps: Vec::new() };
    while let Some((idx, rule)) = choose(&sys) {
        let consumed = sys.equations[idx].clone();
        if !sys.rewrite(idx, rule) {
            trace.steps.push(TraceStep { rule, consumed, result: None });
            return (UnificationOutcome::Wrong, trace);
        }
        trace.steps.push(TraceStep { rule, consumed, result: Some(sys.clone()) });
    }
    let outcome = if sys.flag {
        UnificationOutcome::Mgu(sys.solved_substitution())
    } else {
        UnificationOutcome::False
    };
    (outcome, trace)
}

/// Typed unification of two terms under the leftmost-equation,
/// lowest-rule strategy.
pub fn typed_unify(t1: &Term, t2: &Term) -> (UnificationOutcome, UnifTrace) {
    run_system(EquationSystem::new(t1.clone(), t2.clone()), EquationSystem::leftmost_redex)
}

/// Typed unification of two atoms, argument by argument. Atoms with
/// different predicate symbols or arities give `False`.
pub fn typed_unify_atoms(a: &PredAtom, b: &PredAtom) -> (UnificationOutcome, UnifTrace) {
    if !a.same_predicate(b) {
        let initial = EquationSystem::from_pairs(Vec::new());
        return (UnificationOutcome::False, UnifTrace { initial, steps: Vec::new() });
    }
    let pairs = a.args.iter().cloned().zip(b.args.iter().cloned()).collect();
    run_system(EquationSystem::from_pairs(pairs), EquationSystem::leftmost_redex)
}

/// Classical untyped unification with occurs check, returning an
/// idempotent most general unifier.
pub fn mm_unify(t1: &Term, t2: &Term) -> Option<Substitution> {
    let mut bindings: BTreeMap<String, Term> = BTreeMap::new();
    if !unify_untyped(t1, t2, &mut bindings) {
        return None;
    }
    let resolved = bindings.keys().map(|v| (v.clone(), resolve(&Term::Var(v.clone()), &bindings))).collect::<Vec<_>>();
    Some(Substitution::from_bindings(resolved))
}

/// Untyped unification of two atoms; `None` for different predicates.
pub fn mm_unify_atoms(a: &PredAtom, b: &PredAtom) -> Option<Substitution> {
    if !a.same_predicate(b) {
        return None;
    }
    let mut bindings = BTreeMap::new();
    for (x, y) in a.args.iter().zip(&b.args) {
        if !unify_untyped(x, y, &mut bindings) {
            return None;
        }
    }
    let resolved = bindings.keys().map(|v| (v.clone(), resolve(&Term::Var(v.clone()), &bindings))).collect::<Vec<_>>();
    Some(Substitution::from_bindings(resolved))
}

fn walk<'a>(mut t: &'a Term, bindings: &'a BTreeMap<String, Term>) -> &'a Term {
    while let Term::Var(v) = t {
        match bindings.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn resolve(t: &Term, bindings: &BTreeMap<String, Term>) -> Term {
    match walk(t, bindings) {
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| resolve(a, bindings)).collect()),
        other => other.clone(),
    }
}

fn occurs_resolved(var: &str, t: &Term, bindings: &BTreeMap<String, Term>) -> bool {
    match walk(t, bindings) {
        Term::Var(v) => v == var,
        Term::Const { .. } => false,
        Term::Compound(_, args) => args.iter().any(|a| occurs_resolved(var, a, bindings)),
    }
}

fn unify_untyped(a: &Term, b: &Term, bindings: &mut BTreeMap<String, Term>) -> bool {
    let a = walk(a, bindings).clone();
    let b = walk(b, bindings).clone();
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), _) => {
            if occurs_resolved(x, &b, bindings) {
                return false;
            }
            bindings.insert(x.clone(), b);
            true
        }
        (_, Term::Var(y)) => {
            if occurs_resolved(y, &a, bindings) {
                return false;
            }
            bindings.insert(y.clone(), a);
            true
        }
        (Term::Const { .. }, Term::Const { .. }) => a == b,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_untyped(x, y, bindings))
        }
        _ => false,
    }
}

/// Type expression with variables: the type of a term whose variables are
/// not yet instantiated.
#[derive(Clone, Debug, PartialEq, Eq)]
enum TypeExpr {
    Var(String),
    Base(BaseType),
    Tree(String, Vec<TypeExpr>),
}

impl TypeExpr {
    fn of(t: &Term) -> TypeExpr {
        match t {
            Term::Var(v) => TypeExpr::Var(v.clone()),
            Term::Const { ty, .. } => TypeExpr::Base(*ty),
            Term::Compound(f, args) => TypeExpr::Tree(f.clone(), args.iter().map(TypeExpr::of).collect()),
        }
    }
}

/// Whether some substitution θ gives `θ(t1)` and `θ(t2)` the same ground
/// type.
///
/// Decided by unifying the type expressions of both terms, where each
/// variable stands for the (unknown) type of its instance. A variable
/// shared between positions must take a single type there, and a variable
/// whose type would have to contain itself has no finite type.
pub fn same_type_possible(t1: &Term, t2: &Term) -> bool {
    let mut env: BTreeMap<String, TypeExpr> = BTreeMap::new();
    unify_types(&TypeExpr::of(t1), &TypeExpr::of(t2), &mut env)
}

fn walk_type<'a>(mut t: &'a TypeExpr, env: &'a BTreeMap<String, TypeExpr>) -> &'a TypeExpr {
    while let TypeExpr::Var(v) = t {
        match env.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn type_occurs(var: &str, t: &TypeExpr, env: &BTreeMap<String, TypeExpr>) -> bool {
    match walk_type(t, env) {
        TypeExpr::Var(v) => v == var,
        TypeExpr::Base(_) => false,
        TypeExpr::Tree(_, children) => children.iter().any(|c| type_occurs(var, c, env)),
    }
}

fn unify_types(a: &TypeExpr, b: &TypeExpr, env: &mut BTreeMap<String, TypeExpr>) -> bool {
    let a = walk_type(a, env).clone();
    let b = walk_type(b, env).clone();
    match (&a, &b) {
        (TypeExpr::Var(x), TypeExpr::Var(y)) if x == y => true,
        (TypeExpr::Var(x), other) | (other, TypeExpr::Var(x)) => {
            if type_occurs(x, other, env) {
                return false;
            }
            env.insert(x.clone(), other.clone());
            true
        }
        (TypeExpr::Base(p), TypeExpr::Base(q)) => p == q,
        (TypeExpr::Tree(f, xs), TypeExpr::Tree(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_types(x, y, env))
        }
        _ => false,
    }
}
