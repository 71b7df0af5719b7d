use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Clause, PredAtom, Query, Term};

/// A finite mapping from variable names to terms. Identity bindings
/// `X ↦ X` are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    /// Builds a substitution, dropping identity bindings. Later bindings of
    /// the same variable are ignored.
    pub fn from_bindings<I, S>(bindings: I) -> Substitution
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<String>,
    {
        let mut s = Substitution::new();
        for (v, t) in bindings {
            let v = v.into();
            if !s.bindings.contains_key(&v) {
                s.insert(v, t);
            }
        }
        s
    }

    pub fn insert(&mut self, var: String, term: Term) {
        if matches!(&term, Term::Var(v) if *v == var) {
            self.bindings.remove(&var);
        } else {
            self.bindings.insert(var, term);
        }
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.bindings.keys()
    }

    /// Variables occurring in the domain or in some bound term.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.bindings.keys().cloned().collect();
        for t in self.bindings.values() {
            out.extend(t.vars());
        }
        out
    }

    /// Simultaneous replacement of bound variables.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const { .. } => t.clone(),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &PredAtom) -> PredAtom {
        PredAtom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply(t)).collect() }
    }

    pub fn apply_atoms(&self, atoms: &[PredAtom]) -> Vec<PredAtom> {
        atoms.iter().map(|a| self.apply_atom(a)).collect()
    }

    pub fn apply_query(&self, q: &Query) -> Query {
        Query { atoms: self.apply_atoms(&q.atoms), false_marker: q.false_marker }
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause { id: c.id, head: self.apply_atom(&c.head), body: self.apply_atoms(&c.body) }
    }

    /// `outer ∘ self`: the substitution that behaves as applying `self`
    /// first and `outer` second.
    ///
    /// Takes the sequence `X_i ↦ outer(t_i)` for each binding `X_i ↦ t_i`
    /// of `self`, followed by the bindings `Y_j ↦ s_j` of `outer`, then drops
    /// identity bindings and the `Y_j` that are already bound by `self`.
    pub fn then(&self, outer: &Substitution) -> Substitution {
        let mut bindings = BTreeMap::new();
        for (x, t) in &self.bindings {
            let t = outer.apply(t);
            if !matches!(&t, Term::Var(v) if v == x) {
                bindings.insert(x.clone(), t);
            }
        }
        for (y, s) in &outer.bindings {
            if !self.bindings.contains_key(y) {
                bindings.insert(y.clone(), s.clone());
            }
        }
        Substitution { bindings }
    }

    /// Keeps only the bindings of the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Substitution {
        let keep: BTreeSet<&String> = vars.into_iter().collect();
        Substitution {
            bindings: self.bindings.iter().filter(|(v, _)| keep.contains(v)).map(|(v, t)| (v.clone(), t.clone())).collect(),
        }
    }

    /// No bound variable occurs in any bound term.
    pub fn is_idempotent(&self) -> bool {
        self.bindings.values().all(|t| self.bindings.keys().all(|v| !t.occurs(v)))
    }
}

/// Composition `eta ∘ theta`: `apply(compose(eta, theta), t) = eta(theta(t))`.
pub fn compose(eta: &Substitution, theta: &Substitution) -> Substitution {
    theta.then(eta)
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution::from_bindings(iter)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

/// Renames every variable of `clause` to a name not in `avoid`.
///
/// A variable `V` becomes `V_k` for the smallest `k ≥ 1` such that the new
/// name is neither in `avoid` nor already chosen for another variable.
pub fn rename_apart(clause: &Clause, avoid: &BTreeSet<String>) -> Clause {
    let mut chosen: BTreeSet<String> = BTreeSet::new();
    let mut renaming = Substitution::new();
    for v in clause.vars() {
        let base = v.clone();
        let fresh = (1..)
            .map(|k| format!("{base}_{k}"))
            .find(|name| !avoid.contains(name) && !chosen.contains(name))
            .expect("unbounded counter");
        chosen.insert(fresh.clone());
        renaming.insert(v, Term::Var(fresh));
    }
    renaming.apply_clause(clause)
}
