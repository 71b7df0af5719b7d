use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::pool::{product, Bounds, ValuePool};
use super::{domain_of, ground_tuple, Interpretation, PredInterp, SemDomain, SemValue, Signature, Truth};
use crate::syntax::{PredAtom, PredKey, Program, Substitution, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AtomSet {
    #[serde(serialize_with = "serialize_atoms")]
    pub atoms: BTreeSet<PredAtom>,
    /// An iteration or size bound was hit before the fixpoint.
    pub truncated: bool,
    pub iterations: usize,
}

fn serialize_atoms<S: serde::Serializer>(atoms: &BTreeSet<PredAtom>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(atoms.iter().map(|a| a.to_string()))
}

impl AtomSet {
    pub fn contains(&self, a: &PredAtom) -> bool {
        self.atoms.contains(a)
    }

    pub fn predicates(&self) -> BTreeSet<PredKey> {
        self.atoms.iter().map(PredAtom::key).collect()
    }
}

/// Extends `binding` so that `pattern` instantiates to the ground term.
pub(crate) fn match_term(pattern: &Term, ground: &Term, binding: &mut BTreeMap<String, Term>) -> bool {
    match (pattern, ground) {
        (Term::Var(v), _) => match binding.get(v) {
            Some(bound) => bound == ground,
            None => {
                binding.insert(v.clone(), ground.clone());
                true
            }
        },
        (Term::Const { .. }, _) => pattern == ground,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, binding))
        }
        _ => false,
    }
}

fn match_atom(pattern: &PredAtom, ground: &PredAtom, binding: &mut BTreeMap<String, Term>) -> bool {
    pattern.same_predicate(ground) && pattern.args.iter().zip(&ground.args).all(|(p, g)| match_term(p, g, binding))
}

/// Classical immediate consequence: every ground instance of a clause head
/// whose body instance lies in `s`. Variables not fixed by the body range
/// over the pool.
pub fn tp_step(p: &Program, s: &BTreeSet<PredAtom>, pool: &ValuePool, bounds: &Bounds) -> AtomSet {
    let mut index: BTreeMap<PredKey, Vec<&PredAtom>> = BTreeMap::new();
    for a in s {
        index.entry(a.key()).or_default().push(a);
    }
    let values = pool.all_values();
    let mut out = AtomSet::default();
    for c in &p.clauses {
        let mut bindings = vec![BTreeMap::new()];
        for b in &c.body {
            let candidates = index.get(&b.key()).map(Vec::as_slice).unwrap_or(&[]);
            let mut next = Vec::new();
            for binding in &bindings {
                for g in candidates {
                    let mut ext = binding.clone();
                    if match_atom(b, g, &mut ext) {
                        next.push(ext);
                    }
                }
            }
            bindings = next;
        }
        for binding in bindings {
            let free: Vec<String> = c.head.vars().into_iter().filter(|v| !binding.contains_key(v)).collect();
            let choices = vec![values.clone(); free.len()];
            for combo in product(&choices, bounds.max_atoms + 1) {
                if out.atoms.len() >= bounds.max_atoms {
                    out.truncated = true;
                    return out;
                }
                let theta: Substitution = binding
                    .iter()
                    .map(|(v, t)| (v.clone(), t.clone()))
                    .chain(free.iter().cloned().zip(combo))
                    .collect();
                out.atoms.insert(theta.apply_atom(&c.head));
            }
        }
    }
    out
}

/// Iterates `tp_step` from the empty set. `iterations` is the number of
/// applications performed, including the one that confirmed the fixpoint.
pub fn tp_fixpoint(p: &Program, pool: &ValuePool, bounds: &Bounds) -> AtomSet {
    let mut current = BTreeSet::new();
    for i in 1..=bounds.iter_bound.max(1) {
        let next = tp_step(p, &current, pool, bounds);
        if next.truncated {
            return AtomSet { atoms: next.atoms, truncated: true, iterations: i };
        }
        if next.atoms == current {
            return AtomSet { atoms: current, truncated: false, iterations: i };
        }
        current = next.atoms;
    }
    AtomSet { atoms: current, truncated: true, iterations: bounds.iter_bound.max(1) }
}

/// The interpretation whose signature for each predicate of `s` is exactly
/// the domain tuples of its atoms and which is true on exactly those atoms.
/// Predicates absent from `s` take their entry from `extra`.
pub fn derived_interpretation(s: &AtomSet, extra: &BTreeMap<PredKey, PredInterp>) -> Interpretation {
    let mut sigs: BTreeMap<PredKey, (BTreeSet<Vec<SemDomain>>, BTreeSet<Vec<SemValue>>)> = BTreeMap::new();
    for a in &s.atoms {
        let values = ground_tuple(a).expect("fixpoint atoms are ground");
        let entry = sigs.entry(a.key()).or_default();
        entry.0.insert(values.iter().map(domain_of).collect());
        entry.1.insert(values);
    }
    let mut i = Interpretation::default();
    for (key, pi) in extra {
        if !sigs.contains_key(key) {
            i.insert(key.clone(), pi.clone());
        }
    }
    for (key, (sig, truth)) in sigs {
        i.insert(key, PredInterp { signature: Signature::Listed(sig), truth: Truth::Listed(truth) });
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleene::TruthValue;
    use crate::semantics::{eval_atom, State};
    use crate::syntax::{parse_atom, parse_program};

    fn fixpoint(src: &str) -> AtomSet {
        let p = parse_program(src).unwrap();
        let bounds = Bounds::default();
        tp_fixpoint(&p, &ValuePool::for_program(&p, &bounds), &bounds)
    }

    fn shown(s: &AtomSet) -> Vec<String> {
        s.atoms.iter().map(|a| a.to_string()).collect()
    }

    const FAMILY: &str = "father(john,mary).\nfather(phil,john).\ngrandfather(X,Y) :- father(X,Z), father(Z,Y).";

    #[test]
    fn fixpoint_of_mixed_facts() {
        let p = parse_program("p(1).\np(a).\nq(X) :- p(1.1).").unwrap();
        let bounds = Bounds::default();
        let pool = ValuePool::for_program(&p, &bounds);
        let first = tp_step(&p, &BTreeSet::new(), &pool, &bounds);
        assert_eq!(shown(&first), vec!["p(1)", "p(a)"]);
        let s = tp_fixpoint(&p, &pool, &bounds);
        assert_eq!(shown(&s), vec!["p(1)", "p(a)"]);
        assert_eq!(s.iterations, 2);
        assert!(!s.truncated);
    }

    #[test]
    fn fixpoint_of_family_program() {
        let p = parse_program(FAMILY).unwrap();
        let bounds = Bounds::default();
        let pool = ValuePool::for_program(&p, &bounds);
        let facts: BTreeSet<PredAtom> =
            ["father(john,mary)", "father(phil,john)"].iter().map(|a| parse_atom(a).unwrap()).collect();
        let step = tp_step(&p, &facts, &pool, &bounds);
        assert!(step.contains(&parse_atom("grandfather(phil,mary)").unwrap()));
        assert_eq!(
            shown(&fixpoint(FAMILY)),
            vec!["father(john,mary)", "father(phil,john)", "grandfather(phil,mary)"]
        );
    }

    #[test]
    fn empty_program() {
        let s = fixpoint("");
        assert!(s.atoms.is_empty() && !s.truncated);
    }

    #[test]
    fn non_ground_facts_use_the_pool() {
        let s = fixpoint("p(X,X).");
        assert_eq!(s.atoms.len(), 13);
        assert!(s.contains(&parse_atom("p(a,a)").unwrap()));
    }

    #[test]
    fn infinite_fixpoints_are_truncated() {
        let s = fixpoint("n(z).\nn(s(X)) :- n(X).");
        assert!(s.truncated);
        assert_eq!(s.iterations, Bounds::default().iter_bound);
    }

    #[test]
    fn derived_interpretations() {
        let s = fixpoint("p(1).\np(a).\nq(X) :- p(1.1).");
        let i = derived_interpretation(&s, &BTreeMap::new());
        assert_eq!(i.to_string(), "p/1 :: (int) ∪ (atom) true on {(1), (a)}");

        let q0 = PredKey { name: "q".into(), arity: 0 };
        let extra = [(q0, PredInterp { signature: Signature::Listed([vec![]].into()), truth: Truth::none() })].into();
        let i = derived_interpretation(&AtomSet::default(), &extra);
        assert_eq!(eval_atom(&parse_atom("q").unwrap(), &i, &State::new()), Ok(TruthValue::False));

        let i = derived_interpretation(&AtomSet::default(), &BTreeMap::new());
        assert_eq!(eval_atom(&parse_atom("p(1)").unwrap(), &i, &State::new()), Ok(TruthValue::Wrong));
    }
}
