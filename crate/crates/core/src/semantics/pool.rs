use std::collections::BTreeSet;

use serde::Serialize;

use super::SemDomain;
use crate::syntax::{BaseType, Program, Query, Term};

/// Limits that make the semantic checks finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Integers in the pool range over `-value_bound..=value_bound`.
    pub value_bound: i64,
    /// Maximum nesting of generated tree values.
    pub tree_depth: usize,
    pub max_tree_values: usize,
    /// Iterations of the immediate consequence operator.
    pub iter_bound: usize,
    pub max_atoms: usize,
    /// States enumerated per (expression, context) pair.
    pub max_states: usize,
    /// Candidate contexts per expression.
    pub max_contexts: usize,
    /// Predicates without atoms in the fixpoint get the full signature and
    /// are either everywhere true or everywhere false; beyond this many
    /// such predicates the search gives up.
    pub max_free_predicates: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            value_bound: 2,
            tree_depth: 2,
            max_tree_values: 1_000,
            iter_bound: 16,
            max_atoms: 20_000,
            max_states: 50_000,
            max_contexts: 256,
            max_free_predicates: 10,
        }
    }
}

/// Finite stand-ins for the semantic domains: a canonical set of constants
/// per base domain, the constants of the program and query, and trees over
/// the program's functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuePool {
    ints: BTreeSet<Term>,
    floats: BTreeSet<Term>,
    atoms: BTreeSet<Term>,
    strings: BTreeSet<Term>,
    ground_trees: BTreeSet<Term>,
    functors: BTreeSet<(String, usize)>,
    tree_depth: usize,
    max_tree_values: usize,
}

impl ValuePool {
    pub fn new(bounds: &Bounds) -> ValuePool {
        let k = bounds.value_bound.max(0);
        ValuePool {
            ints: (-k..=k).map(Term::int).collect(),
            floats: ["-1.0", "0.0", "1.5"].into_iter().map(Term::float).collect(),
            atoms: ["a", "b", "c"].into_iter().map(Term::atom).collect(),
            strings: ["s", "t"].into_iter().map(Term::string).collect(),
            ground_trees: BTreeSet::new(),
            functors: BTreeSet::new(),
            tree_depth: bounds.tree_depth,
            max_tree_values: bounds.max_tree_values,
        }
    }

    pub fn for_program(p: &Program, bounds: &Bounds) -> ValuePool {
        let mut pool = ValuePool::new(bounds);
        pool.add_program(p);
        pool
    }

    pub fn add_program(&mut self, p: &Program) {
        self.functors.extend(p.functors());
        for c in &p.clauses {
            for a in c.atoms() {
                a.args.iter().for_each(|t| self.add_term(t));
            }
        }
    }

    pub fn add_query(&mut self, q: &Query) {
        for a in &q.atoms {
            a.args.iter().for_each(|t| self.add_term(t));
        }
    }

    /// Adds the constants, ground compound subterms and functors of `t`.
    pub fn add_term(&mut self, t: &Term) {
        match t {
            Term::Var(_) => {}
            Term::Const { ty, .. } => {
                let set = match ty {
                    BaseType::Int => &mut self.ints,
                    BaseType::Float => &mut self.floats,
                    BaseType::Atom => &mut self.atoms,
                    BaseType::String => &mut self.strings,
                };
                set.insert(t.clone());
            }
            Term::Compound(f, args) => {
                self.functors.insert((f.clone(), args.len()));
                if t.is_ground() {
                    self.ground_trees.insert(t.clone());
                }
                args.iter().for_each(|a| self.add_term(a));
            }
        }
    }

    fn base_values(&self, d: &SemDomain) -> &BTreeSet<Term> {
        match d {
            SemDomain::Int => &self.ints,
            SemDomain::Float => &self.floats,
            SemDomain::Atom => &self.atoms,
            SemDomain::String => &self.strings,
            _ => unreachable!("not a base domain"),
        }
    }

    /// Pool values lying in `d`. Tree domains get every combination of
    /// child values.
    pub fn values_of(&self, d: &SemDomain) -> Vec<Term> {
        match d {
            SemDomain::Tree(f, ds) => {
                let children: Vec<Vec<Term>> = ds.iter().map(|c| self.values_of(c)).collect();
                product(&children, self.max_tree_values)
                    .into_iter()
                    .map(|args| Term::compound(f.clone(), args))
                    .collect()
            }
            SemDomain::Bool | SemDomain::W => Vec::new(),
            base => self.base_values(base).iter().cloned().collect(),
        }
    }

    /// Base values, the ground trees seen in the program and query, and
    /// generated trees up to the depth bound whose children are one
    /// representative per domain of the level below.
    pub fn all_values(&self) -> Vec<Term> {
        let mut out: Vec<Term> = SemDomain::BASE.iter().flat_map(|d| self.values_of(d)).collect();
        let mut seen: BTreeSet<Term> = out.iter().cloned().collect();
        let mut reps: Vec<Term> = SemDomain::BASE.iter().filter_map(|d| self.base_values(d).iter().next().cloned()).collect();
        let mut generated = 0usize;
        for _ in 0..self.tree_depth {
            let mut level = Vec::new();
            for (f, n) in &self.functors {
                let children = vec![reps.clone(); *n];
                for args in product(&children, self.max_tree_values) {
                    if generated >= self.max_tree_values {
                        break;
                    }
                    let t = Term::compound(f.clone(), args);
                    if seen.insert(t.clone()) {
                        generated += 1;
                        level.push(t);
                    }
                }
            }
            out.extend(level.iter().cloned());
            reps.extend(level);
        }
        for t in &self.ground_trees {
            if seen.insert(t.clone()) {
                out.push(t.clone());
            }
        }
        out
    }
}

/// Cartesian product in lexicographic order, cut off after `limit` tuples.
pub(crate) fn product<T: Clone>(sets: &[Vec<T>], limit: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for set in sets {
        let mut next = Vec::new();
        'outer: for prefix in &out {
            for x in set {
                if next.len() >= limit {
                    break 'outer;
                }
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_term};

    #[test]
    fn default_pool() {
        let pool = ValuePool::new(&Bounds::default());
        let ints: Vec<String> = pool.values_of(&SemDomain::Int).iter().map(|t| t.to_string()).collect();
        assert_eq!(ints.len(), 5);
        assert!(ints.contains(&"-2".to_string()) && ints.contains(&"2".to_string()));
        assert_eq!(pool.values_of(&SemDomain::Float).len(), 3);
        assert_eq!(pool.values_of(&SemDomain::Atom).len(), 3);
        assert_eq!(pool.values_of(&SemDomain::String).len(), 2);
        assert_eq!(pool.all_values().len(), 13);
        assert!(pool.values_of(&SemDomain::Bool).is_empty());
    }

    #[test]
    fn program_constants_and_trees() {
        let p = parse_program("father(john,mary).\nn(s(s(z))).\nv(7).").unwrap();
        let pool = ValuePool::for_program(&p, &Bounds::default());
        let atoms = pool.values_of(&SemDomain::Atom);
        assert!(atoms.contains(&Term::atom("john")) && atoms.contains(&Term::atom("z")));
        assert!(pool.values_of(&SemDomain::Int).contains(&Term::int(7)));
        let all = pool.all_values();
        assert!(all.contains(&parse_term("s(s(z))").unwrap()));
        assert!(all.contains(&parse_term("s(s(-1))").unwrap()));
        let tree = SemDomain::Tree("s".into(), vec![SemDomain::Int]);
        assert_eq!(pool.values_of(&tree).len(), 6);
    }

    #[test]
    fn products() {
        assert_eq!(product(&[vec![1, 2], vec![3]], 10), vec![vec![1, 3], vec![2, 3]]);
        assert_eq!(product::<i32>(&[], 10), vec![Vec::<i32>::new()]);
        assert_eq!(product(&[vec![1, 2], vec![3, 4]], 3).len(), 3);
    }
}
