//! Generators and reference oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsld_core::syntax::{BaseType, Clause, ClauseId, PredAtom, Program, Query, Substitution, Term};
use tsld_core::unify::mm_unify_atoms;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const VARS: [&str; 4] = ["X", "Y", "Z", "W"];
const FUNCTORS: [(&str, usize); 3] = [("f", 1), ("g", 2), ("h", 1)];

pub fn random_constant(r: &mut ChaCha8Rng) -> Term {
    match r.gen_range(0..8) {
        0 => Term::int(1),
        1 => Term::int(2),
        2 => Term::float("1.5"),
        3 => Term::float("2.5"),
        4 => Term::atom("a"),
        5 => Term::atom("b"),
        6 => Term::string("s"),
        _ => Term::string("t"),
    }
}

/// Terms of depth at most `depth` over four variables, constants of every
/// base type and the functors f/1, g/2, h/1.
pub fn random_term(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let roll = r.gen_range(0..10);
    if depth == 0 || roll < 3 {
        return Term::var(*VARS.choose(r).unwrap());
    }
    if roll < 6 {
        return random_constant(r);
    }
    let (f, n) = *FUNCTORS.choose(r).unwrap();
    Term::compound(f, (0..n).map(|_| random_term(r, depth - 1)).collect())
}

/// A pair of terms that agree on the top functor more often than chance,
/// so that deep unifications are exercised.
pub fn random_pair(r: &mut ChaCha8Rng, depth: usize) -> (Term, Term) {
    let a = random_term(r, depth);
    let b = match &a {
        Term::Compound(f, args) if r.gen_bool(0.6) => {
            Term::compound(f.clone(), args.iter().map(|_| random_term(r, depth.saturating_sub(1))).collect())
        }
        _ => random_term(r, depth),
    };
    (a, b)
}

/// Extends `binding` so that `pattern` instantiates to `t`.
fn matches(pattern: &Term, t: &Term, binding: &mut BTreeMap<String, Term>) -> bool {
    match (pattern, t) {
        (Term::Var(v), _) => match binding.get(v) {
            Some(b) => b == t,
            None => {
                binding.insert(v.clone(), t.clone());
                true
            }
        },
        (Term::Const { .. }, _) => pattern == t,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| matches(x, y, binding))
        }
        _ => false,
    }
}

/// Whether `specific` is an instance of `general`, position by position.
pub fn is_instance(general: &[Term], specific: &[Term]) -> bool {
    let mut binding = BTreeMap::new();
    general.len() == specific.len() && general.iter().zip(specific).all(|(g, s)| matches(g, s, &mut binding))
}

/// Two substitutions are equivalent on `vars` when each image tuple is an
/// instance of the other.
pub fn equivalent_on(a: &Substitution, b: &Substitution, vars: &[String]) -> bool {
    let ta: Vec<Term> = vars.iter().map(|v| a.apply(&Term::var(v.clone()))).collect();
    let tb: Vec<Term> = vars.iter().map(|v| b.apply(&Term::var(v.clone()))).collect();
    is_instance(&ta, &tb) && is_instance(&tb, &ta)
}

/// Type of a ground term as a string; independent of the library's own
/// type computation.
pub fn type_string(t: &Term) -> Option<String> {
    match t {
        Term::Var(_) => None,
        Term::Const { ty, .. } => Some(
            match ty {
                BaseType::Int => "int",
                BaseType::Float => "float",
                BaseType::Atom => "atom",
                BaseType::String => "string",
            }
            .to_string(),
        ),
        Term::Compound(f, args) => {
            let inner: Option<Vec<String>> = args.iter().map(type_string).collect();
            Some(format!("{f}({})", inner?.join(",")))
        }
    }
}

/// Twelve ground terms covering every base type and the generator's
/// functors.
pub fn ground_pool() -> Vec<Term> {
    [
        "1", "1.5", "a", "\"s\"", "f(1)", "f(a)", "h(1.5)", "g(1,a)", "g(a,1)", "f(f(1))", "g(f(1),a)", "h(\"s\")",
    ]
    .iter()
    .map(|s| tsld_core::syntax::parse_term(s).unwrap())
    .collect()
}

/// Brute force: some assignment of pool terms to the variables gives both
/// terms the same type.
pub fn type_equalizer_exists(t1: &Term, t2: &Term, pool: &[Term]) -> bool {
    let mut vars: Vec<String> = t1.vars();
    vars.extend(t2.vars());
    let vars: Vec<String> = vars.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let sigma: Substitution =
            vars.iter().zip(&idx).map(|(v, &i)| (v.clone(), pool[i].clone())).collect();
        if type_string(&sigma.apply(t1)) == type_string(&sigma.apply(t2)) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return false;
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Options for the program generator.
#[derive(Clone, Copy, Debug)]
pub struct ProgramShape {
    /// Draw all constants of a program from a single base type.
    pub single_type: bool,
    pub functors: bool,
}

const PREDICATES: [(&str, usize); 4] = [("p", 1), ("q", 2), ("r", 1), ("s", 2)];

fn program_constant(r: &mut ChaCha8Rng, ty: Option<BaseType>) -> Term {
    let ty = ty.unwrap_or_else(|| *BaseType::ALL.choose(r).unwrap());
    let i = r.gen_range(0..2);
    match ty {
        BaseType::Int => Term::int(i + 1),
        BaseType::Float => Term::float(["1.5", "2.5"][i as usize]),
        BaseType::Atom => Term::atom(["a", "b"][i as usize]),
        BaseType::String => Term::string(["s", "t"][i as usize]),
    }
}

fn program_arg(r: &mut ChaCha8Rng, shape: ProgramShape, ty: Option<BaseType>, vars: &[&str]) -> Term {
    match r.gen_range(0..10) {
        0..=3 => Term::var(*vars.choose(r).unwrap()),
        4 | 5 if shape.functors => {
            let inner = if r.gen_bool(0.5) { Term::var(*vars.choose(r).unwrap()) } else { program_constant(r, ty) };
            Term::compound("f", vec![inner])
        }
        _ => program_constant(r, ty),
    }
}

fn program_atom(r: &mut ChaCha8Rng, shape: ProgramShape, ty: Option<BaseType>, vars: &[&str]) -> PredAtom {
    let (name, arity) = *PREDICATES.choose(r).unwrap();
    PredAtom::new(name, (0..arity).map(|_| program_arg(r, shape, ty, vars)).collect())
}

/// Programs of at most five clauses over predicates of arity at most two,
/// with bodies of at most two atoms.
pub fn random_program(r: &mut ChaCha8Rng, shape: ProgramShape) -> Program {
    let ty = shape.single_type.then(|| *BaseType::ALL.choose(r).unwrap());
    let vars = ["X", "Y", "Z"];
    let n = r.gen_range(1..=5);
    let clauses = (0..n)
        .map(|i| {
            let head = program_atom(r, shape, ty, &vars);
            let body_len = if r.gen_bool(0.5) { 0 } else { r.gen_range(1..=2) };
            let body = (0..body_len).map(|_| program_atom(r, shape, ty, &vars)).collect();
            Clause::new(ClauseId(i + 1), head, body)
        })
        .collect();
    Program::new(clauses)
}

/// A query of one or two atoms over the program's vocabulary.
pub fn random_query(r: &mut ChaCha8Rng, shape: ProgramShape, p: &Program) -> Query {
    let ty = if shape.single_type {
        p.clauses.iter().flat_map(|c| c.atoms()).flat_map(|a| &a.args).find_map(|t| match t {
            Term::Const { ty, .. } => Some(*ty),
            Term::Compound(_, args) => args.iter().find_map(|a| match a {
                Term::Const { ty, .. } => Some(*ty),
                _ => None,
            }),
            Term::Var(_) => None,
        })
    } else {
        None
    };
    let n = r.gen_range(1..=2);
    Query::new((0..n).map(|_| program_atom(r, shape, ty, &["A", "B"])).collect())
}

/// The query with its variables renamed `V0, V1, …` in order of first
/// occurrence.
pub fn canonical(q: &Query) -> String {
    let mut seen: Vec<String> = Vec::new();
    for v in q.vars() {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    let renaming: Substitution =
        seen.iter().enumerate().map(|(i, v)| (v.clone(), Term::var(format!("V{i}")))).collect();
    renaming.apply_query(q).to_string()
}

/// Textbook SLD resolution with untyped unification, leftmost selection and
/// depth-first search. Returns the canonical instances of `q` for every
/// success, or `None` when some branch reaches `depth`.
pub fn reference_sld(p: &Program, q: &Query, depth: usize) -> Option<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    let mut counter = 0usize;
    let mut stack: Vec<(Vec<PredAtom>, Substitution, usize)> = vec![(q.atoms.clone(), Substitution::new(), 0)];
    while let Some((goals, theta, d)) = stack.pop() {
        let Some((selected, rest)) = goals.split_first() else {
            out.insert(canonical(&theta.apply_query(q)));
            continue;
        };
        if d >= depth {
            return None;
        }
        for c in &p.clauses {
            counter += 1;
            let fresh: Substitution =
                c.vars().into_iter().map(|v| (v.clone(), Term::var(format!("{v}__{counter}")))).collect();
            let c = fresh.apply_clause(c);
            if let Some(mgu) = mm_unify_atoms(selected, &c.head) {
                let next: Vec<PredAtom> = c.body.iter().chain(rest).map(|a| mgu.apply_atom(a)).collect();
                let composed: Substitution =
                    q.vars().into_iter().map(|v| (v.clone(), mgu.apply(&theta.apply(&Term::var(v))))).collect();
                stack.push((next, composed, d + 1));
            }
        }
    }
    Some(out)
}
