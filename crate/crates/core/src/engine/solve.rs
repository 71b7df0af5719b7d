use super::diagnose::{diagnose_query, Diagnosis};
use super::tree::{build_tree, classify, TreeClassification, TreeConfig};
use super::{applicable_clauses, branch_avoid, step_at, StepResult};
use crate::syntax::{Program, Query, Substitution};

struct Frame {
    query: Query,
    answer: Substitution,
    depth: usize,
}

/// Lazy depth-first, left-to-right enumeration of computed answers.
///
/// Queries carrying the false marker are pruned: they can only end in
/// `false` or `wrong`.
pub struct Solutions<'p> {
    program: &'p Program,
    root_vars: Vec<String>,
    config: TreeConfig,
    stack: Vec<Frame>,
    expanded: usize,
    truncated: bool,
}

impl<'p> Solutions<'p> {
    pub fn new(program: &'p Program, q: &Query, config: TreeConfig) -> Solutions<'p> {
        Solutions {
            program,
            root_vars: q.vars(),
            config,
            stack: vec![Frame { query: q.clone(), answer: Substitution::new(), depth: 0 }],
            expanded: 0,
            truncated: false,
        }
    }

    /// Whether some branch was cut at the depth bound or node budget so far.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

impl Iterator for Solutions<'_> {
    type Item = Substitution;

    fn next(&mut self) -> Option<Substitution> {
        while let Some(frame) = self.stack.pop() {
            if frame.query.false_marker {
                continue;
            }
            if frame.query.is_success() {
                return Some(frame.answer);
            }
            if frame.depth >= self.config.depth_bound || self.expanded >= self.config.max_nodes {
                self.truncated = true;
                continue;
            }
            self.expanded += 1;
            let selected = self.config.selection.select(&frame.query).expect("non-empty query");
            let mut avoid = branch_avoid(&frame.query, &self.root_vars, &frame.answer);
            let mut children = Vec::new();
            for c in applicable_clauses(self.program, &frame.query.atoms[selected]) {
                let step = step_at(self.program, &frame.query, selected, c, &mut avoid).expect("applicable clause");
                if let StepResult::Progress { next, mgu, .. } = step {
                    let answer = frame.answer.then(&mgu).restrict(&self.root_vars);
                    children.push(Frame { query: next, answer, depth: frame.depth + 1 });
                }
            }
            self.stack.extend(children.into_iter().rev());
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub answers: Vec<Substitution>,
    pub classification: TreeClassification,
    pub diagnosis: Diagnosis,
}

/// Up to `max_answers` answers in tree order, plus the classification of
/// the whole tree and a diagnosis.
pub fn solve(p: &Program, q: &Query, config: &TreeConfig, max_answers: usize) -> SolveResult {
    let answers = Solutions::new(p, q, *config).take(max_answers).collect();
    let classification = classify(&build_tree(p, q, config));
    let diagnosis = diagnose_query(p, q, config);
    SolveResult { answers, classification, diagnosis }
}

/// `X = 1, Y = a`, or `true` for the empty answer.
pub fn format_answer(answer: &Substitution) -> String {
    if answer.is_empty() {
        return "true".into();
    }
    answer.iter().map(|(v, t)| format!("{v} = {t}")).collect::<Vec<_>>().join(", ")
}
