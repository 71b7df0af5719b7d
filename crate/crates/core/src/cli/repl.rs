use std::io::{self, BufRead, Write};

use super::{check_report, load_program, render_tree, RunConfig};
use crate::engine::{build_tree, classify, format_answer, Solutions, TreeClassification};
use crate::syntax::{parse_query, Program};

const HELP: &str = "\
Enter a query such as `p(X).` to solve it. After an answer, `;` asks for
the next one and an empty line stops.
  :load FILE     load a program
  :check         diagnose the loaded program
  :tree QUERY    print the tree of a query
  :help          show this text
  :quit          leave";

/// Line-oriented session. Answers are printed Prolog-style: `true.` or the
/// bindings, `false.` for failed trees and `wrong.` for erroneous ones.
pub fn run_repl<R: BufRead, W: Write>(config: &RunConfig, mut input: R, out: &mut W) -> io::Result<()> {
    let mut config = config.clone();
    let mut program = match &config.program_path {
        Some(path) => match load_program(path) {
            Ok(p) => p,
            Err(f) => {
                writeln!(out, "error: {}", f.message)?;
                Program::default()
            }
        },
        None => Program::default(),
    };
    let mut line = String::new();
    loop {
        write!(out, "?- ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text == ";" {
            // Asking for more after a final answer.
            writeln!(out, "false.")?;
            continue;
        }
        let (directive, rest) = match text.strip_prefix(':') {
            Some(d) => {
                let (name, rest) = d.split_once(char::is_whitespace).unwrap_or((d, ""));
                (Some(name), rest.trim())
            }
            None => (None, text),
        };
        match directive {
            Some("quit" | "q") => return Ok(()),
            Some("help" | "h") => writeln!(out, "{HELP}")?,
            Some("load") if rest.is_empty() => writeln!(out, "error: :load needs a file name")?,
            Some("load") => match load_program(rest.as_ref()) {
                Ok(p) => {
                    writeln!(out, "loaded {} clauses.", p.len())?;
                    program = p;
                    config.program_path = Some(rest.into());
                }
                Err(f) => writeln!(out, "error: {}", f.message)?,
            },
            Some("check") => write!(out, "{}", check_report(&program, &config).output)?,
            Some("tree") => match parse_query(rest) {
                Ok(q) => write!(out, "{}", render_tree(&build_tree(&program, &q, &config.tree_config()), config.output_format))?,
                Err(e) => writeln!(out, "error: query:{e}")?,
            },
            Some(other) => writeln!(out, "error: unknown directive :{other} (try :help)")?,
            None => match parse_query(rest) {
                Ok(q) => answer_query(&program, &q, &config, &mut input, out)?,
                Err(e) => writeln!(out, "error: query:{e}")?,
            },
        }
    }
}

fn answer_query<R: BufRead, W: Write>(
    program: &Program,
    q: &crate::syntax::Query,
    config: &RunConfig,
    input: &mut R,
    out: &mut W,
) -> io::Result<()> {
    let tc = config.tree_config();
    let mut answers = Solutions::new(program, q, tc).peekable();
    let Some(mut current) = answers.next() else {
        let classification = classify(&build_tree(program, q, &tc));
        match classification {
            TreeClassification::FinitelyErroneous => writeln!(out, "wrong.")?,
            TreeClassification::DepthBounded => writeln!(out, "false.\n% depth bound {} reached", config.depth_bound)?,
            _ => writeln!(out, "false.")?,
        }
        return Ok(());
    };
    let mut line = String::new();
    loop {
        let text = format_answer(&current);
        if answers.peek().is_none() {
            return writeln!(out, "{text}.");
        }
        write!(out, "{text} ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 || line.trim() != ";" {
            return writeln!(out, ".");
        }
        current = answers.next().expect("peeked");
    }
}
