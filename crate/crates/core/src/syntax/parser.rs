use std::iter::Peekable;
use std::str::Chars;

use thiserror::Error;

use super::{BaseType, Clause, ClauseId, PredAtom, Program, Query, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(String),
    Float(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Int(s) | Tok::Float(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, column, message: message.into() }
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, buf: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            buf.push(c);
            self.bump();
        }
    }

    fn number(&mut self, mut buf: String, line: usize, column: usize) -> Result<Tok, ParseError> {
        self.take_while(&mut buf, |c| c.is_ascii_digit());
        // A `.` only continues the number when a digit follows; otherwise it
        // terminates the clause.
        let mut ahead = self.chars.clone();
        if ahead.next() == Some('.') && ahead.next().is_some_and(|c| c.is_ascii_digit()) {
            buf.push('.');
            self.bump();
            self.take_while(&mut buf, |c| c.is_ascii_digit());
            return Ok(Tok::Float(buf));
        }
        if buf.parse::<i64>().is_err() {
            return Err(self.error(line, column, format!("integer `{buf}` out of range")));
        }
        Ok(Tok::Int(buf))
    }

    fn string(&mut self, line: usize, column: usize) -> Result<Tok, ParseError> {
        let mut buf = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, column, "unterminated string")),
                Some('"') => return Ok(Tok::Str(buf)),
                Some('\\') => match self.bump() {
                    Some('n') => buf.push('\n'),
                    Some('t') => buf.push('\t'),
                    Some(c @ ('"' | '\\')) => buf.push(c),
                    _ => return Err(self.error(self.line, self.column, "invalid escape in string")),
                },
                Some(c) => buf.push(c),
            }
        }
    }

    fn next_token(&mut self) -> Result<Spanned, ParseError> {
        self.skip_trivia();
        let (line, column) = (self.line, self.column);
        let Some(c) = self.bump() else {
            return Ok(Spanned { tok: Tok::Eof, line, column });
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => {
                if self.chars.peek() == Some(&'-') {
                    self.bump();
                    Tok::Neck
                } else {
                    return Err(self.error(line, column, "expected `:-`"));
                }
            }
            '"' => self.string(line, column)?,
            '-' if self.chars.peek().is_some_and(|c| c.is_ascii_digit()) => {
                self.number("-".into(), line, column)?
            }
            c if c.is_ascii_digit() => self.number(c.to_string(), line, column)?,
            c if c.is_alphabetic() || c == '_' => {
                let mut buf = c.to_string();
                self.take_while(&mut buf, |c| c.is_alphanumeric() || c == '_');
                if c.is_uppercase() || c == '_' {
                    Tok::Var(buf)
                } else {
                    Tok::Ident(buf)
                }
            }
            other => return Err(self.error(line, column, format!("unexpected character `{other}`"))),
        };
        Ok(Spanned { tok, line, column })
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            let t = self.next_token()?;
            let done = t.tok == Tok::Eof;
            out.push(t);
            if done {
                return Ok(out);
            }
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    anon: usize,
    anon_names: Vec<String>,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: Lexer::new(src).tokenize()?, pos: 0, anon: 0, anon_names: Vec::new() })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError { line: t.line, column: t.column, message: message.into() }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {}, found {}", tok.describe(), self.peek().tok.describe())))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.advance();
        match t.tok {
            Tok::Var(name) if name == "_" => {
                // Placeholder names cannot be written in source text.
                self.anon += 1;
                let placeholder = format!("_ {}", self.anon);
                self.anon_names.push(placeholder.clone());
                Ok(Term::Var(placeholder))
            }
            Tok::Var(name) => Ok(Term::Var(name)),
            Tok::Int(s) => Ok(Term::constant(s, BaseType::Int)),
            Tok::Float(s) => Ok(Term::constant(s, BaseType::Float)),
            Tok::Str(s) => Ok(Term::constant(s, BaseType::String)),
            Tok::Ident(name) => {
                if self.peek().tok != Tok::LParen {
                    return Ok(Term::constant(name, BaseType::Atom));
                }
                self.advance();
                if self.peek().tok == Tok::RParen {
                    return Err(self.error_here("compound terms need at least one argument"));
                }
                let args = self.term_list()?;
                self.expect(Tok::RParen)?;
                Ok(Term::Compound(name, args))
            }
            other => Err(ParseError {
                line: t.line,
                column: t.column,
                message: format!("expected a term, found {}", other.describe()),
            }),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        while self.peek().tok == Tok::Comma {
            self.advance();
            args.push(self.term()?);
        }
        Ok(args)
    }

    fn atom(&mut self) -> Result<PredAtom, ParseError> {
        let t = self.advance();
        let Tok::Ident(pred) = t.tok else {
            return Err(ParseError {
                line: t.line,
                column: t.column,
                message: format!("expected a predicate symbol, found {}", t.tok.describe()),
            });
        };
        if self.peek().tok != Tok::LParen {
            return Ok(PredAtom::new(pred, vec![]));
        }
        self.advance();
        if self.peek().tok == Tok::RParen {
            self.advance();
            return Ok(PredAtom::new(pred, vec![]));
        }
        let args = self.term_list()?;
        self.expect(Tok::RParen)?;
        Ok(PredAtom::new(pred, args))
    }

    fn atom_list(&mut self) -> Result<Vec<PredAtom>, ParseError> {
        let mut atoms = vec![self.atom()?];
        while self.peek().tok == Tok::Comma {
            self.advance();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    /// Gives each anonymous variable a fresh `_G<k>` name that does not
    /// clash with a named variable of the same clause or query.
    fn name_anonymous(&mut self, atoms: &mut [PredAtom]) {
        if self.anon_names.is_empty() {
            return;
        }
        let mut taken = Vec::new();
        atoms.iter().for_each(|a| a.collect_vars(&mut taken));
        let mut k = 0;
        for placeholder in std::mem::take(&mut self.anon_names) {
            let fresh = loop {
                k += 1;
                let candidate = format!("_G{k}");
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            for a in atoms.iter_mut() {
                a.args.iter_mut().for_each(|t| rename_var(t, &placeholder, &fresh));
            }
            taken.push(fresh);
        }
    }
}

fn rename_var(t: &mut Term, from: &str, to: &str) {
    match t {
        Term::Var(v) if v == from => *v = to.to_string(),
        Term::Var(_) | Term::Const { .. } => {}
        Term::Compound(_, args) => args.iter_mut().for_each(|a| rename_var(a, from, to)),
    }
}

/// Parses a program: a sequence of facts `p(…).` and rules `p(…) :- q(…), ….`
///
/// Constants are typed by lexical class: digits are `int`, digits with a
/// fractional part are `float`, lowercase identifiers are `atom`, and
/// double-quoted text is `string`. Uppercase or `_`-initial identifiers are
/// variables.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let mut clauses = Vec::new();
    while !p.at_eof() {
        let head = p.atom()?;
        let body = if p.peek().tok == Tok::Neck {
            p.advance();
            p.atom_list()?
        } else {
            Vec::new()
        };
        p.expect(Tok::Dot)?;
        let mut atoms: Vec<PredAtom> = std::iter::once(head).chain(body).collect();
        p.name_anonymous(&mut atoms);
        let head = atoms.remove(0);
        clauses.push(Clause::new(ClauseId(clauses.len() + 1), head, atoms));
    }
    Ok(Program::new(clauses))
}

/// Parses a query: atoms separated by commas and terminated by `.`.
/// The terminating `.` may be omitted; empty input is the empty query.
pub fn parse_query(src: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(src)?;
    if p.at_eof() {
        return Ok(Query::empty());
    }
    let mut atoms = p.atom_list()?;
    if !p.at_eof() {
        p.expect(Tok::Dot)?;
    }
    if !p.at_eof() {
        return Err(p.error_here("unexpected input after query"));
    }
    p.name_anonymous(&mut atoms);
    Ok(Query::new(atoms))
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if !p.at_eof() {
        return Err(p.error_here("unexpected input after term"));
    }
    Ok(t)
}

pub fn parse_atom(src: &str) -> Result<PredAtom, ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.atom()?;
    if !p.at_eof() {
        return Err(p.error_here("unexpected input after atom"));
    }
    Ok(a)
}
