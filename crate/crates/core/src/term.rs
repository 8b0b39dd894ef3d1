//! Terms over a signature, their evaluation, and prefix notation.
//!
//! Variables print as `x0`, `x1`, ...; applications as `(op arg ...)`, so a
//! constant is `(c)`.

use std::fmt;

use crate::algebra::{checked_pow, Element, FiniteAlgebra};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(op.into(), args)
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Replaces `Var(i)` with `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Result<Term> {
        match self {
            Term::Var(i) => subst.get(*i).cloned().ok_or(Error::UnboundVariable(*i)),
            Term::App(op, args) => Ok(Term::App(
                op.clone(),
                args.iter()
                    .map(|t| t.substitute(subst))
                    .collect::<Result<_>>()?,
            )),
        }
    }

    /// Renames variables: `Var(i)` becomes `Var(map[i])`.
    pub fn rename(&self, map: &[usize]) -> Result<Term> {
        let subst: Vec<Term> = map.iter().map(|&j| Term::Var(j)).collect();
        self.substitute(&subst)
    }

    pub fn parse(text: &str) -> Result<Term> {
        let mut p = Parser { text, pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(op, args) => {
                write!(f, "({op}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        Term::parse(s)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::TermSyntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        if self.text[self.pos..].starts_with('(') {
            self.pos += 1;
            let op = self
                .ident()
                .ok_or_else(|| self.error("expected operation name"))?
                .to_string();
            let mut args = Vec::new();
            loop {
                self.skip_ws();
                match self.text[self.pos..].chars().next() {
                    Some(')') => {
                        self.pos += 1;
                        return Ok(Term::App(op, args));
                    }
                    Some(_) => args.push(self.term()?),
                    None => return Err(self.error("unclosed parenthesis")),
                }
            }
        }
        let start = self.pos;
        let word = self.ident().ok_or_else(|| self.error("expected term"))?;
        match word.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            Some(i) => Ok(Term::Var(i)),
            None => Err(Error::TermSyntax {
                pos: start,
                msg: format!("expected variable, found `{word}`"),
            }),
        }
    }
}

/// Evaluates `t` in `alg` under `assignment` (variable `i` gets `assignment[i]`).
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, assignment: &[Element]) -> Result<Element> {
    match t {
        Term::Var(i) => {
            let v = *assignment.get(*i).ok_or(Error::UnboundVariable(*i))?;
            if v >= alg.size() {
                return Err(Error::OutOfRange {
                    value: v,
                    size: alg.size(),
                });
            }
            Ok(v)
        }
        Term::App(op, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(alg, a, assignment))
                .collect::<Result<Vec<_>>>()?;
            alg.apply_op(op, &vals)
        }
    }
}

/// Operation table of `t` read as an `arity`-ary term function, i.e. its
/// values on all of `A^arity` in lexicographic order (last variable fastest).
pub fn term_table(alg: &FiniteAlgebra, t: &Term, arity: usize) -> Result<Vec<u32>> {
    let n = alg.size();
    let len = checked_pow(n, arity)?;
    table_rec(alg, t, arity, n, len)
}

fn table_rec(alg: &FiniteAlgebra, t: &Term, arity: usize, n: usize, len: usize) -> Result<Vec<u32>> {
    match t {
        Term::Var(i) => {
            if *i >= arity {
                return Err(Error::UnboundVariable(*i));
            }
            let stride = n.pow((arity - 1 - i) as u32);
            Ok((0..len).map(|idx| ((idx / stride) % n) as u32).collect())
        }
        Term::App(op, args) => {
            let index = alg
                .signature()
                .index_of(op)
                .ok_or_else(|| Error::UnknownOp(op.clone()))?;
            let expected = alg.signature().arity(index);
            if args.len() != expected {
                return Err(Error::ArityMismatch {
                    op: op.clone(),
                    expected,
                    got: args.len(),
                });
            }
            let cols = args
                .iter()
                .map(|a| table_rec(alg, a, arity, n, len))
                .collect::<Result<Vec<_>>>()?;
            let mut buf = vec![0; expected];
            Ok((0..len)
                .map(|idx| {
                    for (slot, col) in buf.iter_mut().zip(&cols) {
                        *slot = col[idx] as Element;
                    }
                    alg.apply(index, &buf) as u32
                })
                .collect())
        }
    }
}
