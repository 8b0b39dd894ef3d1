//! Text syntax for identities.
//!
//! ```text
//! statement := decl* where* expr "<=" expr
//! decl      := ("cong" | "tol" | "adm") name+ ";"
//! where     := "where" name "=" expr ";" | "where" expr "<=" expr ";"
//! expr      := term ("o" term)*
//! term      := factor ("&" factor)*
//! factor    := name | "(" expr ")" | "conv(" expr ")"
//!            | ("gen_adm" | "gen_tol" | "gen_cong") "(" expr ("," expr)* ")"
//!            | "alt(" expr "," expr "," count ")" | "pow(" expr "," count ")"
//! count     := integer | "k"
//! ```
//!
//! `#` starts a comment running to the end of the line.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::identity::ast::{Count, Definition, Expr, Identity};
use crate::relations::Kind;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    LParen,
    RParen,
    Comma,
    Semi,
    Amp,
    Le,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::IdentitySyntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' | b')' | b',' | b';' | b'&' | b'=' => {
                i += 1;
                out.push((
                    start,
                    match c {
                        b'(' => Tok::LParen,
                        b')' => Tok::RParen,
                        b',' => Tok::Comma,
                        b';' => Tok::Semi,
                        b'&' => Tok::Amp,
                        _ => Tok::Eq,
                    },
                ));
            }
            b'<' => {
                if bytes.get(i + 1) != Some(&b'=') {
                    return Err(syntax(i, "expected `<=`"));
                }
                i += 2;
                out.push((start, Tok::Le));
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i]
                    .parse()
                    .map_err(|_| syntax(start, "integer too large"))?;
                out.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

const RESERVED: &[&str] = &[
    "o", "cong", "tol", "adm", "where", "conv", "gen_adm", "gen_tol", "gen_cong", "alt", "pow",
];

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let pos = self.pos();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(syntax(pos, format!("expected {want}, found {t}"))),
            None => Err(syntax(pos, format!("expected {want}, found end of input"))),
        }
    }

    fn name(&mut self) -> Result<String> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => Ok(s),
            Some(t) => Err(syntax(pos, format!("expected a variable name, found {t}"))),
            None => Err(syntax(pos, "expected a variable name, found end of input")),
        }
    }

    fn statement(&mut self) -> Result<Identity> {
        let mut decls: Vec<(Kind, Vec<String>)> = Vec::new();
        while let Some(kind) = self.peek_ident().and_then(decl_kind) {
            self.at += 1;
            let mut names = vec![self.name()?];
            while self.peek() != Some(&Tok::Semi) {
                names.push(self.name()?);
            }
            self.expect(Tok::Semi)?;
            decls.push((kind, names));
        }
        let mut defs = Vec::new();
        let mut conditions = Vec::new();
        while self.peek_ident() == Some("where") {
            self.at += 1;
            let is_def = matches!(
                (self.toks.get(self.at), self.toks.get(self.at + 1)),
                (Some((_, Tok::Ident(_))), Some((_, Tok::Eq)))
            );
            if is_def {
                let name = self.name()?;
                self.expect(Tok::Eq)?;
                defs.push(Definition {
                    name,
                    expr: self.expr()?,
                });
            } else {
                let sub = self.expr()?;
                self.expect(Tok::Le)?;
                conditions.push((sub, self.expr()?));
            }
            self.expect(Tok::Semi)?;
        }
        let lhs = self.expr()?;
        self.expect(Tok::Le)?;
        let rhs = self.expr()?;
        if let Some(t) = self.peek() {
            return Err(syntax(self.pos(), format!("unexpected {t} after right-hand side")));
        }
        Ok(Identity {
            name: String::new(),
            decls,
            defs,
            conditions,
            lhs,
            rhs,
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.term()?];
        while self.peek_ident() == Some("o") {
            self.at += 1;
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            Expr::Compose(parts)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut parts = vec![self.factor()?];
        while self.peek() == Some(&Tok::Amp) {
            self.at += 1;
            parts.push(self.factor()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            Expr::Meet(parts)
        })
    }

    fn factor(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(word)) => match word.as_str() {
                "conv" => {
                    self.at += 1;
                    self.expect(Tok::LParen)?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Conv(Box::new(e)))
                }
                "gen_adm" | "gen_tol" | "gen_cong" => {
                    self.at += 1;
                    let kind = match word.as_str() {
                        "gen_adm" => Kind::Admissible,
                        "gen_tol" => Kind::Tolerance,
                        _ => Kind::Congruence,
                    };
                    self.expect(Tok::LParen)?;
                    let mut parts = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.at += 1;
                        parts.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Gen(kind, parts))
                }
                "alt" => {
                    self.at += 1;
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let b = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let c = self.count()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Alt(Box::new(a), Box::new(b), c))
                }
                "pow" => {
                    self.at += 1;
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let c = self.count()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Pow(Box::new(a), c))
                }
                _ => Ok(Expr::Var(self.name()?)),
            },
            Some(t) => Err(syntax(pos, format!("expected an expression, found {t}"))),
            None => Err(syntax(pos, "expected an expression, found end of input")),
        }
    }

    fn count(&mut self) -> Result<Count> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Int(n)) => Ok(Count::Fixed(n)),
            Some(Tok::Ident(s)) if s == "k" => Ok(Count::K),
            Some(t) => Err(syntax(pos, format!("malformed count: expected an integer or `k`, found {t}"))),
            None => Err(syntax(pos, "malformed count: found end of input")),
        }
    }
}

fn decl_kind(word: &str) -> Option<Kind> {
    match word {
        "cong" => Some(Kind::Congruence),
        "tol" => Some(Kind::Tolerance),
        "adm" => Some(Kind::Admissible),
        _ => None,
    }
}

/// Parses and validates an identity: every variable must be declared once,
/// and defined variables must be declared before use in definitions.
pub fn parse_identity(text: &str) -> Result<Identity> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
    };
    let id = p.statement()?;
    validate(&id)?;
    Ok(id)
}

fn validate(id: &Identity) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for (name, _) in id.variables() {
        if !seen.insert(name) {
            return Err(Error::InvalidArgument(format!(
                "variable `{name}` declared twice"
            )));
        }
    }
    let mut defined = std::collections::HashSet::new();
    for d in &id.defs {
        if id.kind_of(&d.name).is_none() {
            return Err(Error::Undeclared(d.name.clone()));
        }
        if !defined.insert(d.name.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "variable `{}` defined twice",
                d.name
            )));
        }
        check_declared(id, &d.expr)?;
        let mut cyclic = false;
        d.expr.for_each_var(&mut |v| cyclic |= id.is_defined(v));
        if cyclic {
            return Err(Error::InvalidArgument(format!(
                "definition of `{}` refers to a defined variable",
                d.name
            )));
        }
    }
    for (a, b) in &id.conditions {
        check_declared(id, a)?;
        check_declared(id, b)?;
    }
    check_declared(id, &id.lhs)?;
    check_declared(id, &id.rhs)
}

fn check_declared(id: &Identity, e: &Expr) -> Result<()> {
    let mut missing = None;
    e.for_each_var(&mut |v| {
        if missing.is_none() && id.kind_of(v).is_none() {
            missing = Some(v.to_string());
        }
    });
    match missing {
        Some(v) => Err(Error::Undeclared(v)),
        None => Ok(()),
    }
}

impl std::str::FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Identity> {
        parse_identity(s)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, parts: &[Expr], sep: &str, nested: bool) -> fmt::Result {
    for (i, e) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        let wrap = nested && matches!(e, Expr::Compose(_) | Expr::Meet(_));
        if wrap {
            write!(f, "({e})")?;
        } else {
            write!(f, "{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Compose(parts) => write_list(f, parts, " o ", true),
            Expr::Meet(parts) => write_list(f, parts, " & ", true),
            Expr::Conv(e) => write!(f, "conv({e})"),
            Expr::Gen(kind, parts) => {
                write!(f, "gen_{}(", kind.name())?;
                write_list(f, parts, ", ", false)?;
                f.write_str(")")
            }
            Expr::Alt(a, b, c) => write!(f, "alt({a}, {b}, {c})"),
            Expr::Pow(a, c) => write!(f, "pow({a}, {c})"),
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (kind, names) in &self.decls {
            let _ = write!(out, "{} {}; ", kind.name(), names.join(" "));
        }
        for d in &self.defs {
            let _ = write!(out, "where {} = {}; ", d.name, d.expr);
        }
        for (a, b) in &self.conditions {
            let _ = write!(out, "where {a} <= {b}; ");
        }
        write!(f, "{out}{} <= {}", self.lhs, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_day_identity() {
        let id = parse_identity("cong a b g; a & (b o (a & g) o b) <= alt(a&b, a&g, k)").unwrap();
        assert_eq!(id.decls, vec![(Kind::Congruence, vec!["a".into(), "b".into(), "g".into()])]);
        let ag = Expr::Meet(vec![Expr::var("a"), Expr::var("g")]);
        assert_eq!(
            id.lhs,
            Expr::Meet(vec![
                Expr::var("a"),
                Expr::Compose(vec![Expr::var("b"), ag.clone(), Expr::var("b")])
            ])
        );
        assert_eq!(
            id.rhs,
            Expr::Alt(
                Box::new(Expr::Meet(vec![Expr::var("a"), Expr::var("b")])),
                Box::new(ag),
                Count::K
            )
        );
        assert!(id.congruence_only());
    }

    #[test]
    fn meet_binds_tighter_than_compose() {
        let id = parse_identity("cong a b; a & b o b <= a").unwrap();
        assert_eq!(
            id.lhs,
            Expr::Compose(vec![
                Expr::Meet(vec![Expr::var("a"), Expr::var("b")]),
                Expr::var("b")
            ])
        );
    }

    #[test]
    fn round_trips_nested_structure() {
        for text in [
            "cong a; adm R S; a & (R o S) <= (a & gen_adm(conv(R), S)) o alt((a & R) o (a & S), (a & conv(S)) o (a & conv(R)), k)",
            "tol T P; pow(T, 2) & pow(P, 3) <= pow(T & P, k)",
            "cong a b; (a o b) o a <= a & (b & a)",
            "cong a g; adm R; tol D; where D = R o conv(R); a & (D o (a & g) o D) <= alt(a & D, a & g, k)",
            "cong a b g; tol D; where b <= D; a & (D o (a & g) o b) <= alt(a, b, 0)",
        ] {
            let id = parse_identity(text).unwrap();
            let printed = id.to_string();
            assert_eq!(parse_identity(&printed).unwrap(), id, "{printed}");
        }
    }

    #[test]
    fn reports_positions_and_undeclared() {
        match parse_identity("cong a; a o <= a") {
            Err(Error::IdentitySyntax { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            parse_identity("cong a; a o b <= a").unwrap_err(),
            Error::Undeclared("b".into())
        );
        assert!(matches!(
            parse_identity("cong a; alt(a, a, m) <= a"),
            Err(Error::IdentitySyntax { .. })
        ));
        assert!(parse_identity("cong a a; a <= a").is_err());
        assert!(parse_identity("cong a; a <= a a").is_err());
    }
}
