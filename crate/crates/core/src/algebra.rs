//! Finite algebras given by operation tables, and the `.alg` text format.
//!
//! The universe of an algebra of size `n` is always `{0, .., n-1}`. Each
//! operation table is stored row-major in lexicographic order of the argument
//! tuple, the last argument varying fastest. Operations are kept sorted by
//! name, which is also the order used when serializing.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// An element of a finite algebra, identified by its index.
pub type Element = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(ops: Vec<(String, usize)>) -> Result<Self> {
        let mut sorted = ops;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate operation name `{}`",
                    w[0].0
                )));
            }
        }
        Ok(Signature { ops: sorted })
    }

    pub fn ops(&self) -> &[(String, usize)] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].1
    }
}

/// A total operation `A^arity -> A` stored as a flat table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    signature: Signature,
    ops: Vec<Operation>,
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, size: usize, mut ops: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("algebra size must be positive".into()));
        }
        ops.sort_by(|a, b| a.name.cmp(&b.name));
        let signature = Signature::new(ops.iter().map(|o| (o.name.clone(), o.arity)).collect())?;
        for op in &ops {
            let expected = checked_pow(size, op.arity)?;
            if op.table.len() != expected {
                return Err(Error::InvalidArgument(format!(
                    "table of `{}` has {} entries, expected {}",
                    op.name,
                    op.table.len(),
                    expected
                )));
            }
            if let Some(&bad) = op.table.iter().find(|&&v| v as usize >= size) {
                return Err(Error::OutOfRange {
                    value: bad as usize,
                    size,
                });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            size,
            signature,
            ops,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, index: usize) -> &Operation {
        &self.ops[index]
    }

    /// Table lookup by operation index; no bounds checking beyond the slice.
    #[inline]
    pub fn apply(&self, op: usize, args: &[Element]) -> Element {
        let o = &self.ops[op];
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.size + a;
        }
        o.table[idx] as Element
    }

    pub fn apply_op(&self, op: &str, args: &[Element]) -> Result<Element> {
        let index = self
            .signature
            .index_of(op)
            .ok_or_else(|| Error::UnknownOp(op.to_string()))?;
        let arity = self.ops[index].arity;
        if args.len() != arity {
            return Err(Error::ArityMismatch {
                op: op.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        if let Some(&bad) = args.iter().find(|&&a| a >= self.size) {
            return Err(Error::OutOfRange {
                value: bad,
                size: self.size,
            });
        }
        Ok(self.apply(index, args))
    }

    pub fn is_idempotent(&self) -> bool {
        self.ops.iter().all(|op| {
            (0..self.size).all(|a| {
                let args = vec![a; op.arity];
                op.arity > 0 && self.apply(self.signature.index_of(&op.name).unwrap(), &args) == a
            })
        })
    }

    /// Canonical `.alg` text: operations in name order, one table row per
    /// line (last argument varying along the row).
    pub fn to_alg_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "algebra {}", self.name).unwrap();
        writeln!(out, "size {}", self.size).unwrap();
        for op in &self.ops {
            writeln!(out, "op {} {}", op.name, op.arity).unwrap();
            let row = if op.arity == 0 { 1 } else { self.size };
            for chunk in op.table.chunks(row) {
                let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", line.join(" ")).unwrap();
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_algebra(text)
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or_else(|| {
            Error::InvalidArgument(format!("{base}^{exp} overflows the address space"))
        })?;
    }
    Ok(acc)
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::AlgebraSyntax {
        line,
        msg: msg.into(),
    }
}

/// Parses the `.alg` format. Errors carry the 1-based line number.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    // (line number, token)
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            tokens.push((i + 1, tok));
        }
    }
    let mut pos = 0;
    let last_line = text.lines().count().max(1);

    let expect_keyword = |pos: &mut usize, kw: &str| -> Result<usize> {
        match tokens.get(*pos) {
            Some(&(line, tok)) if tok == kw => {
                *pos += 1;
                Ok(line)
            }
            Some(&(line, tok)) => Err(syntax(line, format!("expected `{kw}`, found `{tok}`"))),
            None => Err(syntax(last_line, format!("expected `{kw}`, found end of file"))),
        }
    };

    let header_line = expect_keyword(&mut pos, "algebra")?;
    let name = match tokens.get(pos) {
        Some(&(line, tok)) if line == header_line => tok.to_string(),
        _ => return Err(syntax(header_line, "missing algebra name")),
    };
    pos += 1;
    if let Some(&(line, tok)) = tokens.get(pos) {
        if line == header_line {
            return Err(syntax(line, format!("unexpected token `{tok}` after algebra name")));
        }
    }
    let size_line = expect_keyword(&mut pos, "size")?;
    let size: usize = match tokens.get(pos) {
        Some(&(line, tok)) => tok
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .ok_or_else(|| syntax(line, format!("invalid size `{tok}`")))?,
        None => return Err(syntax(size_line, "missing size")),
    };
    pos += 1;

    let mut ops = Vec::new();
    while pos < tokens.len() {
        let op_line = expect_keyword(&mut pos, "op")?;
        let op_name = match tokens.get(pos) {
            Some(&(line, tok)) if line == op_line => tok.to_string(),
            _ => return Err(syntax(op_line, "missing operation name")),
        };
        pos += 1;
        let arity: usize = match tokens.get(pos) {
            Some(&(line, tok)) if line == op_line => tok
                .parse()
                .map_err(|_| syntax(line, format!("invalid arity `{tok}`")))?,
            _ => return Err(syntax(op_line, "missing arity")),
        };
        pos += 1;
        let len = checked_pow(size, arity).map_err(|e| syntax(op_line, e.to_string()))?;
        let mut table = Vec::with_capacity(len);
        while table.len() < len {
            match tokens.get(pos) {
                Some(&(line, tok)) => {
                    if tok == "op" {
                        return Err(syntax(
                            line,
                            format!(
                                "wrong table length for `{op_name}`: {} entries, expected {len}",
                                table.len()
                            ),
                        ));
                    }
                    let v: usize = tok
                        .parse()
                        .map_err(|_| syntax(line, format!("invalid table entry `{tok}`")))?;
                    if v >= size {
                        return Err(syntax(line, format!("entry out of range: {v} >= {size}")));
                    }
                    table.push(v as u32);
                    pos += 1;
                }
                None => {
                    return Err(syntax(
                        last_line,
                        format!(
                            "wrong table length for `{op_name}`: {} entries, expected {len}",
                            table.len()
                        ),
                    ))
                }
            }
        }
        if let Some(&(line, tok)) = tokens.get(pos) {
            if tok != "op" {
                return Err(syntax(
                    line,
                    format!("wrong table length for `{op_name}`: extra entry `{tok}`"),
                ));
            }
        }
        ops.push(Operation {
            name: op_name,
            arity,
            table,
        });
    }
    FiniteAlgebra::new(name, size, ops).map_err(|e| syntax(header_line, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LATTICE2: &str = "algebra lattice2\nsize 2\nop meet 2\n0 0\n0 1\nop join 2\n0 1\n1 1\n";

    #[test]
    fn parses_lattice() {
        let a = parse_algebra(LATTICE2).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.ops().len(), 2);
        assert_eq!(a.apply_op("meet", &[0, 1]).unwrap(), 0);
        assert_eq!(a.apply_op("join", &[0, 1]).unwrap(), 1);
    }

    #[test]
    fn parses_z2() {
        let a = parse_algebra("algebra z2\nsize 2\n# group law\nop plus 2\n0 1\n1 0\n").unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.apply_op("plus", &[1, 1]).unwrap(), 0);
    }

    #[test]
    fn rejects_out_of_range_entry() {
        let err = parse_algebra("algebra bad\nsize 2\nop meet 2\n0 0\n0 2\n").unwrap_err();
        match err {
            Error::AlgebraSyntax { line, msg } => {
                assert_eq!(line, 5);
                assert!(msg.contains("entry out of range"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_short_table() {
        let err = parse_algebra("algebra bad\nsize 2\nop meet 2\n0 0 0\nop join 2\n0 1 1 1\n")
            .unwrap_err();
        assert!(matches!(err, Error::AlgebraSyntax { line: 5, .. }), "{err:?}");
        let err = parse_algebra("algebra bad\nsize 2\nop meet 2\n0 0 0\n").unwrap_err();
        assert!(matches!(err, Error::AlgebraSyntax { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_header() {
        let err = parse_algebra("algebr x\nsize 2\n").unwrap_err();
        assert!(matches!(err, Error::AlgebraSyntax { line: 1, .. }));
        let err = parse_algebra("algebra x\nsize zero\n").unwrap_err();
        assert!(matches!(err, Error::AlgebraSyntax { line: 2, .. }));
    }

    #[test]
    fn apply_op_errors() {
        let a = parse_algebra(LATTICE2).unwrap();
        assert!(matches!(a.apply_op("plus", &[0, 0]), Err(Error::UnknownOp(_))));
        assert!(matches!(
            a.apply_op("meet", &[0]),
            Err(Error::ArityMismatch { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn canonical_form_sorts_ops() {
        let a = parse_algebra(LATTICE2).unwrap();
        let text = a.to_alg_string();
        assert!(text.find("op join").unwrap() < text.find("op meet").unwrap());
        let b = parse_algebra(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(text, b.to_alg_string());
    }

    #[test]
    fn constants_and_unary() {
        let a = parse_algebra("algebra c\nsize 3\nop zero 0\n0\nop succ 1\n1 2 0\n").unwrap();
        assert_eq!(a.apply_op("zero", &[]).unwrap(), 0);
        assert_eq!(a.apply_op("succ", &[2]).unwrap(), 0);
        let again = parse_algebra(&a.to_alg_string()).unwrap();
        assert_eq!(a, again);
    }
}
