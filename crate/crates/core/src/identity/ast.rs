//! Relational expressions and inclusions between them.

use std::fmt;

use serde::Serialize;

use crate::relations::Kind;

/// Number of factors in `alt`/`pow`; `K` is the symbolic parameter scanned by
/// spectra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Count {
    Fixed(usize),
    K,
}

impl Count {
    pub fn resolve(self, k: Option<usize>) -> Option<usize> {
        match self {
            Count::Fixed(m) => Some(m),
            Count::K => k,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Fixed(m) => write!(f, "{m}"),
            Count::K => f.write_str("k"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    /// Relational product, left to right; at least two factors.
    Compose(Vec<Expr>),
    /// Intersection; at least two parts.
    Meet(Vec<Expr>),
    Conv(Box<Expr>),
    /// Least relation of the given kind containing the union of the parts.
    Gen(Kind, Vec<Expr>),
    /// `e1 ∘ e2 ∘ e1 ∘ …` with the given number of factors; zero factors is
    /// the identity relation.
    Alt(Box<Expr>, Box<Expr>, Count),
    /// `e ∘ e ∘ …` with the given number of factors.
    Pow(Box<Expr>, Count),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    /// Whether the symbolic count `k` occurs.
    pub fn uses_k(&self) -> bool {
        match self {
            Expr::Var(_) => false,
            Expr::Compose(v) | Expr::Meet(v) | Expr::Gen(_, v) => v.iter().any(Expr::uses_k),
            Expr::Conv(e) => e.uses_k(),
            Expr::Alt(a, b, c) => *c == Count::K || a.uses_k() || b.uses_k(),
            Expr::Pow(e, c) => *c == Count::K || e.uses_k(),
        }
    }

    /// Calls `f` on every variable occurrence, left to right.
    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Var(v) => f(v),
            Expr::Compose(v) | Expr::Meet(v) | Expr::Gen(_, v) => {
                v.iter().for_each(|e| e.for_each_var(f))
            }
            Expr::Conv(e) | Expr::Pow(e, _) => e.for_each_var(f),
            Expr::Alt(a, b, _) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
        }
    }
}

/// `name = expr`: a variable whose value is computed rather than quantified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub expr: Expr,
}

/// An inclusion `lhs <= rhs` between relational expressions, universally
/// quantified over its declared variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub name: String,
    /// Declaration groups in source order.
    pub decls: Vec<(Kind, Vec<String>)>,
    pub defs: Vec<Definition>,
    /// Side conditions `sub <= sup` restricting the quantification.
    pub conditions: Vec<(Expr, Expr)>,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Identity {
    /// Declared variables with their kinds, in declaration order.
    pub fn variables(&self) -> impl Iterator<Item = (&str, Kind)> + '_ {
        self.decls
            .iter()
            .flat_map(|(kind, names)| names.iter().map(move |n| (n.as_str(), *kind)))
    }

    pub fn kind_of(&self, name: &str) -> Option<Kind> {
        self.variables().find(|(n, _)| *n == name).map(|(_, k)| k)
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.defs.iter().any(|d| d.name == name)
    }

    /// Variables that range freely (declared and not defined).
    pub fn free_variables(&self) -> Vec<(&str, Kind)> {
        self.variables()
            .filter(|(n, _)| !self.is_defined(n))
            .collect()
    }

    pub fn uses_k(&self) -> bool {
        self.lhs.uses_k()
            || self.rhs.uses_k()
            || self.defs.iter().any(|d| d.expr.uses_k())
            || self.conditions.iter().any(|(a, b)| a.uses_k() || b.uses_k())
    }

    /// Whether every variable is a congruence, so the inclusion can be decided
    /// for the whole variety from a single generic configuration.
    pub fn congruence_only(&self) -> bool {
        self.defs.is_empty()
            && self.conditions.is_empty()
            && self.variables().all(|(_, k)| k == Kind::Congruence)
    }
}

/// Level at which a verdict holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// For every algebra in the variety generated by the input algebra.
    Variety,
    /// For the input algebra, over the enumerated relations.
    Algebra,
}
