//! Term chains and their defining equations.

use std::fmt;

use serde::Serialize;

use crate::algebra::{checked_pow, Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::term::{term_table, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "scheme", content = "param")]
pub enum Scheme {
    /// Quaternary `d_0 .. d_k`.
    Day(usize),
    /// Ternary `p, j_1 .. j_{n+1}`.
    Gumm(usize),
    /// Gumm without `x = j_n(x,y,x)`.
    DefectiveGumm(usize),
    /// Ternary `j_0 .. j_{n+1}`.
    Jonsson(usize),
    /// Jónsson with the roles of even and odd indices exchanged.
    Alvin(usize),
}

impl Scheme {
    pub fn arity(self) -> usize {
        match self {
            Scheme::Day(_) => 4,
            _ => 3,
        }
    }

    pub fn param(self) -> usize {
        match self {
            Scheme::Day(k)
            | Scheme::Gumm(k)
            | Scheme::DefectiveGumm(k)
            | Scheme::Jonsson(k)
            | Scheme::Alvin(k) => k,
        }
    }

    /// Number of terms in a chain of this scheme.
    pub fn len(self) -> usize {
        match self {
            Scheme::Day(k) => k + 1,
            Scheme::Gumm(n) | Scheme::DefectiveGumm(n) | Scheme::Jonsson(n) | Scheme::Alvin(n) => {
                n + 2
            }
        }
    }

    fn with_param(self, p: usize) -> Scheme {
        match self {
            Scheme::Day(_) => Scheme::Day(p),
            Scheme::Gumm(_) => Scheme::Gumm(p),
            Scheme::DefectiveGumm(_) => Scheme::DefectiveGumm(p),
            Scheme::Jonsson(_) => Scheme::Jonsson(p),
            Scheme::Alvin(_) => Scheme::Alvin(p),
        }
    }

    fn term_name(self, i: usize) -> String {
        match self {
            Scheme::Day(_) => format!("d{i}"),
            Scheme::Gumm(_) | Scheme::DefectiveGumm(_) if i == 0 => "p".to_string(),
            _ => format!("j{i}"),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Day(k) => write!(f, "Day({k})"),
            Scheme::Gumm(n) => write!(f, "Gumm({n})"),
            Scheme::DefectiveGumm(n) => write!(f, "DefectiveGumm({n})"),
            Scheme::Jonsson(n) => write!(f, "Jonsson({n})"),
            Scheme::Alvin(n) => write!(f, "Alvin({n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermChain {
    pub scheme: Scheme,
    #[serde(serialize_with = "serialize_terms")]
    pub terms: Vec<Term>,
}

fn serialize_terms<S: serde::Serializer>(terms: &[Term], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(terms.iter().map(|t| t.to_string()))
}

/// One side of a chain equation: a projection or a chain term applied to a
/// pattern of variables.
#[derive(Clone, Copy, Debug)]
enum Side {
    Var(usize),
    Term(usize, [usize; 4]),
}

#[derive(Clone, Debug)]
struct Equation {
    lhs: Side,
    rhs: Side,
}

const VARS: [&str; 4] = ["x", "y", "z", "w"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub equation: String,
    /// Values of `x, y, z, w` (as many as the scheme uses).
    pub assignment: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TermChain {
    pub fn new(scheme: Scheme, terms: Vec<Term>) -> Result<TermChain> {
        let chain = TermChain { scheme, terms };
        chain.check_shape()?;
        Ok(chain)
    }

    fn check_shape(&self) -> Result<()> {
        if self.terms.len() != self.scheme.len() {
            return Err(Error::MalformedChain(format!(
                "{} needs {} terms, got {}",
                self.scheme,
                self.scheme.len(),
                self.terms.len()
            )));
        }
        let arity = self.scheme.arity();
        for (i, t) in self.terms.iter().enumerate() {
            if t.var_bound() > arity {
                return Err(Error::MalformedChain(format!(
                    "{} uses variable x{} but the scheme is {arity}-ary",
                    self.scheme.term_name(i),
                    t.var_bound() - 1
                )));
            }
        }
        Ok(())
    }

    /// Extends the chain by one trailing projection (`w` for Day, `z` for
    /// the ternary schemes); the result satisfies the next scheme whenever
    /// this one holds.
    pub fn pad(&self) -> TermChain {
        let last = Term::Var(self.scheme.arity() - 1);
        let mut terms = self.terms.clone();
        terms.push(last);
        TermChain {
            scheme: self.scheme.with_param(self.scheme.param() + 1),
            terms,
        }
    }

    /// Pads until the scheme parameter is at least `p`.
    pub fn pad_to(&self, p: usize) -> TermChain {
        let mut c = self.clone();
        while c.scheme.param() < p {
            c = c.pad();
        }
        c
    }

    fn equations(&self) -> Vec<Equation> {
        const X: usize = 0;
        const Y: usize = 1;
        const Z: usize = 2;
        const W: usize = 3;
        let mut eqs = Vec::new();
        let eq = |lhs, rhs| Equation { lhs, rhs };
        match self.scheme {
            Scheme::Day(k) => {
                for i in 0..=k {
                    eqs.push(eq(Side::Term(i, [X, Y, Y, X]), Side::Var(X)));
                }
                eqs.push(eq(Side::Term(0, [X, Y, Z, W]), Side::Var(X)));
                for i in 0..k {
                    let pat = if i % 2 == 0 { [X, X, W, W] } else { [X, Y, Y, W] };
                    eqs.push(eq(Side::Term(i, pat), Side::Term(i + 1, pat)));
                }
                eqs.push(eq(Side::Term(k, [X, Y, Z, W]), Side::Var(W)));
            }
            Scheme::Gumm(n) | Scheme::DefectiveGumm(n) => {
                let defective = matches!(self.scheme, Scheme::DefectiveGumm(_));
                for i in 1..=n + 1 {
                    if defective && i == n {
                        continue;
                    }
                    eqs.push(eq(Side::Term(i, [X, Y, X, 0]), Side::Var(X)));
                }
                eqs.push(eq(Side::Term(0, [X, Z, Z, 0]), Side::Var(X)));
                eqs.push(eq(Side::Term(0, [X, X, Z, 0]), Side::Term(1, [X, X, Z, 0])));
                for i in 1..=n {
                    let pat = if i % 2 == 1 { [X, Z, Z, 0] } else { [X, X, Z, 0] };
                    eqs.push(eq(Side::Term(i, pat), Side::Term(i + 1, pat)));
                }
                eqs.push(eq(Side::Term(n + 1, [X, Y, Z, 0]), Side::Var(Z)));
            }
            Scheme::Jonsson(n) | Scheme::Alvin(n) => {
                let alvin = matches!(self.scheme, Scheme::Alvin(_));
                for i in 0..=n + 1 {
                    eqs.push(eq(Side::Term(i, [X, Y, X, 0]), Side::Var(X)));
                }
                eqs.push(eq(Side::Term(0, [X, Y, Z, 0]), Side::Var(X)));
                for i in 0..=n {
                    let even = (i % 2 == 0) != alvin;
                    let pat = if even { [X, X, Z, 0] } else { [X, Z, Z, 0] };
                    eqs.push(eq(Side::Term(i, pat), Side::Term(i + 1, pat)));
                }
                eqs.push(eq(Side::Term(n + 1, [X, Y, Z, 0]), Side::Var(Z)));
            }
        }
        eqs
    }

    fn side_string(&self, side: Side) -> String {
        let arity = self.scheme.arity();
        match side {
            Side::Var(v) => VARS[v].to_string(),
            Side::Term(i, pat) => {
                let args: Vec<&str> = pat[..arity].iter().map(|&v| VARS[v]).collect();
                format!("{}({})", self.scheme.term_name(i), args.join(","))
            }
        }
    }

    /// Each scheme equation checked over every assignment in `alg`.
    pub fn verify(&self, alg: &FiniteAlgebra) -> Result<Verdict> {
        self.check_shape()?;
        let arity = self.scheme.arity();
        let tables = self
            .terms
            .iter()
            .map(|t| term_table(alg, t, arity))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::MalformedChain(e.to_string()))?;
        let n = alg.size();
        let count = checked_pow(n, arity)?;
        let mut violations = Vec::new();
        for eq in self.equations() {
            let eval = |side: Side, vals: &[Element]| -> Element {
                match side {
                    Side::Var(v) => vals[v],
                    Side::Term(i, pat) => {
                        let idx = pat[..arity].iter().fold(0, |acc, &v| acc * n + vals[v]);
                        tables[i][idx] as Element
                    }
                }
            };
            for code in 0..count {
                let mut vals = [0usize; 4];
                let mut c = code;
                for slot in vals[..arity].iter_mut().rev() {
                    *slot = c % n;
                    c /= n;
                }
                if eval(eq.lhs, &vals) != eval(eq.rhs, &vals) {
                    violations.push(Violation {
                        equation: format!("{} = {}", self.side_string(eq.lhs), self.side_string(eq.rhs)),
                        assignment: vals[..arity].to_vec(),
                    });
                    break;
                }
            }
        }
        Ok(Verdict { violations })
    }
}

/// Checks every scheme equation of `chain` exhaustively over `alg`.
pub fn verify_chain(alg: &FiniteAlgebra, chain: &TermChain) -> Result<Verdict> {
    chain.verify(alg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    #[test]
    fn z2_day_and_gumm() {
        let z2 = corpus::z2();
        let day = TermChain::new(
            Scheme::Day(2),
            vec![t("x0"), t("(plus x1 (plus x2 x3))"), t("x3")],
        )
        .unwrap();
        assert!(verify_chain(&z2, &day).unwrap().is_valid());
        let gumm = TermChain::new(Scheme::Gumm(0), vec![t("(plus x0 (plus x1 x2))"), t("x2")]).unwrap();
        assert!(verify_chain(&z2, &gumm).unwrap().is_valid());
    }

    #[test]
    fn lattice_majority_is_jonsson() {
        let lat = corpus::lattice2();
        let maj = t("(join (join (meet x0 x1) (meet x1 x2)) (meet x0 x2))");
        let chain = TermChain::new(Scheme::Jonsson(1), vec![t("x0"), maj.clone(), t("x2")]).unwrap();
        assert!(verify_chain(&lat, &chain).unwrap().is_valid());
        // The same terms do not form an ALVIN chain: j0 = x would need x = j1(x,z,z).
        let alvin = TermChain::new(Scheme::Alvin(1), vec![t("x0"), maj, t("x2")]).unwrap();
        let v = verify_chain(&lat, &alvin).unwrap();
        assert!(!v.is_valid());
        assert_eq!(v.violations[0].equation, "j0(x,z,z) = j1(x,z,z)");
    }

    #[test]
    fn violations_carry_assignments() {
        let z2 = corpus::z2();
        let bad = TermChain::new(Scheme::Day(1), vec![t("x0"), t("x3")]).unwrap();
        let v = verify_chain(&z2, &bad).unwrap();
        assert_eq!(v.violations.len(), 1);
        assert_eq!(v.violations[0].equation, "d0(x,x,w,w) = d1(x,x,w,w)");
        assert_eq!(v.violations[0].assignment, vec![0, 0, 0, 1]);
    }

    #[test]
    fn malformed_chains() {
        assert!(matches!(
            TermChain::new(Scheme::Day(2), vec![t("x0")]),
            Err(Error::MalformedChain(_))
        ));
        assert!(matches!(
            TermChain::new(Scheme::Gumm(0), vec![t("x3"), t("x2")]),
            Err(Error::MalformedChain(_))
        ));
        let z2 = corpus::z2();
        let unknown = TermChain::new(Scheme::Gumm(0), vec![t("(meet x0 x1)"), t("x2")]).unwrap();
        assert!(matches!(verify_chain(&z2, &unknown), Err(Error::MalformedChain(_))));
    }

    #[test]
    fn padding_preserves_validity() {
        let lat = corpus::lattice2();
        let maj = t("(join (join (meet x0 x1) (meet x1 x2)) (meet x0 x2))");
        let chain = TermChain::new(Scheme::Jonsson(1), vec![t("x0"), maj, t("x2")]).unwrap();
        let padded = chain.pad_to(4);
        assert_eq!(padded.scheme, Scheme::Jonsson(4));
        assert!(verify_chain(&lat, &padded).unwrap().is_valid());
    }
}
