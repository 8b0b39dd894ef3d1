//! Closed-form bounds: given parameters of a hypothesis (Day or Gumm term
//! counts, known identities), the left and right lengths of the identity
//! that follows.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::identity::catalog::Params;

/// Left length (factors on the left side, or nesting depth for `DST`) and
/// right length. `lhs` is absent for pure term counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub lhs: Option<u64>,
    pub rhs: u64,
}

impl std::fmt::Display for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.lhs {
            Some(l) => write!(f, "({l}, {})", self.rhs),
            None => write!(f, "{}", self.rhs),
        }
    }
}

pub struct BoundFormula {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub summary: &'static str,
    eval: fn(&Args) -> Result<Claim>,
}

struct Args<'a> {
    name: &'a str,
    values: &'a Params,
}

impl Args<'_> {
    fn get(&self, p: &str) -> u64 {
        self.values[p] as u64
    }

    fn at_least(&self, p: &str, min: u64) -> Result<u64> {
        let v = self.get(p);
        if v < min {
            return Err(Error::Constraint(format!("{} needs {p} >= {min}, got {v}", self.name)));
        }
        Ok(v)
    }

    fn even(&self, p: &str) -> Result<u64> {
        let v = self.get(p);
        if v % 2 == 1 {
            return Err(Error::Constraint(format!("{} needs {p} even, got {v}", self.name)));
        }
        Ok(v)
    }
}

fn overflow() -> Error {
    Error::Constraint("bound overflows 64 bits".into())
}

fn pow(base: u64, exp: u64) -> Result<u64> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(overflow)
}

fn pow2(exp: u64) -> Result<u64> {
    pow(2, exp)
}

fn mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b).ok_or_else(overflow)
}

fn sub(a: u64, b: u64) -> Result<u64> {
    a.checked_sub(b)
        .ok_or_else(|| Error::Constraint(format!("{a} - {b} is negative")))
}

fn both(lhs: u64, rhs: u64) -> Result<Claim> {
    Ok(Claim { lhs: Some(lhs), rhs })
}

/// `2^q + 1` and `(2^{q+1} - 2) n`, shared by the Gumm-term bounds.
fn qdist(q: u64, n: u64) -> Result<(u64, u64)> {
    Ok((add(pow2(q)?, 1)?, mul(sub(pow2(q + 1)?, 2)?, n)?))
}

static FORMULAS: &[BoundFormula] = &[
    BoundFormula {
        name: "AGT",
        params: &["m", "n"],
        summary: "n+2 Gumm terms, m = 4h or 4h+2: left side with m+1 factors, alternation of length mn",
        eval: |a| {
            let m = a.at_least("m", 2)?;
            a.even("m")?;
            both(m + 1, mul(m, a.get("n"))?)
        },
    },
    BoundFormula {
        name: "AGTCOR",
        params: &["q", "n"],
        summary: "n+2 Gumm terms: a(b o_{2^q+1} g) <= a(g o b) o (ag o_k ab) with k = (2^{q+1}-2)n",
        eval: |a| {
            let (l, r) = qdist(a.at_least("q", 1)?, a.get("n"))?;
            both(l, r)
        },
    },
    BoundFormula {
        name: "AGTCOR2",
        params: &["r", "s", "q", "n"],
        summary: "n+2 Gumm terms and T(2r+1) <= s: T(2^q r + 1) <= s + (2^{q+1}-4) r n",
        eval: |a| {
            let r = a.at_least("r", 1)?;
            let s = a.at_least("s", 1)?;
            let q = a.at_least("q", 1)?;
            let extra = mul(mul(sub(pow2(q + 1)?, 4)?, r)?, a.get("n"))?;
            both(add(mul(pow2(q)?, r)?, 1)?, add(s, extra)?)
        },
    },
    BoundFormula {
        name: "BBB",
        params: &["n"],
        summary: "n+2 Gumm terms: a(b o ag o b o ag o b) <= ab o_{6n+1} ag",
        eval: |a| both(5, add(mul(6, a.at_least("n", 1)?)?, 1)?),
    },
    BoundFormula {
        name: "COMB",
        params: &["r", "n", "p", "q"],
        summary: "2r+1 Day terms and n+2 Gumm terms: (2^{p+q}-1, 2r^q + (2^{q+p+1} - 2^{q+2} - 2p + 2)n)-modular",
        eval: |a| {
            let r = a.at_least("r", 1)?;
            let p = a.at_least("p", 1)?;
            let q = a.at_least("q", 1)?;
            let z = sub(pow2(add(p, q)?)?, 1)?;
            let coef = sub(add(pow2(q + p + 1)?, 2)?, add(pow2(q + 2)?, mul(2, p)?)?)?;
            both(z, add(mul(2, pow(r, q)?)?, mul(coef, a.get("n"))?)?)
        },
    },
    BoundFormula {
        name: "DST",
        params: &["l", "r"],
        summary: "(3,2r)-modular: D*(l) <= 2r^l",
        eval: |a| {
            let l = a.at_least("l", 1)?;
            both(l, mul(2, pow(a.at_least("r", 1)?, l)?)?)
        },
    },
    BoundFormula {
        name: "ED",
        params: &["k"],
        summary: "Day terms d_0..d_k: a(D o ag o b) <= (aD o aD) o_k ag for tolerances D containing b",
        eval: |a| both(3, a.at_least("k", 1)?),
    },
    BoundFormula {
        name: "EDDD",
        params: &["k"],
        summary: "Day terms d_0..d_k: a(D o ag o D) <= aD o (ag o_{k-1} (aD o aD)) for tolerances D",
        eval: |a| both(3, a.at_least("k", 1)? - 1),
    },
    BoundFormula {
        name: "LTT",
        params: &["k"],
        summary: "k+1 Day terms give at most k^2-k+1 Gumm terms",
        eval: |a| {
            let k = a.at_least("k", 2)?;
            Ok(Claim {
                lhs: None,
                rhs: add(sub(mul(k, k)?, k)?, 1)?,
            })
        },
    },
    BoundFormula {
        name: "NTE",
        params: &["k"],
        summary: "(3,k)-modular: a(D o ag o D) <= aD o_k ag for representable tolerances D",
        eval: |a| both(3, a.at_least("k", 1)?),
    },
    BoundFormula {
        name: "NUMD",
        params: &["n"],
        summary: "n+2 Gumm terms: 2n+2-modular",
        eval: |a| both(3, add(mul(2, a.get("n"))?, 2)?),
    },
    BoundFormula {
        name: "NUMDD",
        params: &["n"],
        summary: "n+2 defective Gumm terms, n even and at least 2: reversed 2n+1-modular",
        eval: |a| {
            a.even("n")?;
            both(3, add(mul(2, a.at_least("n", 2)?)?, 1)?)
        },
    },
    BoundFormula {
        name: "QKMOD2",
        params: &["h", "t", "p", "n"],
        summary: "n+2 Gumm terms and D(2h+1) <= t, t even: D(2^p(h+1)-1) <= t + (2^{p+1}-4)hn + (2^{p+1}-2p-2)n",
        eval: |a| {
            let h = a.at_least("h", 1)?;
            let t = a.even("t")?;
            let p = a.at_least("p", 1)?;
            let n = a.get("n");
            let z = sub(mul(pow2(p)?, add(h, 1)?)?, 1)?;
            let first = mul(mul(sub(pow2(p + 1)?, 4)?, h)?, n)?;
            let second = mul(sub(pow2(p + 1)?, add(mul(2, p)?, 2)?)?, n)?;
            both(z, add(add(t, first)?, second)?)
        },
    },
    BoundFormula {
        name: "QKMOD_I",
        params: &["q", "n"],
        summary: "n+2 Gumm terms: (2^q+1, (2^{q+1}-2)n+2)-modular",
        eval: |a| {
            let (l, r) = qdist(a.at_least("q", 1)?, a.get("n"))?;
            both(l, add(r, 2)?)
        },
    },
    BoundFormula {
        name: "QKMOD_II",
        params: &["q", "n"],
        summary: "n+2 Gumm terms, q >= 2: (2^q-1, (2^{q+1}-2q-2)n+2)-modular",
        eval: |a| {
            let q = a.at_least("q", 2)?;
            let coef = sub(pow2(q + 1)?, add(mul(2, q)?, 2)?)?;
            both(sub(pow2(q)?, 1)?, add(mul(coef, a.get("n"))?, 2)?)
        },
    },
    BoundFormula {
        name: "SMALL_I",
        params: &["m"],
        summary: "3-modular: (m,m)-modular for m >= 3",
        eval: |a| {
            let m = a.at_least("m", 3)?;
            both(m, m)
        },
    },
    BoundFormula {
        name: "SMALL_II",
        params: &["q"],
        summary: "4-modular: (2^q-1, 2^q)-modular for q >= 2",
        eval: |a| {
            let q = a.at_least("q", 2)?;
            both(sub(pow2(q)?, 1)?, pow2(q)?)
        },
    },
    BoundFormula {
        name: "THM",
        params: &["r", "q"],
        summary: "(3,2r)-modular: (2^{q+1}-1, 2r^q)-modular",
        eval: |a| {
            let r = a.at_least("r", 1)?;
            let q = a.at_least("q", 1)?;
            both(sub(pow2(q + 1)?, 1)?, mul(2, pow(r, q)?)?)
        },
    },
    BoundFormula {
        name: "THM2",
        params: &["h", "r", "i"],
        summary: "(2h-1, 2r)-modular with h, r > 1: (2h^{2^i}-1, 2r^{2^i})-modular",
        eval: |a| {
            let h = a.at_least("h", 2)?;
            let r = a.at_least("r", 2)?;
            let e = pow2(a.get("i"))?;
            both(sub(mul(2, pow(h, e)?)?, 1)?, mul(2, pow(r, e)?)?)
        },
    },
];

pub fn formulas() -> &'static [BoundFormula] {
    FORMULAS
}

pub fn lookup_bound(name: &str) -> Result<&'static BoundFormula> {
    FORMULAS
        .iter()
        .find(|f| f.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownBound(name.to_string()))
}

impl BoundFormula {
    /// Evaluates the formula. Where the formula takes `r`, an even `k = 2r`
    /// may be given instead.
    pub fn eval(&self, given: &Params) -> Result<Claim> {
        let mut values = given.clone();
        if self.params.contains(&"r") && !self.params.contains(&"k") {
            if let Some(k) = values.remove("k") {
                if k % 2 == 1 {
                    return Err(Error::Constraint(format!("{} needs k = 2r even, got {k}", self.name)));
                }
                if values.insert("r".into(), k / 2).is_some() {
                    return Err(Error::InvalidArgument(format!("{} takes r or k, not both", self.name)));
                }
            }
        }
        for name in values.keys() {
            if !self.params.contains(&name.as_str()) {
                return Err(Error::InvalidArgument(format!("{} takes no parameter `{name}`", self.name)));
            }
        }
        if let Some(missing) = self.params.iter().find(|p| !values.contains_key(**p)) {
            return Err(Error::InvalidArgument(format!("{} needs parameter `{missing}`", self.name)));
        }
        (self.eval)(&Args {
            name: self.name,
            values: &values,
        })
    }
}

/// Evaluates the named formula.
pub fn bound(name: &str, params: &Params) -> Result<Claim> {
    lookup_bound(name)?.eval(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::catalog::params;

    fn claim(name: &str, p: &[(&str, usize)]) -> Result<Claim> {
        bound(name, &params(p))
    }

    #[test]
    fn table_examples() {
        assert_eq!(claim("THM", &[("r", 2), ("q", 2)]).unwrap(), Claim { lhs: Some(7), rhs: 8 });
        assert_eq!(claim("QKMOD_II", &[("n", 1), ("q", 2)]).unwrap(), Claim { lhs: Some(3), rhs: 4 });
        assert_eq!(
            claim("COMB", &[("r", 2), ("n", 1), ("p", 1), ("q", 1)]).unwrap(),
            Claim { lhs: Some(3), rhs: 4 }
        );
    }

    #[test]
    fn thm_base_case_is_the_hypothesis() {
        for r in 1..20 {
            let c = claim("THM", &[("r", r), ("q", 1)]).unwrap();
            assert_eq!(c, Claim { lhs: Some(3), rhs: 2 * r as u64 });
        }
    }

    #[test]
    fn thm_from_k() {
        assert_eq!(claim("THM", &[("k", 4), ("q", 2)]).unwrap(), Claim { lhs: Some(7), rhs: 8 });
        assert!(matches!(claim("THM", &[("k", 3), ("q", 2)]), Err(Error::Constraint(_))));
    }

    #[test]
    fn constraints_are_enforced() {
        assert!(matches!(claim("NUMDD", &[("n", 3)]), Err(Error::Constraint(_))));
        assert!(matches!(claim("THM2", &[("h", 1), ("r", 2), ("i", 1)]), Err(Error::Constraint(_))));
        assert!(matches!(claim("SMALL_II", &[("q", 1)]), Err(Error::Constraint(_))));
        assert!(matches!(claim("QKMOD2", &[("h", 1), ("t", 3), ("p", 1), ("n", 1)]), Err(Error::Constraint(_))));
        assert!(matches!(claim("THM", &[("r", 2)]), Err(Error::InvalidArgument(_))));
        assert!(matches!(claim("THM", &[("r", 2), ("q", 70)]), Err(Error::Constraint(_))));
        assert!(matches!(bound("NOPE", &Params::new()), Err(Error::UnknownBound(_))));
    }

    #[test]
    fn qkmod2_base_cases() {
        // p = 1 keeps t; p = 2 is the (4h+3, t+(4h+2)n) step
        for h in 1..5 {
            for n in 0..5 {
                let p1 = claim("QKMOD2", &[("h", h), ("t", 4), ("p", 1), ("n", n)]).unwrap();
                assert_eq!(p1, Claim { lhs: Some(2 * h as u64 + 1), rhs: 4 });
                let p2 = claim("QKMOD2", &[("h", h), ("t", 4), ("p", 2), ("n", n)]).unwrap();
                assert_eq!(p2, Claim { lhs: Some(4 * h as u64 + 3), rhs: 4 + (4 * h as u64 + 2) * n as u64 });
            }
        }
    }

    #[test]
    fn comb_is_qkmod2_after_thm() {
        for (r, n, p, q) in [(1, 1, 1, 1), (2, 3, 2, 1), (3, 2, 1, 2), (2, 2, 3, 2)] {
            let thm = claim("THM", &[("r", r), ("q", q)]).unwrap();
            let h = (thm.lhs.unwrap() - 1) / 2;
            let via = claim("QKMOD2", &[("h", h as usize), ("t", thm.rhs as usize), ("p", p), ("n", n)]).unwrap();
            let comb = claim("COMB", &[("r", r), ("n", n), ("p", p), ("q", q)]).unwrap();
            assert_eq!(via, comb);
        }
    }

    #[test]
    fn numd_is_qkmod_ii_at_two() {
        for n in 0..10 {
            assert_eq!(claim("NUMD", &[("n", n)]).unwrap(), claim("QKMOD_II", &[("q", 2), ("n", n)]).unwrap());
        }
    }
}
