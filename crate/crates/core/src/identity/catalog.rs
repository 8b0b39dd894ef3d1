//! Built-in congruence identities, addressable by name and instantiated with
//! integer parameters. The symbolic count `k` is what spectra minimize.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::identity::ast::Identity;
use crate::identity::parser::parse_identity;

pub type Params = BTreeMap<String, usize>;

pub struct Entry {
    pub name: &'static str,
    /// Parameter names with default values.
    pub params: &'static [(&'static str, usize)],
    pub summary: &'static str,
    build: fn(&Args) -> Result<String>,
}

struct Args<'a> {
    entry: &'a str,
    values: &'a Params,
}

impl Args<'_> {
    fn get(&self, name: &str) -> usize {
        self.values[name]
    }

    fn at_least(&self, name: &str, min: usize) -> Result<usize> {
        let v = self.get(name);
        if v < min {
            return Err(Error::Constraint(format!(
                "{} needs {name} >= {min}, got {v}",
                self.entry
            )));
        }
        Ok(v)
    }
}

fn pow2(e: usize) -> Result<usize> {
    u32::try_from(e)
        .ok()
        .and_then(|e| 1usize.checked_shl(e))
        .filter(|v| *v <= 1 << 20)
        .ok_or_else(|| Error::Constraint(format!("2^{e} is too large")))
}

fn mul(a: usize, b: usize) -> Result<usize> {
    a.checked_mul(b)
        .filter(|v| *v <= 1 << 20)
        .ok_or_else(|| Error::Constraint(format!("{a}*{b} is too large")))
}

const CONG3: &str = "cong a b g;";

fn day(m: usize) -> String {
    format!("{CONG3} a & alt(b, a & g, {m}) <= alt(a & b, a & g, k)")
}

fn tschantz(m: usize) -> String {
    format!("{CONG3} a & alt(b, g, {m}) <= (a & (g o b)) o alt(a & g, a & b, k)")
}

fn nested(j: usize, l: usize) -> String {
    let (x, y) = if j % 2 == 1 { ("b", "g") } else { ("g", "b") };
    if j == l {
        format!("a & ({x} o (a & {y}) o {x})")
    } else {
        format!("a & ({x} o ({}) o {x})", nested(j + 1, l))
    }
}

fn names(prefix: &str, m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("{prefix}{i}")).collect()
}

/// Right side shared by the Gumm-term relational identities: the first factor
/// is given, followed by `k` alternations of the forward and backward chains.
fn gumm_rhs(first: &str, ts: &[String]) -> String {
    let fwd: Vec<String> = ts.iter().map(|t| format!("(a & {t})")).collect();
    let bwd: Vec<String> = ts.iter().rev().map(|t| format!("(a & conv({t}))")).collect();
    format!(
        "(a & {first}) o alt({}, {}, k)",
        fwd.join(" o "),
        bwd.join(" o ")
    )
}

fn closure_args(ts: &[String]) -> String {
    format!("conv({}), {}", ts[0], ts[1..].join(" o "))
}

static ENTRIES: &[Entry] = &[
    Entry {
        name: "DAY",
        params: &[("m", 3)],
        summary: "a(b o_m ag) <= ab o_k ag; minimal k is the Day spectrum D(m)",
        build: |a| Ok(day(a.at_least("m", 1)?)),
    },
    Entry {
        name: "DAY_REV",
        params: &[("m", 3)],
        summary: "a(b o_m ag) <= ag o_k ab; reversed Day spectrum",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!("{CONG3} a & alt(b, a & g, {m}) <= alt(a & g, a & b, k)"))
        },
    },
    Entry {
        name: "DSTAR",
        params: &[("l", 1)],
        summary: "l nested brackets a(b o a(g o ... ) o b) <= ab o_k ag",
        build: |a| {
            let l = a.at_least("l", 1)?;
            Ok(format!("{CONG3} {} <= alt(a & b, a & g, k)", nested(1, l)))
        },
    },
    Entry {
        name: "TSCHANTZ",
        params: &[("m", 2)],
        summary: "a(b o_m g) <= a(g o b) o (ag o_k ab)",
        build: |a| Ok(tschantz(a.at_least("m", 1)?)),
    },
    Entry {
        name: "TSCHANTZ_REV",
        params: &[("m", 3)],
        summary: "a(b o_m g) <= a(b o g) o (ab o_k ag)",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!("{CONG3} a & alt(b, g, {m}) <= (a & (b o g)) o alt(a & b, a & g, k)"))
        },
    },
    Entry {
        name: "TSTAR",
        params: &[("m", 3)],
        summary: "a(b o_m g) <= a(g o b o g) o (ab o_k ag)",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!("{CONG3} a & alt(b, g, {m}) <= (a & (g o b o g)) o alt(a & b, a & g, k)"))
        },
    },
    Entry {
        name: "TSTARSTAR",
        params: &[("m", 3)],
        summary: "a(b o_m g) <= k-fold product of a(g o b o g)",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!("{CONG3} a & alt(b, g, {m}) <= pow(a & (g o b o g), k)"))
        },
    },
    Entry {
        name: "TTRIPLE",
        params: &[("m", 3), ("h", 1)],
        summary: "a(b o_m g) <= (ab o_h ag) o a(g o b) o (ag o_k ab)",
        build: |a| {
            let m = a.at_least("m", 1)?;
            let h = a.get("h");
            Ok(format!(
                "{CONG3} a & alt(b, g, {m}) <= alt(a & b, a & g, {h}) o (a & (g o b)) o alt(a & g, a & b, k)"
            ))
        },
    },
    Entry {
        name: "TR_REL",
        params: &[("m", 2)],
        summary: "a(R o_m S) <= a(S o R) o (aS o_k aR) for admissible R, S",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!(
                "cong a; adm R S; a & alt(R, S, {m}) <= (a & (S o R)) o alt(a & S, a & R, k)"
            ))
        },
    },
    Entry {
        name: "TR_REL_REV",
        params: &[("m", 2)],
        summary: "a(R o_m S) <= a(R o S) o (aR o_k aS) for admissible R, S",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!(
                "cong a; adm R S; a & alt(R, S, {m}) <= (a & (R o S)) o alt(a & R, a & S, k)"
            ))
        },
    },
    Entry {
        name: "RMOD",
        params: &[("m", 2)],
        summary: "a(R o_m R) <= aR o_k aR for admissible R",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!("cong a; adm R; a & pow(R, {m}) <= pow(a & R, k)"))
        },
    },
    Entry {
        name: "RRMOD",
        params: &[("m", 3)],
        summary: "a(R o_m aS) <= aR o_k aS for admissible R, S",
        build: |a| {
            let m = a.at_least("m", 1)?;
            Ok(format!(
                "cong a; adm R S; a & alt(R, a & S, {m}) <= alt(a & R, a & S, k)"
            ))
        },
    },
    Entry {
        name: "TOLC",
        params: &[("h", 2), ("t", 2)],
        summary: "T^h & P^t <= (T & P)^k for tolerances T, P",
        build: |a| {
            let h = a.at_least("h", 1)?;
            let t = a.at_least("t", 1)?;
            Ok(format!("tol T P; pow(T, {h}) & pow(P, {t}) <= pow(T & P, k)"))
        },
    },
    Entry {
        name: "ED",
        params: &[],
        summary: "a(D o ag o b) <= (aD o aD) o_k ag for a tolerance D containing b",
        build: |_| {
            Ok(format!(
                "{CONG3} tol D; where b <= D; a & (D o (a & g) o b) <= alt((a & D) o (a & D), a & g, k)"
            ))
        },
    },
    Entry {
        name: "EDDD",
        params: &[],
        summary: "a(D o ag o D) <= aD o (ag o_k (aD o aD)) for a tolerance D",
        build: |_| {
            Ok("cong a g; tol D; a & (D o (a & g) o D) <= (a & D) o alt(a & g, (a & D) o (a & D), k)".into())
        },
    },
    Entry {
        name: "NTE",
        params: &[],
        summary: "a(D o ag o D) <= aD o_k ag for representable D = R o conv(R)",
        build: |_| {
            Ok("cong a g; adm R; tol D; where D = R o conv(R); a & (D o (a & g) o D) <= alt(a & D, a & g, k)".into())
        },
    },
    Entry {
        name: "AGA",
        params: &[],
        summary: "a(R o S) <= a(gen(conv(R), S)) o ((aR o aS) o_k (a conv(S) o a conv(R)))",
        build: |_| {
            let ts = vec!["R".to_string(), "S".to_string()];
            Ok(format!(
                "cong a; adm R S; a & (R o S) <= {}",
                gumm_rhs(&format!("gen_adm({})", closure_args(&ts)), &ts)
            ))
        },
    },
    Entry {
        name: "AG",
        params: &[("m", 3)],
        summary: "a(T1 o .. o Tm) with R = T1 and S = T2 o .. o Tm in the AGA right side",
        build: |a| {
            let ts = names("T", a.at_least("m", 2)?);
            Ok(format!(
                "cong a; adm {}; a & ({}) <= {}",
                ts.join(" "),
                ts.join(" o "),
                gumm_rhs(&format!("gen_adm({})", closure_args(&ts)), &ts)
            ))
        },
    },
    Entry {
        name: "AGAI",
        params: &[],
        summary: "aT o a(R o S) <= a(gen(T, conv(R), S)) o ((aR o aS) o_k (a conv(S) o a conv(R)))",
        build: |_| {
            let ts = vec!["R".to_string(), "S".to_string()];
            Ok(format!(
                "cong a; adm T R S; (a & T) o (a & (R o S)) <= {}",
                gumm_rhs(&format!("gen_adm(T, {})", closure_args(&ts)), &ts)
            ))
        },
    },
    Entry {
        name: "AGI",
        params: &[("m", 3)],
        summary: "aT o a(T1 o .. o Tm) with R = T1 and S = T2 o .. o Tm in the AGAI right side",
        build: |a| {
            let ts = names("T", a.at_least("m", 2)?);
            Ok(format!(
                "cong a; adm T {}; (a & T) o (a & ({})) <= {}",
                ts.join(" "),
                ts.join(" o "),
                gumm_rhs(&format!("gen_adm(T, {})", closure_args(&ts)), &ts)
            ))
        },
    },
    Entry {
        name: "BBB",
        params: &[("n", 1)],
        summary: "a(b o_5 g) <= (ab o_{4n-1} ag) o a(g o b) o (ag o_k ab)",
        build: |a| {
            let n = a.at_least("n", 1)?;
            Ok(format!(
                "{CONG3} a & alt(b, g, 5) <= alt(a & b, a & g, {}) o (a & (g o b)) o alt(a & g, a & b, k)",
                mul(4, n)? - 1
            ))
        },
    },
    Entry {
        name: "Q2",
        params: &[("r", 1), ("q", 1)],
        summary: "a(b o_{2^q r+1} g) <= a(g o b) o (ag o_k ab)",
        build: |a| {
            let r = a.at_least("r", 1)?;
            let q = a.at_least("q", 1)?;
            Ok(tschantz(mul(pow2(q)?, r)? + 1))
        },
    },
    Entry {
        name: "AGT",
        params: &[("m", 2)],
        summary: "a(b o_{m+1} g) <= a(g o b o_{2h+2}) o (ag o_k ab) for m = 4h+2; a(b o_{2h+1} g) o (ag o_k ab) for m = 4h",
        build: |a| {
            let m = a.at_least("m", 2)?;
            let h = m / 4;
            match m % 4 {
                2 => Ok(format!(
                    "{CONG3} a & alt(b, g, {}) <= (a & alt(g, b, {})) o alt(a & g, a & b, k)",
                    m + 1,
                    2 * h + 2
                )),
                0 => Ok(format!(
                    "{CONG3} a & alt(b, g, {}) <= (a & alt(b, g, {})) o alt(a & g, a & b, k)",
                    m + 1,
                    2 * h + 1
                )),
                _ => Err(Error::Constraint(format!("AGT needs m even, got {m}"))),
            }
        },
    },
    Entry {
        name: "AGT_CONV",
        params: &[("m", 2)],
        summary: "a(b o_{m+1} g) <= (ab o_k ag) o a(b o g o_{2h+2}) for m = 4h+2",
        build: |a| {
            let m = a.at_least("m", 2)?;
            if m % 4 != 2 {
                return Err(Error::Constraint(format!("AGT_CONV needs m = 4h+2, got {m}")));
            }
            Ok(format!(
                "{CONG3} a & alt(b, g, {}) <= alt(a & b, a & g, k) o (a & alt(b, g, {}))",
                m + 1,
                2 * (m / 4) + 2
            ))
        },
    },
    Entry {
        name: "QDIST",
        params: &[("q", 1)],
        summary: "a(b o_{2^q+1} g) <= a(g o b) o (ag o_k ab)",
        build: |a| Ok(tschantz(pow2(a.at_least("q", 1)?)? + 1)),
    },
    Entry {
        name: "QDISTCONV",
        params: &[("q", 1)],
        summary: "a(b o_{2^q+1} g) <= (ab o_k ag) o a(b o g)",
        build: |a| {
            let m = pow2(a.at_least("q", 1)?)? + 1;
            Ok(format!(
                "{CONG3} a & alt(b, g, {m}) <= alt(a & b, a & g, k) o (a & (b o g))"
            ))
        },
    },
    Entry {
        name: "QMOD",
        params: &[("h", 1), ("p", 1)],
        summary: "Day identity with 2^p (h+1) - 1 factors on the left",
        build: |a| {
            let h = a.at_least("h", 1)?;
            let p = a.at_least("p", 1)?;
            Ok(day(mul(pow2(p)?, h + 1)? - 1))
        },
    },
];

pub fn entries() -> &'static [Entry] {
    ENTRIES
}

pub fn lookup(name: &str) -> Result<&'static Entry> {
    ENTRIES
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownIdentity(name.to_string()))
}

impl Entry {
    /// Defaults overridden by `given`; unknown parameter names are rejected.
    pub fn resolve(&self, given: &Params) -> Result<Params> {
        let mut values: Params = self
            .params
            .iter()
            .map(|(n, v)| (n.to_string(), *v))
            .collect();
        for (n, v) in given {
            match values.get_mut(n) {
                Some(slot) => *slot = *v,
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "{} takes no parameter `{n}`",
                        self.name
                    )))
                }
            }
        }
        Ok(values)
    }

    /// Source text of the instance.
    pub fn text(&self, given: &Params) -> Result<String> {
        let values = self.resolve(given)?;
        (self.build)(&Args {
            entry: self.name,
            values: &values,
        })
    }

    pub fn instantiate(&self, given: &Params) -> Result<Identity> {
        let values = self.resolve(given)?;
        let mut id = parse_identity(&self.text(given)?)?;
        id.name = instance_name(self.name, &values);
        Ok(id)
    }
}

fn instance_name(name: &str, values: &Params) -> String {
    if values.is_empty() {
        return name.to_string();
    }
    let args: Vec<String> = values.iter().map(|(n, v)| format!("{n}={v}")).collect();
    format!("{name}({})", args.join(","))
}

/// Instantiates a catalog entry by name.
pub fn instantiate(name: &str, given: &Params) -> Result<Identity> {
    lookup(name)?.instantiate(given)
}

pub fn params(pairs: &[(&str, usize)]) -> Params {
    pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
}
