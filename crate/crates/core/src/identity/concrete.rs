//! Checking inclusions on one algebra by quantifying over its congruences and
//! enumerated families of tolerances and admissible relations.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::identity::ast::Identity;
use crate::identity::eval::{add_definitions, conditions_hold, Env, Evaluator};
use crate::relations::{all_congruences, generate, is_compatible, BinRel, Kind, DEFAULT_CONGRUENCE_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConcreteOptions {
    /// Universes up to this size get every reflexive admissible relation.
    pub enum_size: usize,
    /// Larger universes get the relations generated by this many seed pairs.
    pub seed_pairs: usize,
    /// Bound on the number of variable assignments examined.
    pub env_cap: usize,
    pub congruence_cap: usize,
}

pub const DEFAULT_ENUM_SIZE: usize = 4;

impl Default for ConcreteOptions {
    fn default() -> Self {
        ConcreteOptions {
            enum_size: DEFAULT_ENUM_SIZE,
            seed_pairs: 2,
            env_cap: 2_000_000,
            congruence_cap: DEFAULT_CONGRUENCE_CAP,
        }
    }
}

/// The relations a variable of `kind` ranges over, sorted. Complete for
/// congruences, and for other kinds when `alg.size() <= opts.enum_size`.
pub fn relation_family(alg: &FiniteAlgebra, kind: Kind, opts: &ConcreteOptions) -> Result<Vec<BinRel>> {
    if kind == Kind::Congruence {
        return all_congruences(alg, opts.congruence_cap);
    }
    let n = alg.size();
    let off: Vec<(Element, Element)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut out = BTreeSet::new();
    if n <= opts.enum_size {
        for mask in 0u64..(1u64 << off.len()) {
            let pairs: Vec<_> = (0..off.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| off[i])
                .collect();
            let r = BinRel::from_pairs(n, &pairs)?;
            if is_compatible(alg, &r, kind) {
                out.insert(r);
            }
        }
    } else {
        out.insert(BinRel::identity(n));
        let mut seeds: Vec<Vec<(Element, Element)>> = off.iter().map(|&p| vec![p]).collect();
        if opts.seed_pairs >= 2 {
            for i in 0..off.len() {
                for j in i + 1..off.len() {
                    seeds.push(vec![off[i], off[j]]);
                }
            }
        }
        for s in seeds {
            out.insert(generate(alg, &s, kind)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// A refuting assignment with a pair in the left side but not the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub env: Env,
    pub pair: (Element, Element),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConcreteVerdict {
    pub holds: bool,
    /// Number of assignments satisfying the side conditions.
    pub examined: usize,
    pub counterexample: Option<Counterexample>,
}

/// All assignments of the free variables, as an odometer over families.
struct Assignments<'a> {
    names: Vec<&'a str>,
    families: Vec<Vec<BinRel>>,
}

impl<'a> Assignments<'a> {
    fn new(alg: &FiniteAlgebra, id: &'a Identity, opts: &ConcreteOptions) -> Result<Self> {
        let mut names = Vec::new();
        let mut families = Vec::new();
        let mut cache: Vec<(Kind, Vec<BinRel>)> = Vec::new();
        let mut total: usize = 1;
        for (name, kind) in id.free_variables() {
            let fam = match cache.iter().find(|(k, _)| *k == kind) {
                Some((_, f)) => f.clone(),
                None => {
                    let f = relation_family(alg, kind, opts)?;
                    cache.push((kind, f.clone()));
                    f
                }
            };
            total = total.saturating_mul(fam.len());
            names.push(name);
            families.push(fam);
        }
        if total > opts.env_cap {
            return Err(Error::CapExceeded {
                what: "relation assignments",
                reached: total,
                cap: opts.env_cap,
            });
        }
        Ok(Assignments { names, families })
    }

    fn for_each(&self, mut f: impl FnMut(Env) -> Result<bool>) -> Result<()> {
        let mut idx = vec![0usize; self.names.len()];
        if self.families.iter().any(Vec::is_empty) {
            return Ok(());
        }
        loop {
            let env: Env = self
                .names
                .iter()
                .zip(&idx)
                .zip(&self.families)
                .map(|((n, &i), fam)| (n.to_string(), fam[i].clone()))
                .collect();
            if !f(env)? {
                return Ok(());
            }
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    return Ok(());
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < self.families[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

fn missing_pair(lhs: &BinRel, rhs: &BinRel) -> Option<(Element, Element)> {
    lhs.pairs().find(|&(a, b)| !rhs.contains(a, b))
}

/// Checks `id` with `k` bound on `alg` over every assignment of its free
/// variables that satisfies the side conditions.
pub fn check_concrete(
    alg: &FiniteAlgebra,
    id: &Identity,
    k: Option<usize>,
    opts: &ConcreteOptions,
) -> Result<ConcreteVerdict> {
    if id.uses_k() && k.is_none() {
        return Err(Error::UnresolvedCount);
    }
    let assignments = Assignments::new(alg, id, opts)?;
    let ev = Evaluator::new(alg);
    let mut examined = 0;
    let mut counterexample = None;
    assignments.for_each(|env| {
        let env = add_definitions(alg, id, &env, k)?;
        if !conditions_hold(alg, id, &env, k)? {
            return Ok(true);
        }
        examined += 1;
        let lhs = ev.eval(&id.lhs, &env, k)?;
        let rhs = ev.eval(&id.rhs, &env, k)?;
        if let Some(pair) = missing_pair(&lhs, &rhs) {
            counterexample = Some(Counterexample { env, pair });
            return Ok(false);
        }
        Ok(true)
    })?;
    Ok(ConcreteVerdict {
        holds: counterexample.is_none(),
        examined,
        counterexample,
    })
}

/// Least `k <= cap` making `id` hold on `alg`, or the assignment that still
/// fails at `cap`. Relies on the right side growing with `k`, which is
/// checked for every assignment it is used on.
pub fn concrete_min_k(
    alg: &FiniteAlgebra,
    id: &Identity,
    start: usize,
    cap: usize,
    opts: &ConcreteOptions,
) -> Result<std::result::Result<usize, Counterexample>> {
    let assignments = Assignments::new(alg, id, opts)?;
    let ev = Evaluator::new(alg);
    let mut best = start;
    let mut failure = None;
    assignments.for_each(|env| {
        let env = add_definitions(alg, id, &env, None)?;
        if !conditions_hold(alg, id, &env, None)? {
            return Ok(true);
        }
        let lhs = ev.eval(&id.lhs, &env, None)?;
        if lhs.is_identity() {
            return Ok(true);
        }
        loop {
            let rhs = ev.eval(&id.rhs, &env, Some(best))?;
            match missing_pair(&lhs, &rhs) {
                None => {
                    if best < cap {
                        let next = ev.eval(&id.rhs, &env, Some(best + 1))?;
                        if !rhs.is_subset(&next) {
                            return Err(Error::InvalidArgument(format!(
                                "right-hand side of {} shrinks from k={best} to k={}",
                                id.name,
                                best + 1
                            )));
                        }
                    }
                    return Ok(true);
                }
                Some(pair) if best >= cap => {
                    failure = Some(Counterexample { env, pair });
                    return Ok(false);
                }
                Some(_) => best += 1,
            }
        }
    })?;
    Ok(match failure {
        Some(c) => Err(c),
        None => Ok(best),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::identity::parse_identity;

    #[test]
    fn admissible_family_is_complete_on_small_universe() {
        let alg = corpus::chain3();
        let opts = ConcreteOptions::default();
        let adm = relation_family(&alg, Kind::Admissible, &opts).unwrap();
        // every reflexive order-compatible relation of the 3-chain
        for r in &adm {
            assert!(is_compatible(&alg, r, Kind::Admissible));
        }
        assert!(adm.contains(&BinRel::identity(3)));
        assert!(adm.contains(&BinRel::full(3)));
        let tol = relation_family(&alg, Kind::Tolerance, &opts).unwrap();
        assert!(tol.iter().all(BinRel::is_symmetric));
        assert!(tol.len() < adm.len());
        let cong = relation_family(&alg, Kind::Congruence, &opts).unwrap();
        assert_eq!(cong.len(), 4);
    }

    #[test]
    fn day_holds_on_simple_algebras() {
        let id = parse_identity("cong a b g; a & (b o (a & g) o b) <= alt(a & b, a & g, k)").unwrap();
        let opts = ConcreteOptions::default();
        assert!(check_concrete(&corpus::z2(), &id, Some(2), &opts).unwrap().holds);
        assert!(check_concrete(&corpus::lattice2(), &id, Some(2), &opts).unwrap().holds);
    }

    #[test]
    fn trivial_tolerance_identity_holds() {
        let id = parse_identity("tol T P; pow(T, 1) & pow(P, 1) <= pow(T & P, 1)").unwrap();
        let v = check_concrete(&corpus::chain3(), &id, None, &ConcreteOptions::default()).unwrap();
        assert!(v.holds);
        assert!(v.examined > 1);
    }

    #[test]
    fn counterexample_is_reported() {
        // permutability fails on the 3-chain
        let id = parse_identity("cong b g; b o g <= g o b").unwrap();
        let v = check_concrete(&corpus::chain3(), &id, None, &ConcreteOptions::default()).unwrap();
        assert!(!v.holds);
        let c = v.counterexample.unwrap();
        let (x, y) = c.pair;
        assert!(c.env["b"].compose(&c.env["g"]).unwrap().contains(x, y));
        assert!(!c.env["g"].compose(&c.env["b"]).unwrap().contains(x, y));
    }

    #[test]
    fn side_conditions_filter_assignments() {
        let id = parse_identity("cong b; tol D; where b <= D; b <= D").unwrap();
        let v = check_concrete(&corpus::chain3(), &id, None, &ConcreteOptions::default()).unwrap();
        assert!(v.holds);
    }
}
