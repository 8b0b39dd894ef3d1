//! Spectra: the least `k` for which a catalog family holds.

use serde::{Serialize, Serializer};

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::free::FreeOptions;
use crate::identity::ast::{Identity, Level};
use crate::identity::catalog::{self, Params};
use crate::identity::concrete::{concrete_min_k, ConcreteOptions};
use crate::identity::generic::Generic;

pub const DEFAULT_SPECTRUM_CAP: usize = 64;

#[derive(Clone, Copy, Debug, Default)]
pub struct SpectrumOptions {
    pub free: FreeOptions,
    pub concrete: ConcreteOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumValue {
    Exact(usize),
    /// No `k` up to the cap works.
    ExceedsCap(usize),
}

impl SpectrumValue {
    pub fn exact(self) -> Option<usize> {
        match self {
            SpectrumValue::Exact(k) => Some(k),
            SpectrumValue::ExceedsCap(_) => None,
        }
    }
}

impl Serialize for SpectrumValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SpectrumValue::Exact(k) => s.serialize_u64(*k as u64),
            SpectrumValue::ExceedsCap(_) => s.serialize_str("exceeds cap"),
        }
    }
}

impl std::fmt::Display for SpectrumValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumValue::Exact(k) => write!(f, "{k}"),
            SpectrumValue::ExceedsCap(cap) => write!(f, "> {cap}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumResult {
    pub family: String,
    pub params: Params,
    pub value: SpectrumValue,
    pub level: Level,
    /// For algebra-level failures at the cap, the refuting assignment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<String>,
}

/// Least `k <= cap` for which `id` holds, scanning upward.
pub fn min_k(alg: &FiniteAlgebra, id: &Identity, cap: usize, opts: &SpectrumOptions) -> Result<(SpectrumValue, Level, Option<String>)> {
    if !id.uses_k() {
        return Err(Error::InvalidArgument(format!(
            "{} has no symbolic count to minimize",
            id.name
        )));
    }
    if id.congruence_only() {
        let g = Generic::new(alg, id, opts.free)?;
        for k in 0..=cap {
            if g.holds(&id.rhs, Some(k))? {
                if k < cap && !g.holds(&id.rhs, Some(k + 1))? {
                    return Err(Error::InvalidArgument(format!(
                        "{} holds at k={k} but not at k={}",
                        id.name,
                        k + 1
                    )));
                }
                return Ok((SpectrumValue::Exact(k), Level::Variety, None));
            }
        }
        return Ok((SpectrumValue::ExceedsCap(cap), Level::Variety, None));
    }
    match concrete_min_k(alg, id, 0, cap, &opts.concrete)? {
        Ok(k) => Ok((SpectrumValue::Exact(k), Level::Algebra, None)),
        Err(c) => {
            let env: Vec<String> = c
                .env
                .iter()
                .map(|(n, r)| format!("{n}={}", r.to_row_strings().join("/")))
                .collect();
            Ok((
                SpectrumValue::ExceedsCap(cap),
                Level::Algebra,
                Some(format!("pair {:?} under {}", c.pair, env.join(" "))),
            ))
        }
    }
}

/// Spectrum value of a catalog family at the given parameters.
pub fn spectrum(
    alg: &FiniteAlgebra,
    family: &str,
    params: &Params,
    cap: usize,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    let entry = catalog::lookup(family)?;
    let id = entry.instantiate(params)?;
    let (value, level, evidence) = min_k(alg, &id, cap, opts)?;
    Ok(SpectrumResult {
        family: entry.name.to_string(),
        params: entry.resolve(params)?,
        value,
        level,
        evidence,
    })
}

/// Values of a one-parameter family over a range of its first parameter, in
/// order. Each value is computed independently.
pub fn spectrum_range(
    alg: &FiniteAlgebra,
    family: &str,
    param: &str,
    range: std::ops::RangeInclusive<usize>,
    fixed: &Params,
    cap: usize,
    opts: &SpectrumOptions,
) -> Vec<Result<SpectrumResult>> {
    use rayon::prelude::*;
    let values: Vec<usize> = range.collect();
    values
        .par_iter()
        .map(|&v| {
            let mut p = fixed.clone();
            p.insert(param.to_string(), v);
            spectrum(alg, family, &p, cap, opts)
        })
        .collect()
}

/// Whether Day and reversed Day values are compatible: they differ by at
/// most one, and for odd `m` an even value of either bounds the other, since
/// then the two inclusions are converses of each other.
pub fn day_gap_ok(m: usize, day: usize, rev: usize) -> bool {
    if day.abs_diff(rev) > 1 {
        return false;
    }
    if m % 2 == 1 {
        if day % 2 == 0 && rev > day {
            return false;
        }
        if rev % 2 == 0 && day > rev {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::identity::catalog::params;

    #[test]
    fn z2_day_spectrum_is_two() {
        let z2 = corpus::z2();
        let opts = SpectrumOptions::default();
        for m in 3..=5 {
            let r = spectrum(&z2, "DAY", &params(&[("m", m)]), 64, &opts).unwrap();
            assert_eq!(r.value, SpectrumValue::Exact(2), "m={m}");
            assert_eq!(r.level, Level::Variety);
        }
    }

    #[test]
    fn lattice_tschantz_two_is_one() {
        let lat = corpus::lattice2();
        let r = spectrum(&lat, "TSCHANTZ", &params(&[("m", 2)]), 64, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.value, SpectrumValue::Exact(1));
    }

    #[test]
    fn semilattice_exceeds_cap() {
        let s = corpus::semilattice2();
        let r = spectrum(&s, "DAY", &params(&[("m", 3)]), 16, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.value, SpectrumValue::ExceedsCap(16));
    }

    #[test]
    fn relational_family_is_algebra_level() {
        let lat = corpus::lattice2();
        let r = spectrum(&lat, "RMOD", &params(&[("m", 2)]), 16, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.level, Level::Algebra);
        assert!(r.value.exact().is_some());
    }

    #[test]
    fn gap_rule() {
        assert!(day_gap_ok(3, 2, 2));
        assert!(!day_gap_ok(3, 2, 3));
        assert!(!day_gap_ok(3, 3, 2));
        // lattices: 3-modular but not 3-modular reversed
        assert!(day_gap_ok(3, 3, 4));
        assert!(day_gap_ok(4, 3, 4));
        assert!(!day_gap_ok(4, 2, 4));
    }
}
