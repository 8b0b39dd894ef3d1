//! Randomized round-trip cases for the term-chain constructions, shared by
//! the property tests and the acceptance run. Each case returns `Err` with a
//! description when a construction fails.

use cwb_core::constructions::{
    day_witness_chain, find_day_decomposition, find_path, gumm_witness_chain, jonsson_to_day, GummInput,
    GummVariant,
};
use cwb_core::free::FreeOptions;
use cwb_core::relations::DEFAULT_CONGRUENCE_CAP;
use cwb_core::terms::{search_day, search_gumm, search_jonsson, verify_chain, Scheme, TermChain};
use cwb_core::{all_congruences, generate, BinRel, Element, FiniteAlgebra, Kind};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

/// Finds a Jónsson chain, pads it to even length, converts it to Day terms
/// and verifies the result. `Ok(None)` when no chain was found.
pub fn jonsson_round_trip(alg: &FiniteAlgebra) -> Result<Option<(usize, usize)>, String> {
    let search = search_jonsson(alg, 8, false, FreeOptions::default()).map_err(|e| e.to_string())?;
    let Some(found) = search.found() else {
        return Ok(None);
    };
    let chain = if found.param % 2 == 1 { found.chain.pad() } else { found.chain.clone() };
    let n = chain.scheme.param();
    let day = jonsson_to_day(&chain).map_err(|e| format!("{}: {e}", alg.name()))?;
    if day.scheme != Scheme::Day(2 * n) {
        return Err(format!("{}: got {} from Jonsson({n})", alg.name(), day.scheme));
    }
    let verdict = verify_chain(alg, &day).map_err(|e| e.to_string())?;
    match verdict.violations.first() {
        None => Ok(Some((n, 2 * n))),
        Some(v) => Err(format!("{}: {} fails at {:?}", alg.name(), v.equation, v.assignment)),
    }
}

pub fn day_chain(alg: &FiniteAlgebra) -> TermChain {
    search_day(alg, 8, FreeOptions::default()).unwrap().found().expect("Day terms").chain.clone()
}

pub fn gumm_chain(alg: &FiniteAlgebra) -> TermChain {
    search_gumm(alg, 8, FreeOptions::default()).unwrap().found().expect("Gumm terms").chain.clone()
}

fn random_pairs(rng: &mut ChaCha8Rng, n: usize, max: usize) -> Vec<(Element, Element)> {
    (0..rng.random_range(0..=max))
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect()
}

fn random_admissible(alg: &FiniteAlgebra, rng: &mut ChaCha8Rng) -> BinRel {
    let seed = random_pairs(rng, alg.size(), 2);
    generate(alg, &seed, Kind::Admissible).unwrap()
}

fn random_congruence(alg: &FiniteAlgebra, rng: &mut ChaCha8Rng) -> BinRel {
    let congs = all_congruences(alg, DEFAULT_CONGRUENCE_CAP).unwrap();
    congs[rng.random_range(0..congs.len())].clone()
}

fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<Element> {
    let mut v: Vec<Element> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
    v
}

/// Random `α, γ, R` and a random pair `(a, d)` in `α` with a decomposition
/// `a Δ b (α∩γ) c Δ d`; the witness chain must exist and validate.
pub fn day_witness_case(alg: &FiniteAlgebra, chain: &TermChain, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let n = alg.size();
    let alpha = random_congruence(alg, rng);
    let gamma = random_congruence(alg, rng);
    let r = random_admissible(alg, rng);
    let a = rng.random_range(0..n);
    for d in shuffled(rng, n) {
        if !alpha.contains(a, d) {
            continue;
        }
        if let Some((b, c)) = find_day_decomposition(&alpha, &gamma, &r, a, d).unwrap() {
            let w = day_witness_chain(alg, chain, a, b, c, d, &alpha, &gamma, &r)
                .map_err(|e| format!("{} ({a},{b},{c},{d}): {e}", alg.name()))?;
            w.validate(alg, a, d).map_err(|e| e.to_string())?;
            return Ok(w.elements.len());
        }
    }
    // (a, a) always decomposes through b = c = a
    Err(format!("{}: no decomposition found from {a}", alg.name()))
}

const VARIANTS: [GummVariant; 5] = [
    GummVariant::Aga,
    GummVariant::Ag,
    GummVariant::Agai,
    GummVariant::Agi,
    GummVariant::Defective,
];

/// Random variant, relations `T_1 .. T_m`, congruence `α` and a path
/// `b_0 .. b_m` with `b_0 α b_m`; the witness chain must exist and validate.
pub fn gumm_witness_case(alg: &FiniteAlgebra, chain: &TermChain, rng: &mut ChaCha8Rng) -> Result<GummVariant, String> {
    let n = alg.size();
    let variant = VARIANTS[rng.random_range(0..VARIANTS.len())];
    let chain = match variant {
        GummVariant::Defective => {
            let p = chain.scheme.param().max(2);
            chain.pad_to(p + p % 2)
        }
        _ => chain.clone(),
    };
    let m = match variant {
        GummVariant::Aga | GummVariant::Agai => 2,
        _ => rng.random_range(2..=3),
    };
    let alpha = random_congruence(alg, rng);
    let relations: Vec<BinRel> = (0..m).map(|_| random_admissible(alg, rng)).collect();
    let b0 = rng.random_range(0..n);
    let path = shuffled(rng, n)
        .into_iter()
        .filter(|&c| alpha.contains(b0, c))
        .find_map(|c| find_path(&relations, b0, c))
        .ok_or_else(|| format!("{}: no path from {b0}", alg.name()))?;
    let prefix = matches!(variant, GummVariant::Agai | GummVariant::Agi).then(|| {
        let t = random_admissible(alg, rng);
        let starts: Vec<Element> = (0..n).filter(|&x| alpha.contains(x, b0) && t.contains(x, b0)).collect();
        (starts[rng.random_range(0..starts.len())], t)
    });
    let start = prefix.as_ref().map_or(path[0], |p| p.0);
    let end = path[m];
    let input = GummInput {
        alpha,
        relations,
        path,
        prefix,
    };
    let w = gumm_witness_chain(alg, &chain, variant, &input)
        .map_err(|e| format!("{} {variant:?}: {e}", alg.name()))?;
    w.validate(alg, start, end)
        .map_err(|e| format!("{} {variant:?}: {e}", alg.name()))?;
    Ok(variant)
}
