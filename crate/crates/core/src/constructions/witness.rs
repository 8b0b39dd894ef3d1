//! Explicit element chains built from Day and Gumm terms, each step labelled
//! with the relation it must lie in.

use serde::Serialize;

use crate::algebra::{Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::identity::ast::Expr;
use crate::identity::eval::{eval_expr, Env};
use crate::relations::{is_compatible, BinRel, Kind};
use crate::term::eval_term;
use crate::terms::chain::{Scheme, TermChain};

/// Elements `e_0 .. e_j` with `(e_i, e_{i+1})` in the value of `labels[i]`
/// under `env`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessChain {
    pub elements: Vec<Element>,
    #[serde(serialize_with = "serialize_labels")]
    pub labels: Vec<Expr>,
    pub env: Env,
}

fn serialize_labels<S: serde::Serializer>(labels: &[Expr], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(labels.iter().map(|e| e.to_string()))
}

impl WitnessChain {
    /// Checks the endpoints and every step.
    pub fn validate(&self, alg: &FiniteAlgebra, from: Element, to: Element) -> Result<()> {
        if self.labels.len() + 1 != self.elements.len() {
            return Err(Error::InvalidChain(format!(
                "{} elements but {} step labels",
                self.elements.len(),
                self.labels.len()
            )));
        }
        let (first, last) = (self.elements[0], *self.elements.last().expect("nonempty"));
        if (first, last) != (from, to) {
            return Err(Error::InvalidChain(format!(
                "chain runs from {first} to {last}, expected {from} to {to}"
            )));
        }
        for (i, label) in self.labels.iter().enumerate() {
            let (x, y) = (self.elements[i], self.elements[i + 1]);
            if !eval_expr(alg, label, &self.env, None)?.contains(x, y) {
                return Err(Error::InvalidChain(format!("step {i}: ({x},{y}) not in {label}")));
            }
        }
        Ok(())
    }
}

fn var(name: &str) -> Expr {
    Expr::var(name)
}

fn meet_a(e: Expr) -> Expr {
    Expr::Meet(vec![var("a"), e])
}

fn conv(e: Expr) -> Expr {
    Expr::Conv(Box::new(e))
}

fn compose(mut parts: Vec<Expr>) -> Expr {
    if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        Expr::Compose(parts)
    }
}

fn require_kind(alg: &FiniteAlgebra, r: &BinRel, kind: Kind, what: &str) -> Result<()> {
    if r.size() != alg.size() {
        return Err(Error::SizeMismatch {
            left: r.size(),
            right: alg.size(),
        });
    }
    if !is_compatible(alg, r, kind) {
        return Err(Error::Precondition(format!("{what} is not a {kind}")));
    }
    Ok(())
}

fn require_valid(alg: &FiniteAlgebra, chain: &TermChain) -> Result<()> {
    let verdict = chain.verify(alg)?;
    match verdict.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidChain(format!(
            "{} fails {} at {:?}",
            chain.scheme, v.equation, v.assignment
        ))),
    }
}

fn apply(alg: &FiniteAlgebra, chain: &TermChain, i: usize, args: &[Element]) -> Result<Element> {
    eval_term(alg, &chain.terms[i], args)
}

/// Some `x` with `(u, x)` and `(v, x)` both in `r`.
fn common_successor(r: &BinRel, u: Element, v: Element) -> Option<Element> {
    (0..r.size()).find(|&x| r.contains(u, x) && r.contains(v, x))
}

/// Some `(b, c)` with `a Δ b (α∩γ) c Δ d`, where `Δ = R∘R⌣`.
pub fn find_day_decomposition(
    alpha: &BinRel,
    gamma: &BinRel,
    r: &BinRel,
    a: Element,
    d: Element,
) -> Result<Option<(Element, Element)>> {
    let delta = r.compose(&r.converse())?;
    let ag = alpha.meet(gamma)?;
    Ok(delta
        .row_iter(a)
        .flat_map(|b| ag.row_iter(b).map(move |c| (b, c)))
        .find(|&(_, c)| delta.contains(c, d)))
}

/// Chain `d_0(a,b,c,d), .., d_k(a,b,c,d)` from `a` to `d` whose steps lie
/// alternately in `α∩Δ` and `α∩γ`, where `Δ = R∘R⌣`, given
/// `a Δ b (α∩γ) c Δ d` and `a α d`.
#[allow(clippy::too_many_arguments)]
pub fn day_witness_chain(
    alg: &FiniteAlgebra,
    chain: &TermChain,
    a: Element,
    b: Element,
    c: Element,
    d: Element,
    alpha: &BinRel,
    gamma: &BinRel,
    r: &BinRel,
) -> Result<WitnessChain> {
    let Scheme::Day(k) = chain.scheme else {
        return Err(Error::InvalidArgument(format!("expected a Day chain, got {}", chain.scheme)));
    };
    require_valid(alg, chain)?;
    require_kind(alg, alpha, Kind::Congruence, "alpha")?;
    require_kind(alg, gamma, Kind::Congruence, "gamma")?;
    require_kind(alg, r, Kind::Admissible, "R")?;
    let n = alg.size();
    if let Some(&bad) = [a, b, c, d].iter().find(|&&x| x >= n) {
        return Err(Error::OutOfRange { value: bad, size: n });
    }
    if !alpha.contains(a, d) {
        return Err(Error::Precondition(format!("({a},{d}) is not in alpha")));
    }
    if !(alpha.contains(b, c) && gamma.contains(b, c)) {
        return Err(Error::Precondition(format!("({b},{c}) is not in alpha & gamma")));
    }
    let b1 = common_successor(r, a, b)
        .ok_or_else(|| Error::Precondition(format!("no b' with {a} R b' and {b} R b'")))?;
    let c1 = common_successor(r, c, d)
        .ok_or_else(|| Error::Precondition(format!("no c' with {c} R c' and {d} R c'")))?;
    debug_assert!(r.contains(a, b1) && r.contains(d, c1));

    let delta = r.compose(&r.converse())?;
    let env: Env = [
        ("a", alpha.clone()),
        ("g", gamma.clone()),
        ("R", r.clone()),
        ("D", delta),
    ]
    .into_iter()
    .map(|(n, r)| (n.to_string(), r))
    .collect();
    let elements = (0..=k)
        .map(|i| apply(alg, chain, i, &[a, b, c, d]))
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..k)
        .map(|i| meet_a(var(if i % 2 == 0 { "D" } else { "g" })))
        .collect();
    let w = WitnessChain { elements, labels, env };
    w.validate(alg, a, d)?;
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GummVariant {
    /// `α(R∘S)`.
    Aga,
    /// `α(T_1∘..∘T_m)`.
    Ag,
    /// `αT ∘ α(R∘S)`.
    Agai,
    /// `αT ∘ α(T_1∘..∘T_m)`.
    Agi,
    /// `α(T_1∘..∘T_m)` with defective Gumm terms and `n` even, closed at both
    /// ends.
    Defective,
}

impl GummVariant {
    fn has_prefix(self) -> bool {
        matches!(self, GummVariant::Agai | GummVariant::Agi)
    }
}

/// A pair in the left side of a Gumm-term identity with its decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GummInput {
    pub alpha: BinRel,
    /// `T_1 .. T_m` (`R, S` for the two-factor variants).
    pub relations: Vec<BinRel>,
    /// `b_0 .. b_m` with `b_{l-1} T_l b_l`; the pair is `(b_0, b_m)`.
    pub path: Vec<Element>,
    /// `(a', T)` with `a' (α∩T) b_0`, for the variants with a leading factor.
    pub prefix: Option<(Element, BinRel)>,
}

fn factor_names(variant: GummVariant, m: usize) -> Vec<String> {
    match variant {
        GummVariant::Aga | GummVariant::Agai => vec!["R".into(), "S".into()],
        _ => (1..=m).map(|i| format!("T{i}")).collect(),
    }
}

/// Some `b_0 .. b_m` from `from` to `to` with `b_{l-1} T_l b_l`.
pub fn find_path(relations: &[BinRel], from: Element, to: Element) -> Option<Vec<Element>> {
    let n = relations.first()?.size();
    // layers[l][x]: predecessor of x at step l
    let mut layers: Vec<Vec<Option<Element>>> = Vec::with_capacity(relations.len());
    let mut frontier = vec![false; n];
    frontier[from] = true;
    for r in relations {
        let mut pred = vec![None; n];
        for x in (0..n).filter(|&x| frontier[x]) {
            for y in r.row_iter(x) {
                pred[y].get_or_insert(x);
            }
        }
        frontier = pred.iter().map(Option::is_some).collect();
        layers.push(pred);
    }
    if !frontier[to] {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    for pred in layers.iter().rev() {
        cur = pred[cur].expect("reachable");
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Chain from the left end of the input pair to its right end through the
/// right side of the Gumm-term identity of `variant`: first a step in
/// `α ∩ gen_adm(.., R⌣, S)` with `R = T_1` and `S = T_2∘..∘T_m`, then `n`
/// blocks (`n - 1` for the defective variant) alternating
/// `αT_1∘..∘αT_m` and `αT_m⌣∘..∘αT_1⌣`, and for the defective variant a last
/// step in `α ∩ gen_adm(R, S⌣)`.
pub fn gumm_witness_chain(
    alg: &FiniteAlgebra,
    chain: &TermChain,
    variant: GummVariant,
    input: &GummInput,
) -> Result<WitnessChain> {
    let n = match (variant, chain.scheme) {
        (GummVariant::Defective, Scheme::Gumm(n) | Scheme::DefectiveGumm(n)) => {
            if n < 2 || n % 2 == 1 {
                return Err(Error::Constraint(format!(
                    "the defective construction needs n even and at least 2, got {n}"
                )));
            }
            n
        }
        (_, Scheme::Gumm(n)) => n,
        (_, s) => {
            return Err(Error::InvalidArgument(format!(
                "{variant:?} needs a Gumm chain, got {s}"
            )))
        }
    };
    require_valid(alg, chain)?;
    let m = input.relations.len();
    let two_factor = matches!(variant, GummVariant::Aga | GummVariant::Agai);
    if m < 2 || (two_factor && m != 2) {
        return Err(Error::InvalidArgument(format!(
            "{variant:?} takes {} relations, got {m}",
            if two_factor { "exactly 2" } else { "at least 2" }
        )));
    }
    if input.path.len() != m + 1 {
        return Err(Error::InvalidArgument(format!(
            "decomposition has {} elements, expected {}",
            input.path.len(),
            m + 1
        )));
    }
    if input.prefix.is_some() != variant.has_prefix() {
        return Err(Error::InvalidArgument(format!(
            "{variant:?} {} a leading factor",
            if variant.has_prefix() { "needs" } else { "takes no" }
        )));
    }
    let size = alg.size();
    if let Some(&bad) = input.path.iter().find(|&&x| x >= size) {
        return Err(Error::OutOfRange { value: bad, size });
    }
    require_kind(alg, &input.alpha, Kind::Congruence, "alpha")?;
    let names = factor_names(variant, m);
    for (r, name) in input.relations.iter().zip(&names) {
        require_kind(alg, r, Kind::Admissible, name)?;
    }
    let path = &input.path;
    for (l, r) in input.relations.iter().enumerate() {
        if !r.contains(path[l], path[l + 1]) {
            return Err(Error::Precondition(format!(
                "({},{}) is not in {}",
                path[l],
                path[l + 1],
                names[l]
            )));
        }
    }
    let (a, c) = (path[0], path[m]);
    if !input.alpha.contains(a, c) {
        return Err(Error::Precondition(format!("({a},{c}) is not in alpha")));
    }
    let mut env: Env = names
        .iter()
        .cloned()
        .zip(input.relations.iter().cloned())
        .collect();
    env.insert("a".into(), input.alpha.clone());
    let start = match &input.prefix {
        Some((a1, t)) => {
            require_kind(alg, t, Kind::Admissible, "T")?;
            if *a1 >= size {
                return Err(Error::OutOfRange { value: *a1, size });
            }
            if !(t.contains(*a1, a) && input.alpha.contains(*a1, a)) {
                return Err(Error::Precondition(format!("({a1},{a}) is not in alpha & T")));
            }
            env.insert("T".into(), t.clone());
            *a1
        }
        None => a,
    };

    let fwd: Vec<Expr> = names.iter().map(|t| meet_a(var(t))).collect();
    let bwd: Vec<Expr> = names.iter().rev().map(|t| meet_a(conv(var(t)))).collect();
    let rest = compose(names[1..].iter().map(|t| var(t)).collect());
    let mut first_parts = Vec::new();
    if variant.has_prefix() {
        first_parts.push(var("T"));
    }
    first_parts.push(conv(var(&names[0])));
    first_parts.push(rest.clone());

    let j = |i: usize, x: Element, y: Element, z: Element| apply(alg, chain, i, &[x, y, z]);
    // p(start, b_1, b_1) = start, since R = T_1 and S = T_2∘..∘T_m
    let mut elements = vec![start, j(0, a, a, c)?];
    let mut labels = vec![meet_a(Expr::Gen(Kind::Admissible, first_parts))];
    let blocks = if variant == GummVariant::Defective { n - 1 } else { n };
    for i in 1..=blocks {
        if i % 2 == 1 {
            for l in 1..=m {
                elements.push(j(i, a, path[l], c)?);
                labels.push(fwd[l - 1].clone());
            }
        } else {
            for l in (0..m).rev() {
                elements.push(j(i, a, path[l], c)?);
                labels.push(bwd[m - 1 - l].clone());
            }
        }
    }
    if variant == GummVariant::Defective {
        elements.push(c);
        labels.push(meet_a(Expr::Gen(
            Kind::Admissible,
            vec![var(&names[0]), conv(rest)],
        )));
    }
    let w = WitnessChain { elements, labels, env };
    w.validate(alg, start, c)?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::free::FreeOptions;
    use crate::relations::all_congruences;
    use crate::terms::search::{search_day, search_gumm};

    #[test]
    fn path_search_follows_relations() {
        let up = BinRel::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let r = up.union(&BinRel::identity(3)).unwrap();
        assert_eq!(find_path(&[r.clone(), r.clone()], 0, 2), Some(vec![0, 1, 2]));
        assert_eq!(find_path(&[r.clone()], 0, 2), None);
    }

    #[test]
    fn z2_day_witness_has_three_elements() {
        let z2 = corpus::z2();
        let chain = search_day(&z2, 4, FreeOptions::default()).unwrap().found().unwrap().chain.clone();
        let full = BinRel::full(2);
        let w = day_witness_chain(&z2, &chain, 0, 1, 0, 1, &full, &full, &full).unwrap();
        assert_eq!(w.elements.len(), 3);
        assert_eq!((w.elements[0], w.elements[2]), (0, 1));
    }

    #[test]
    fn day_witness_constant_when_endpoints_agree() {
        let lat = corpus::lattice2();
        let chain = search_day(&lat, 4, FreeOptions::default()).unwrap().found().unwrap().chain.clone();
        let id = BinRel::identity(2);
        let w = day_witness_chain(&lat, &chain, 1, 1, 1, 1, &id, &id, &id).unwrap();
        assert!(w.elements.iter().all(|&e| e == 1));
    }

    #[test]
    fn day_witness_rejects_bad_decomposition() {
        let lat = corpus::lattice2();
        let chain = search_day(&lat, 4, FreeOptions::default()).unwrap().found().unwrap().chain.clone();
        let id = BinRel::identity(2);
        let full = BinRel::full(2);
        assert!(matches!(
            day_witness_chain(&lat, &chain, 0, 0, 1, 1, &full, &id, &full),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn aga_on_z2_is_two_steps() {
        let z2 = corpus::z2();
        let chain = search_gumm(&z2, 4, FreeOptions::default()).unwrap().found().unwrap().chain.clone();
        assert_eq!(chain.scheme, Scheme::Gumm(0));
        let full = BinRel::full(2);
        let input = GummInput {
            alpha: full.clone(),
            relations: vec![full.clone(), full.clone()],
            path: vec![0, 1, 1],
            prefix: None,
        };
        let w = gumm_witness_chain(&z2, &chain, GummVariant::Aga, &input).unwrap();
        assert_eq!(w.elements.len(), 2);
        assert_eq!(w.labels[0].to_string(), "a & gen_adm(conv(R), S)");
    }

    #[test]
    fn lattice_ag_chain_lengths() {
        let lat = corpus::chain3();
        let chain = search_gumm(&lat, 4, FreeOptions::default()).unwrap().found().unwrap().chain.clone();
        let n = chain.scheme.param();
        let congs = all_congruences(&lat, 12).unwrap();
        let full = BinRel::full(3);
        for beta in &congs {
            let rels = vec![beta.clone(), full.clone(), beta.clone()];
            let path = find_path(&rels, 0, 2).unwrap();
            let input = GummInput {
                alpha: full.clone(),
                relations: rels,
                path,
                prefix: None,
            };
            let w = gumm_witness_chain(&lat, &chain, GummVariant::Ag, &input).unwrap();
            assert_eq!(w.labels.len(), 1 + 3 * n);
        }
    }

    #[test]
    fn defective_needs_even_n() {
        let lat = corpus::lattice2();
        let chain = search_gumm(&lat, 4, FreeOptions::default()).unwrap().found().unwrap().chain.clone();
        let full = BinRel::full(2);
        let input = GummInput {
            alpha: full.clone(),
            relations: vec![full.clone(), full.clone()],
            path: vec![0, 1, 1],
            prefix: None,
        };
        assert!(matches!(
            gumm_witness_chain(&lat, &chain, GummVariant::Defective, &input),
            Err(Error::Constraint(_))
        ));
        let padded = chain.pad();
        let w = gumm_witness_chain(&lat, &padded, GummVariant::Defective, &input).unwrap();
        // first step, one block of two, closing step
        assert_eq!(w.labels.len(), 4);
    }
}
