//! Reflexive binary relations on `{0, .., n-1}` as word-packed bit matrices,
//! and the relational calculus used by congruence identities.

use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::algebra::{Element, FiniteAlgebra};
use crate::bitset::{or_into, words_for, BitSet, Ones};
use crate::error::{Error, Result};
use crate::partition::UnionFind;

/// Compatibility kinds, ordered from weakest to strongest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Admissible,
    Tolerance,
    Congruence,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Admissible => "adm",
            Kind::Tolerance => "tol",
            Kind::Congruence => "cong",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Admissible => "admissible relation",
            Kind::Tolerance => "tolerance",
            Kind::Congruence => "congruence",
        })
    }
}

/// A reflexive relation. Row `a` holds the set `{b : a R b}`.
///
/// Equality and hashing look only at the bits; the kind hint is advisory
/// metadata that was verified when attached.
#[derive(Clone)]
pub struct BinRel {
    n: usize,
    wpr: usize,
    bits: Vec<u64>,
    hint: Option<Kind>,
}

impl PartialEq for BinRel {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bits == other.bits
    }
}

impl Eq for BinRel {}

impl std::hash::Hash for BinRel {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.bits.hash(state);
    }
}

impl PartialOrd for BinRel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinRel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, &self.bits).cmp(&(other.n, &other.bits))
    }
}

impl BinRel {
    /// The identity relation (the least congruence).
    pub fn identity(n: usize) -> Self {
        let wpr = words_for(n);
        let mut bits = vec![0; n * wpr];
        for a in 0..n {
            bits[a * wpr + a / 64] |= 1 << (a % 64);
        }
        BinRel {
            n,
            wpr,
            bits,
            hint: None,
        }
    }

    /// The full relation `A × A`.
    pub fn full(n: usize) -> Self {
        let mut r = Self::identity(n);
        for a in 0..n {
            for b in 0..n {
                r.insert(a, b);
            }
        }
        r
    }

    /// Reflexive closure of the given pairs.
    pub fn from_pairs(n: usize, pairs: &[(Element, Element)]) -> Result<Self> {
        let mut r = Self::identity(n);
        for &(a, b) in pairs {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::OutOfRange { value: v, size: n });
                }
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    /// Equivalence relation whose classes are given by `labels[a]`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut r = Self::identity(n);
        for a in 0..n {
            for b in 0..n {
                if labels[a] == labels[b] {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    /// Equivalence relation with the given blocks; unlisted elements are singletons.
    pub fn from_blocks(n: usize, blocks: &[&[Element]]) -> Result<Self> {
        let mut r = Self::identity(n);
        for block in blocks {
            for &a in *block {
                for &b in *block {
                    if a >= n || b >= n {
                        return Err(Error::OutOfRange {
                            value: a.max(b),
                            size: n,
                        });
                    }
                    r.insert(a, b);
                }
            }
        }
        Ok(r)
    }

    /// Parses rows of `0`/`1` characters; the result must be reflexive.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.len();
        let mut r = Self::identity(n);
        for (a, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {a} has length {}, expected {n}",
                    row.len()
                )));
            }
            for (b, ch) in row.chars().enumerate() {
                match ch {
                    '1' => r.insert(a, b),
                    '0' if a == b => {
                        return Err(Error::KindViolation("reflexive relation".into()))
                    }
                    '0' => {}
                    other => {
                        return Err(Error::InvalidArgument(format!("bad bit `{other}`")))
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.n)
            .map(|a| {
                (0..self.n)
                    .map(|b| if self.contains(a, b) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn hint(&self) -> Option<Kind> {
        self.hint
    }

    /// Attaches a kind hint after verifying it against `alg`.
    pub fn with_hint(mut self, alg: &FiniteAlgebra, kind: Kind) -> Result<Self> {
        if !is_compatible(alg, &self, kind) {
            return Err(Error::KindViolation(kind.to_string()));
        }
        self.hint = Some(kind);
        Ok(self)
    }

    #[inline]
    pub fn contains(&self, a: Element, b: Element) -> bool {
        self.bits[a * self.wpr + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn insert(&mut self, a: Element, b: Element) {
        self.bits[a * self.wpr + b / 64] |= 1 << (b % 64);
    }

    #[inline]
    pub fn row(&self, a: Element) -> &[u64] {
        &self.bits[a * self.wpr..(a + 1) * self.wpr]
    }

    /// Successors of `a`.
    pub fn row_iter(&self, a: Element) -> Ones<'_> {
        Ones::new(self.row(a))
    }

    pub fn row_set(&self, a: Element) -> BitSet {
        BitSet::from_words(self.n, self.row(a).to_vec())
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// All pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (Element, Element)> + '_ {
        (0..self.n).flat_map(move |a| self.row_iter(a).map(move |b| (a, b)))
    }

    pub fn is_subset(&self, other: &BinRel) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        compose_unchecked(self, self).is_subset(self)
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_symmetric() && self.is_transitive()
    }

    fn check_size(&self, other: &BinRel) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// `a (R∘S) c` iff there is `b` with `a R b` and `b S c`.
    pub fn compose(&self, other: &BinRel) -> Result<BinRel> {
        self.check_size(other)?;
        Ok(compose_unchecked(self, other))
    }

    pub fn meet(&self, other: &BinRel) -> Result<BinRel> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.hint = None;
        for (a, b) in out.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        Ok(out)
    }

    /// Union, used for generating-set bookkeeping (not closed under any kind).
    pub fn union(&self, other: &BinRel) -> Result<BinRel> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.hint = None;
        or_into(&mut out.bits, &other.bits);
        Ok(out)
    }

    pub fn converse(&self) -> BinRel {
        let mut out = Self::identity(self.n);
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out.hint = self.hint;
        out
    }

    /// `R ∘ S ∘ R ∘ …` with exactly `m` factors.
    pub fn alt(&self, other: &BinRel, m: usize) -> Result<BinRel> {
        self.check_size(other)?;
        if m == 0 {
            return Err(Error::InvalidArgument(
                "alternating composition needs at least one factor".into(),
            ));
        }
        let mut acc = self.clone();
        acc.hint = None;
        for i in 1..m {
            let next = if i % 2 == 1 { other } else { self };
            acc = compose_unchecked(&acc, next);
        }
        Ok(acc)
    }

    /// `R^h`, that is `alt(R, R, h)`.
    pub fn pow(&self, h: usize) -> Result<BinRel> {
        self.alt(self, h)
    }

    /// Reflexive-transitive closure.
    pub fn transitive_closure(&self) -> BinRel {
        let mut acc = self.clone();
        acc.hint = None;
        loop {
            let next = compose_unchecked(&acc, &acc);
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }
}

fn compose_unchecked(r: &BinRel, s: &BinRel) -> BinRel {
    let n = r.n;
    let wpr = r.wpr;
    let mut bits = vec![0u64; n * wpr];
    for (a, out) in bits.chunks_mut(wpr.max(1)).enumerate().take(n) {
        for b in r.row_iter(a) {
            or_into(out, s.row(b));
        }
    }
    BinRel {
        n,
        wpr,
        bits,
        hint: None,
    }
}

impl fmt::Debug for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinRel(")?;
        f.debug_list().entries(self.to_row_strings()).finish()?;
        write!(f, ")")
    }
}

impl Serialize for BinRel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.to_row_strings();
        let mut seq = serializer.serialize_seq(Some(rows.len()))?;
        for row in &rows {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// Whether `r` is preserved by every operation of `alg` (and, for stronger
/// kinds, symmetric and transitive).
pub fn is_compatible(alg: &FiniteAlgebra, r: &BinRel, kind: Kind) -> bool {
    if r.size() != alg.size() {
        return false;
    }
    if kind >= Kind::Tolerance && !r.is_symmetric() {
        return false;
    }
    if kind == Kind::Congruence && !r.is_transitive() {
        return false;
    }
    if kind == Kind::Congruence {
        // For equivalences it suffices to check unary translations of pairs.
        return preserved_by_translations(alg, r);
    }
    let pairs: Vec<(Element, Element)> = r.pairs().collect();
    for op in 0..alg.ops().len() {
        let arity = alg.signature().arity(op);
        let mut idx = vec![0usize; arity];
        let mut xs = vec![0; arity];
        let mut ys = vec![0; arity];
        'tuples: loop {
            for i in 0..arity {
                xs[i] = pairs[idx[i]].0;
                ys[i] = pairs[idx[i]].1;
            }
            if !r.contains(alg.apply(op, &xs), alg.apply(op, &ys)) {
                return false;
            }
            for i in (0..arity).rev() {
                idx[i] += 1;
                if idx[i] < pairs.len() {
                    continue 'tuples;
                }
                idx[i] = 0;
            }
            break;
        }
    }
    true
}

fn preserved_by_translations(alg: &FiniteAlgebra, r: &BinRel) -> bool {
    let mut ok = true;
    for (a, b) in r.pairs() {
        if a == b {
            continue;
        }
        for_each_translation_image(alg, a, b, |x, y| {
            if !r.contains(x, y) {
                ok = false;
            }
            ok
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Calls `f(t(a), t(b))` for every basic translation `t` (an operation with all
/// arguments but one fixed). Stops early when `f` returns false.
fn for_each_translation_image(
    alg: &FiniteAlgebra,
    a: Element,
    b: Element,
    mut f: impl FnMut(Element, Element) -> bool,
) {
    let n = alg.size();
    for op in 0..alg.ops().len() {
        let arity = alg.signature().arity(op);
        if arity == 0 {
            continue;
        }
        let mut args = vec![0; arity];
        let count = n.pow(arity as u32 - 1);
        for pos in 0..arity {
            for code in 0..count {
                let mut c = code;
                for i in (0..arity).rev() {
                    if i != pos {
                        args[i] = c % n;
                        c /= n;
                    }
                }
                args[pos] = a;
                let x = alg.apply(op, &args);
                args[pos] = b;
                let y = alg.apply(op, &args);
                if !f(x, y) {
                    return;
                }
            }
        }
    }
}

/// The least relation of `kind` containing `seed` (always reflexive).
pub fn generate(alg: &FiniteAlgebra, seed: &[(Element, Element)], kind: Kind) -> Result<BinRel> {
    let n = alg.size();
    for &(a, b) in seed {
        for v in [a, b] {
            if v >= n {
                return Err(Error::OutOfRange { value: v, size: n });
            }
        }
    }
    let mut r = match kind {
        Kind::Congruence => generate_congruence(alg, seed),
        _ => generate_subpower(alg, seed, kind == Kind::Tolerance),
    };
    r.hint = Some(kind);
    Ok(r)
}

fn generate_congruence(alg: &FiniteAlgebra, seed: &[(Element, Element)]) -> BinRel {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(Element, Element)> = Vec::new();
    for &(a, b) in seed {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    while let Some((a, b)) = work.pop() {
        for_each_translation_image(alg, a, b, |x, y| {
            if uf.union(x, y) {
                work.push((x, y));
            }
            true
        });
    }
    BinRel::from_labels(&uf.labels())
}

/// Subalgebra of `A²` generated by the diagonal and the seed (plus converses
/// for tolerances). Symmetric generators give a symmetric result, since the
/// swap map is an automorphism of `A²`.
fn generate_subpower(alg: &FiniteAlgebra, seed: &[(Element, Element)], symmetric: bool) -> BinRel {
    let n = alg.size();
    let mut rel = BinRel::identity(n);
    let mut list: Vec<(Element, Element)> = (0..n).map(|a| (a, a)).collect();
    for &(a, b) in seed {
        let mut add = vec![(a, b)];
        if symmetric {
            add.push((b, a));
        }
        for (x, y) in add {
            if !rel.contains(x, y) {
                rel.insert(x, y);
                list.push((x, y));
            }
        }
    }
    // Semi-naive closure: each round evaluates tuples containing at least one
    // pair added in the previous round.
    let mut old = 0;
    while old < list.len() {
        let frontier_start = old;
        let len = list.len();
        old = len;
        for op in 0..alg.ops().len() {
            let arity = alg.signature().arity(op);
            if arity == 0 {
                continue;
            }
            let mut idx = vec![0usize; arity];
            let mut xs = vec![0; arity];
            let mut ys = vec![0; arity];
            'tuples: loop {
                if idx.iter().any(|&i| i >= frontier_start) {
                    for i in 0..arity {
                        xs[i] = list[idx[i]].0;
                        ys[i] = list[idx[i]].1;
                    }
                    let (x, y) = (alg.apply(op, &xs), alg.apply(op, &ys));
                    if !rel.contains(x, y) {
                        rel.insert(x, y);
                        list.push((x, y));
                    }
                }
                for i in (0..arity).rev() {
                    idx[i] += 1;
                    if idx[i] < len {
                        continue 'tuples;
                    }
                    idx[i] = 0;
                }
                break;
            }
        }
    }
    rel
}

/// Join of two congruences: the transitive closure of their union.
pub fn cong_join(alpha: &BinRel, beta: &BinRel) -> Result<BinRel> {
    alpha.check_size(beta)?;
    for r in [alpha, beta] {
        if !r.is_equivalence() {
            return Err(Error::KindViolation("congruence".into()));
        }
    }
    let n = alpha.size();
    let mut uf = UnionFind::new(n);
    for r in [alpha, beta] {
        for (a, b) in r.pairs() {
            uf.union(a, b);
        }
    }
    let mut out = BinRel::from_labels(&uf.labels());
    out.hint = Some(Kind::Congruence);
    Ok(out)
}

pub const DEFAULT_CONGRUENCE_CAP: usize = 12;

/// The full congruence lattice, sorted. Computed as the closure of the
/// principal congruences under joins, together with the identity.
pub fn all_congruences(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<BinRel>> {
    let n = alg.size();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "congruence enumeration universe",
            reached: n,
            cap,
        });
    }
    let mut principal: Vec<BinRel> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let c = generate_congruence(alg, &[(a, b)]);
            if !principal.contains(&c) {
                principal.push(c);
            }
        }
    }
    let mut all: std::collections::BTreeSet<BinRel> = std::collections::BTreeSet::new();
    all.insert(BinRel::identity(n));
    let mut frontier: Vec<BinRel> = vec![BinRel::identity(n)];
    while let Some(c) = frontier.pop() {
        for p in &principal {
            if p.is_subset(&c) {
                continue;
            }
            let j = cong_join(&c, p)?;
            if all.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    Ok(all
        .into_iter()
        .map(|mut c| {
            c.hint = Some(Kind::Congruence);
            c
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn chain3_parts() -> (BinRel, BinRel) {
        let beta = BinRel::from_blocks(3, &[&[0, 1]]).unwrap();
        let gamma = BinRel::from_blocks(3, &[&[1, 2]]).unwrap();
        (beta, gamma)
    }

    #[test]
    fn compose_on_chain_partitions() {
        let (beta, gamma) = chain3_parts();
        assert!(beta.compose(&gamma).unwrap().contains(0, 2));
        assert!(!gamma.compose(&beta).unwrap().contains(0, 2));
        assert!(beta.meet(&gamma).unwrap().is_identity());
        assert_eq!(beta.alt(&gamma, 3).unwrap(), BinRel::full(3));
        assert_eq!(beta.alt(&gamma, 1).unwrap(), beta);
        assert!(beta.alt(&gamma, 0).is_err());
    }

    #[test]
    fn size_mismatch_is_reported() {
        let r = BinRel::identity(2);
        let s = BinRel::identity(3);
        assert_eq!(
            r.compose(&s).unwrap_err(),
            Error::SizeMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn chain3_generated_congruences() {
        let a = corpus::chain3();
        let c01 = generate(&a, &[(0, 1)], Kind::Congruence).unwrap();
        assert_eq!(c01, BinRel::from_blocks(3, &[&[0, 1]]).unwrap());
        let c02 = generate(&a, &[(0, 2)], Kind::Congruence).unwrap();
        assert_eq!(c02, BinRel::full(3));
        assert!(generate(&a, &[], Kind::Congruence).unwrap().is_identity());
    }

    #[test]
    fn chain3_order_pair_is_admissible_only() {
        let a = corpus::chain3();
        let r = BinRel::from_pairs(3, &[(0, 1)]).unwrap();
        assert!(is_compatible(&a, &r, Kind::Admissible));
        assert!(!is_compatible(&a, &r, Kind::Tolerance));
        assert!(!is_compatible(&a, &r, Kind::Congruence));
    }

    #[test]
    fn congruence_counts() {
        assert_eq!(all_congruences(&corpus::chain3(), 12).unwrap().len(), 4);
        assert_eq!(all_congruences(&corpus::z2(), 12).unwrap().len(), 2);
        assert_eq!(all_congruences(&corpus::trivial(), 12).unwrap().len(), 1);
    }

    #[test]
    fn join_of_chain_partitions_is_full() {
        let (beta, gamma) = chain3_parts();
        assert_eq!(cong_join(&beta, &gamma).unwrap(), BinRel::full(3));
        assert_eq!(cong_join(&beta, &BinRel::identity(3)).unwrap(), beta);
        let r = BinRel::from_pairs(3, &[(0, 1)]).unwrap();
        assert!(cong_join(&r, &beta).is_err());
    }

    #[test]
    fn row_strings_round_trip() {
        let (beta, _) = chain3_parts();
        let rows = beta.to_row_strings();
        assert_eq!(rows, vec!["110", "110", "001"]);
        assert_eq!(BinRel::from_row_strings(&rows).unwrap(), beta);
    }
}
