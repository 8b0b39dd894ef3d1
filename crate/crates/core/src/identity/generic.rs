//! Variety-wide decision of congruence inclusions through a generic
//! configuration in a free algebra.
//!
//! The left-hand side must be a chain of atoms, where an atom intersects
//! congruence variables with at most one parenthesized sub-chain. Every node
//! of the chain becomes a free generator; every atom contributes its endpoint
//! pair to the variables it intersects. If the pair of outer endpoints lies in
//! the right-hand side computed in `F(nodes)`, the inclusion holds in every
//! algebra of the variety, since any witness configuration is a homomorphic
//! image of the generic one and the right-hand side is built from monotone,
//! homomorphism-preserved operations. Variables absent from the left-hand
//! side are bound to the least congruence, the worst case for a monotone
//! right-hand side.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::algebra::FiniteAlgebra;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::free::{cached_free, FreeAlgebra, FreeOptions};
use crate::identity::ast::{Count, Expr, Identity};
use crate::partition::Partition;
use crate::relations::{generate, Kind};

/// One factor of a left-hand chain.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Atom {
    vars: Vec<String>,
    sub: Option<Vec<Atom>>,
}

fn not_generic(msg: impl Into<String>) -> Error {
    Error::NotGeneric(msg.into())
}

fn fixed(c: Count) -> Result<usize> {
    match c {
        Count::Fixed(0) => Err(not_generic("zero-factor product on the left")),
        Count::Fixed(m) => Ok(m),
        Count::K => Err(not_generic("symbolic count on the left")),
    }
}

fn chain_of(e: &Expr) -> Result<Vec<Atom>> {
    match e {
        Expr::Var(v) => Ok(vec![Atom {
            vars: vec![v.clone()],
            sub: None,
        }]),
        Expr::Compose(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(chain_of(p)?);
            }
            Ok(out)
        }
        Expr::Alt(a, b, c) => {
            let m = fixed(*c)?;
            let (ca, cb) = (chain_of(a)?, chain_of(b)?);
            let mut out = Vec::new();
            for i in 0..m {
                out.extend(if i % 2 == 0 { ca.clone() } else { cb.clone() });
            }
            Ok(out)
        }
        Expr::Pow(a, c) => {
            let m = fixed(*c)?;
            let ca = chain_of(a)?;
            Ok((0..m).flat_map(|_| ca.clone()).collect())
        }
        Expr::Meet(parts) => {
            let mut atom = Atom {
                vars: Vec::new(),
                sub: None,
            };
            for p in parts {
                absorb(&mut atom, chain_of(p)?)?;
            }
            Ok(vec![atom])
        }
        Expr::Conv(_) => Err(not_generic("converse on the left")),
        Expr::Gen(..) => Err(not_generic("generated relation on the left")),
    }
}

/// Intersects `atom` with `chain`: a single atom merges, a longer chain
/// becomes the sub-chain.
fn absorb(atom: &mut Atom, mut chain: Vec<Atom>) -> Result<()> {
    if chain.len() == 1 {
        let inner = chain.pop().expect("one atom");
        atom.vars.extend(inner.vars);
        if let Some(sub) = inner.sub {
            absorb(atom, sub)?;
        }
        return Ok(());
    }
    if atom.sub.is_some() {
        return Err(not_generic("intersection of two chains"));
    }
    atom.sub = Some(chain);
    Ok(())
}

fn build(chain: &[Atom], from: usize, next: &mut usize, edges: &mut BTreeMap<String, Vec<(usize, usize)>>) -> usize {
    let mut cur = from;
    for atom in chain {
        let end = match &atom.sub {
            Some(sub) => build(sub, cur, next, edges),
            None => {
                *next += 1;
                *next - 1
            }
        };
        for v in &atom.vars {
            edges.entry(v.clone()).or_default().push((cur, end));
        }
        cur = end;
    }
    cur
}

/// Nodes and labeled edges of the generic configuration of a left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub nodes: usize,
    pub start: usize,
    pub end: usize,
    /// Generating pairs for each variable of the left-hand side.
    pub edges: BTreeMap<String, Vec<(usize, usize)>>,
}

/// Lays out the generic configuration of `id`'s left-hand side.
pub fn configuration(id: &Identity) -> Result<Configuration> {
    if !id.defs.is_empty() || !id.conditions.is_empty() {
        return Err(not_generic("side conditions"));
    }
    let mut bad = None;
    id.lhs.for_each_var(&mut |v| {
        if bad.is_none() && id.kind_of(v) != Some(Kind::Congruence) {
            bad = Some(v.to_string());
        }
    });
    if let Some(v) = bad {
        return Err(not_generic(format!("variable `{v}` is not a congruence")));
    }
    let chain = chain_of(&id.lhs)?;
    let mut next = 1;
    let mut edges = BTreeMap::new();
    let end = build(&chain, 0, &mut next, &mut edges);
    Ok(Configuration {
        nodes: next,
        start: 0,
        end,
        edges,
    })
}

/// The generic configuration realized in a free algebra, ready to test
/// right-hand sides.
pub struct Generic {
    pub config: Configuration,
    free: Arc<FreeAlgebra>,
    vars: HashMap<String, Partition>,
    meets: RefCell<HashMap<Vec<String>, Partition>>,
    as_algebra: RefCell<Option<Arc<FiniteAlgebra>>>,
}

/// Universe bound for evaluating generated relations on the free algebra.
const GEN_UNIVERSE_CAP: usize = 4096;

impl Generic {
    pub fn new(alg: &FiniteAlgebra, id: &Identity, opts: FreeOptions) -> Result<Generic> {
        let config = configuration(id)?;
        for (name, kind) in id.variables() {
            if kind != Kind::Congruence {
                return Err(not_generic(format!("variable `{name}` is not a congruence")));
            }
        }
        let free = cached_free(alg, config.nodes, opts)?;
        let mut vars = HashMap::new();
        for (name, _) in id.variables() {
            let pairs = config.edges.get(name).map_or(&[][..], Vec::as_slice);
            vars.insert(name.to_string(), free.generator_congruence(pairs)?);
        }
        Ok(Generic {
            config,
            free,
            vars,
            meets: RefCell::new(HashMap::new()),
            as_algebra: RefCell::new(None),
        })
    }

    pub fn free_size(&self) -> usize {
        self.free.len()
    }

    /// Whether the generic pair lies in `rhs` with `k` bound.
    pub fn holds(&self, rhs: &Expr, k: Option<usize>) -> Result<bool> {
        let gens = self.free.generators();
        let (x, y) = (gens[self.config.start], gens[self.config.end]);
        let img = self.image(rhs, &BitSet::singleton(self.free.len(), x), true, k)?;
        Ok(img.contains(y))
    }

    fn partition(&self, v: &str) -> Result<&Partition> {
        self.vars.get(v).ok_or_else(|| Error::Undeclared(v.to_string()))
    }

    /// Names of a meet of plain variables (nested meets flattened), if it is one.
    fn var_names(e: &Expr, out: &mut Vec<String>) -> bool {
        match e {
            Expr::Var(v) => {
                out.push(v.clone());
                true
            }
            Expr::Meet(parts) => parts.iter().all(|p| Self::var_names(p, out)),
            _ => false,
        }
    }

    fn meet_partition(&self, mut names: Vec<String>) -> Result<Partition> {
        names.sort();
        names.dedup();
        if names.len() == 1 {
            return Ok(self.partition(&names[0])?.clone());
        }
        if let Some(p) = self.meets.borrow().get(&names) {
            return Ok(p.clone());
        }
        let mut p = self.partition(&names[0])?.clone();
        for v in &names[1..] {
            p = p.meet(self.partition(v)?);
        }
        self.meets.borrow_mut().insert(names, p.clone());
        Ok(p)
    }

    /// `{y : s e y}` over `s ∈ set` when `forward`, else `{y : y e s}`.
    fn image(&self, e: &Expr, set: &BitSet, forward: bool, k: Option<usize>) -> Result<BitSet> {
        match e {
            Expr::Var(v) => Ok(self.partition(v)?.image(set)),
            Expr::Conv(inner) => self.image(inner, set, !forward, k),
            Expr::Compose(parts) => {
                let mut acc = set.clone();
                let order: Vec<&Expr> = if forward {
                    parts.iter().collect()
                } else {
                    parts.iter().rev().collect()
                };
                for p in order {
                    acc = self.image(p, &acc, forward, k)?;
                }
                Ok(acc)
            }
            Expr::Alt(a, b, c) => {
                let m = c.resolve(k).ok_or(Error::UnresolvedCount)?;
                let mut acc = set.clone();
                for i in 0..m {
                    // Factor i of the product; read backwards for preimages.
                    let idx = if forward { i } else { m - 1 - i };
                    let f = if idx % 2 == 0 { a } else { b };
                    acc = self.image(f, &acc, forward, k)?;
                }
                Ok(acc)
            }
            Expr::Pow(a, c) => {
                let m = c.resolve(k).ok_or(Error::UnresolvedCount)?;
                let mut acc = set.clone();
                for _ in 0..m {
                    acc = self.image(a, &acc, forward, k)?;
                }
                Ok(acc)
            }
            Expr::Meet(parts) => {
                let mut names = Vec::new();
                let mut others = Vec::new();
                for p in parts {
                    let mut local = Vec::new();
                    if Self::var_names(p, &mut local) {
                        names.extend(local);
                    } else {
                        others.push(p);
                    }
                }
                let part = if names.is_empty() {
                    None
                } else {
                    Some(self.meet_partition(names)?)
                };
                self.meet_image(part.as_ref(), &others, set, forward, k)
            }
            Expr::Gen(kind, parts) => self.gen_image(*kind, parts, set, forward, k),
        }
    }

    fn meet_image(
        &self,
        part: Option<&Partition>,
        others: &[&Expr],
        set: &BitSet,
        forward: bool,
        k: Option<usize>,
    ) -> Result<BitSet> {
        let size = self.free.len();
        match (part, others) {
            (Some(p), []) => Ok(p.image(set)),
            (Some(p), [other]) => {
                // Within a class C, the image is image(other, set ∩ C) ∩ C.
                let mut out = BitSet::new(size);
                let mut seen = BitSet::new(p.class_count());
                for s in set.iter() {
                    let c = p.class_index(s);
                    if !seen.insert(c) {
                        continue;
                    }
                    let mut class = BitSet::new(size);
                    for &y in p.class(c) {
                        class.insert(y as usize);
                    }
                    let mut sub = class.clone();
                    sub.intersect_with(set);
                    let mut img = self.image(other, &sub, forward, k)?;
                    img.intersect_with(&class);
                    out.union_with(&img);
                }
                Ok(out)
            }
            _ => {
                let mut out = BitSet::new(size);
                for s in set.iter() {
                    let single = BitSet::singleton(size, s);
                    let mut acc = match part {
                        Some(p) => p.image(&single),
                        None => BitSet::full(size),
                    };
                    for o in others {
                        acc.intersect_with(&self.image(o, &single, forward, k)?);
                    }
                    out.union_with(&acc);
                }
                Ok(out)
            }
        }
    }

    fn gen_image(&self, kind: Kind, parts: &[Expr], set: &BitSet, forward: bool, k: Option<usize>) -> Result<BitSet> {
        let size = self.free.len();
        if size > GEN_UNIVERSE_CAP {
            return Err(Error::CapExceeded {
                what: "generated-relation universe",
                reached: size,
                cap: GEN_UNIVERSE_CAP,
            });
        }
        let alg = {
            let mut slot = self.as_algebra.borrow_mut();
            match &*slot {
                Some(a) => a.clone(),
                None => {
                    let a = Arc::new(self.free.to_algebra()?);
                    *slot = Some(a.clone());
                    a
                }
            }
        };
        let mut seed = Vec::new();
        for p in parts {
            for x in 0..size {
                let img = self.image(p, &BitSet::singleton(size, x), true, k)?;
                seed.extend(img.iter().map(|y| (x, y)));
            }
        }
        let rel = generate(&alg, &seed, kind)?;
        let rel = if forward { rel } else { rel.converse() };
        let mut out = BitSet::new(size);
        for s in set.iter() {
            for y in rel.row_iter(s) {
                out.insert(y);
            }
        }
        Ok(out)
    }
}

/// Outcome of a variety-wide check.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PwVerdict {
    pub holds: bool,
    /// Number of free generators of the generic configuration.
    pub nodes: usize,
    pub free_size: usize,
}

/// Decides `id` (with `k` bound) for the whole variety generated by `alg`.
pub fn pw_check(alg: &FiniteAlgebra, id: &Identity, k: Option<usize>, opts: FreeOptions) -> Result<PwVerdict> {
    if id.uses_k() && k.is_none() {
        return Err(Error::UnresolvedCount);
    }
    let g = Generic::new(alg, id, opts)?;
    Ok(PwVerdict {
        holds: g.holds(&id.rhs, k)?,
        nodes: g.config.nodes,
        free_size: g.free_size(),
    })
}
