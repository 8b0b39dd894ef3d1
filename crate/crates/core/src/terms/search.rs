//! Minimal Day, Gumm and Jónsson chains, found as shortest alternating paths
//! in small free algebras.

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::free::{cached_free, FreeAlgebra, FreeOptions};
use crate::partition::Partition;
use crate::term::Term;
use crate::terms::chain::{Scheme, TermChain};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Found {
    /// Scheme parameter (`k` for Day, `n` otherwise).
    pub param: usize,
    pub chain: TermChain,
    /// Size of the free algebra searched.
    pub free_size: usize,
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search {
    Found(Found),
    /// No chain with parameter up to the bound.
    NoneUpTo(usize),
    /// The alternating closure stabilized without reaching the target, so no
    /// chain exists for any parameter.
    Never,
}

impl Search {
    pub fn found(&self) -> Option<&Found> {
        match self {
            Search::Found(f) => Some(f),
            _ => None,
        }
    }
}

/// Shortest path `p_0, .., p_j` with `p_0 ∈ init`, `p_j = target`, and step
/// `i` (1-based) inside `rels[(i - 1) % 2]`. Ties go to the smallest index.
pub(crate) enum PathResult {
    Path(Vec<usize>),
    Exhausted,
    Stuck,
}

pub(crate) fn alternating_path(
    init: BitSet,
    rels: [&Partition; 2],
    target: usize,
    min_steps: usize,
    max_steps: usize,
) -> PathResult {
    let mut layers = vec![init];
    let mut j = 0;
    loop {
        if j >= min_steps && layers[j].contains(target) {
            break;
        }
        if j >= max_steps {
            return PathResult::Exhausted;
        }
        let next = rels[j % 2].image(&layers[j]);
        // Layer j is already closed under the relation that produced it, so
        // if the other one adds nothing the layers are final.
        if j >= 1 && next == layers[j] && !next.contains(target) {
            return PathResult::Stuck;
        }
        layers.push(next);
        j += 1;
    }
    let mut path = vec![target; j + 1];
    for i in (1..=j).rev() {
        let rel = rels[(i - 1) % 2];
        let prev = rel
            .class_of_elem(path[i])
            .iter()
            .map(|&y| y as usize)
            .find(|&y| layers[i - 1].contains(y))
            .expect("layer was produced from its predecessor");
        path[i - 1] = prev;
    }
    PathResult::Path(path)
}

struct Generic {
    free: std::sync::Arc<FreeAlgebra>,
    alpha: Partition,
    beta: Partition,
    gamma: Partition,
}

impl Generic {
    fn term(&self, e: usize) -> Result<Term> {
        self.free.term_of(e)
    }
}

fn generic(
    alg: &FiniteAlgebra,
    g: usize,
    opts: FreeOptions,
    alpha: &[(usize, usize)],
    beta: &[(usize, usize)],
    gamma: &[(usize, usize)],
) -> Result<Generic> {
    let free = cached_free(alg, g, opts)?;
    Ok(Generic {
        alpha: free.generator_congruence(alpha)?,
        beta: free.generator_congruence(beta)?,
        gamma: free.generator_congruence(gamma)?,
        free,
    })
}

fn verified(alg: &FiniteAlgebra, chain: TermChain) -> Result<TermChain> {
    let verdict = chain.verify(alg)?;
    if let Some(v) = verdict.violations.first() {
        return Err(Error::InvalidChain(format!(
            "extracted {} chain violates {} at {:?}",
            chain.scheme, v.equation, v.assignment
        )));
    }
    Ok(chain)
}

/// Minimal `k` such that `alg` has Day terms `d_0 .. d_k`.
///
/// Works in `F(4)` on `a, b, c, d` with `α = Cg{(a,d),(b,c)}`,
/// `β = Cg{(a,b),(c,d)}`, `γ = Cg{(b,c)}`, looking for the shortest
/// alternating `αβ / αγ` path from `a` to `d`.
pub fn search_day(alg: &FiniteAlgebra, k_max: usize, opts: FreeOptions) -> Result<Search> {
    let gen = generic(alg, 4, opts, &[(0, 3), (1, 2)], &[(0, 1), (2, 3)], &[(1, 2)])?;
    let ab = gen.alpha.meet(&gen.beta);
    let ag = gen.alpha.meet(&gen.gamma);
    let f = &gen.free;
    let (a, d) = (f.generators()[0], f.generators()[3]);
    let init = BitSet::singleton(f.len(), a);
    let path = match alternating_path(init, [&ab, &ag], d, 1, k_max) {
        PathResult::Path(p) => p,
        PathResult::Exhausted => return Ok(Search::NoneUpTo(k_max)),
        PathResult::Stuck => return Ok(Search::Never),
    };
    let k = path.len() - 1;
    let mut terms = Vec::with_capacity(k + 1);
    for (i, &e) in path.iter().enumerate() {
        terms.push(match i {
            0 => Term::Var(0),
            _ if i == k => Term::Var(3),
            _ => gen.term(e)?,
        });
    }
    let chain = verified(alg, TermChain::new(Scheme::Day(k), terms)?)?;
    Ok(Search::Found(Found {
        param: k,
        chain,
        free_size: f.len(),
    }))
}

fn ternary_generic(alg: &FiniteAlgebra, opts: FreeOptions) -> Result<Generic> {
    // generators x, y, z
    generic(alg, 3, opts, &[(0, 2)], &[(0, 1)], &[(1, 2)])
}

/// Minimal `n` such that `alg` has Gumm terms `p, j_1 .. j_{n+1}`.
///
/// Works in `F(3)` on `x, y, z` with `β = Cg(x,y)`, `γ = Cg(y,z)`,
/// `α = Cg(x,z)`, looking for `(x,z) ∈ α(γ∘β) ∘ (αγ ∘_n αβ)`.
pub fn search_gumm(alg: &FiniteAlgebra, n_max: usize, opts: FreeOptions) -> Result<Search> {
    let gen = ternary_generic(alg, opts)?;
    let f = &gen.free;
    let (x, z) = (f.generators()[0], f.generators()[2]);
    let size = f.len();
    // α ∩ (γ∘β) applied to x.
    let gamma_x = gen.gamma.image(&BitSet::singleton(size, x));
    let mut init = gen.beta.image(&gamma_x);
    let mut alpha_x = BitSet::new(size);
    for &y in gen.alpha.class_of_elem(x) {
        alpha_x.insert(y as usize);
    }
    init.intersect_with(&alpha_x);
    let ag = gen.alpha.meet(&gen.gamma);
    let ab = gen.alpha.meet(&gen.beta);
    let path = match alternating_path(init, [&ag, &ab], z, 0, n_max) {
        PathResult::Path(p) => p,
        PathResult::Exhausted => return Ok(Search::NoneUpTo(n_max)),
        PathResult::Stuck => return Ok(Search::Never),
    };
    let n = path.len() - 1;
    // p is the smallest middle element u with x γ u β j_1.
    let e1 = path[0];
    let u = gen
        .gamma
        .class_of_elem(x)
        .iter()
        .map(|&u| u as usize)
        .find(|&u| gen.beta.same(u, e1))
        .expect("j_1 was reached through γ∘β");
    let mut terms = vec![gen.term(u)?];
    for (i, &e) in path.iter().enumerate() {
        terms.push(if i == n { Term::Var(2) } else { gen.term(e)? });
    }
    let chain = verified(alg, TermChain::new(Scheme::Gumm(n), terms)?)?;
    Ok(Search::Found(Found {
        param: n,
        chain,
        free_size: size,
    }))
}

/// Minimal `n` such that `alg` has Jónsson terms `j_0 .. j_{n+1}` (or ALVIN
/// terms when `alvin` is set), i.e. `(x,z) ∈ αβ ∘_{n+1} αγ` in `F(3)`
/// (`αγ ∘_{n+1} αβ` for ALVIN).
pub fn search_jonsson(
    alg: &FiniteAlgebra,
    n_max: usize,
    alvin: bool,
    opts: FreeOptions,
) -> Result<Search> {
    let gen = ternary_generic(alg, opts)?;
    let f = &gen.free;
    let (x, z) = (f.generators()[0], f.generators()[2]);
    let ab = gen.alpha.meet(&gen.beta);
    let ag = gen.alpha.meet(&gen.gamma);
    let rels = if alvin { [&ag, &ab] } else { [&ab, &ag] };
    let init = BitSet::singleton(f.len(), x);
    let path = match alternating_path(init, rels, z, 1, n_max + 1) {
        PathResult::Path(p) => p,
        PathResult::Exhausted => return Ok(Search::NoneUpTo(n_max)),
        PathResult::Stuck => return Ok(Search::Never),
    };
    let n = path.len() - 2;
    let mut terms = Vec::with_capacity(n + 2);
    for (i, &e) in path.iter().enumerate() {
        terms.push(match i {
            0 => Term::Var(0),
            _ if i == n + 1 => Term::Var(2),
            _ => gen.term(e)?,
        });
    }
    let scheme = if alvin { Scheme::Alvin(n) } else { Scheme::Jonsson(n) };
    let chain = verified(alg, TermChain::new(scheme, terms)?)?;
    Ok(Search::Found(Found {
        param: n,
        chain,
        free_size: f.len(),
    }))
}
