//! Free algebras `F(g)` in the variety generated by a finite algebra `A`,
//! realized as the subalgebra of `A^(A^g)` generated by the projections.
//!
//! Elements are value vectors indexed by coordinates (tuples of `A^g`, last
//! generator fastest). They are packed into `u64` words at a power-of-two
//! number of bits per value, and operations are applied a byte or nibble at a
//! time through precomputed chunk tables.
//!
//! With coordinate elimination enabled, a coordinate whose value is a fixed
//! function of an earlier kept coordinate (or constant) across all term
//! functions is not stored; its values are recovered on demand.

use std::collections::HashMap;
use std::hash::{BuildHasher, Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use hashbrown::HashTable;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;

use crate::algebra::{checked_pow, Element, FiniteAlgebra, Operation};
use crate::error::{Error, Result};
use crate::partition::{Partition, UnionFind};
use crate::term::Term;

/// Default bound on `elements × |A|^g`.
pub const DEFAULT_FREE_CAP: usize = 10_000_000;

/// Induced operation tables are only stored below this many entries.
const TABLE_CAP: usize = 16_000_000;

#[derive(Clone, Copy, Debug)]
pub struct FreeOptions {
    pub cap_entries: usize,
    pub dedup_columns: bool,
}

impl Default for FreeOptions {
    fn default() -> Self {
        FreeOptions {
            cap_entries: DEFAULT_FREE_CAP,
            dedup_columns: true,
        }
    }
}

/// How a coordinate's value is obtained from the stored vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coord {
    /// Stored at this packed position.
    Kept(u32),
    /// Every term function takes this value here.
    Constant(u32),
    /// `map[value at packed position]`.
    Image(u32, Vec<u32>),
}

/// How an element was first reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Gen(usize),
    App(usize, Vec<u32>),
}

#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    base: FiniteAlgebra,
    g: usize,
    tuple_count: usize,
    coords: Vec<Coord>,
    kept: usize,
    layout: Layout,
    arena: Vec<u64>,
    witnesses: Vec<Witness>,
    levels: Vec<usize>,
    generators: Vec<usize>,
    tables: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Copy, Debug)]
struct Layout {
    bpv: usize,
    vpw: usize,
    words: usize,
    last_mask: u64,
}

impl Layout {
    fn new(n: usize, positions: usize) -> Layout {
        let mut bpv = 1;
        while (1usize << bpv) < n {
            bpv *= 2;
        }
        let vpw = 64 / bpv;
        let words = positions.div_ceil(vpw).max(1);
        let used = positions - (words - 1) * vpw;
        let last_mask = if used * bpv >= 64 || positions == 0 {
            if positions == 0 {
                0
            } else {
                u64::MAX
            }
        } else {
            (1u64 << (used * bpv)) - 1
        };
        Layout {
            bpv,
            vpw,
            words,
            last_mask,
        }
    }

    #[inline]
    fn get(&self, v: &[u64], pos: usize) -> u32 {
        let w = v[pos / self.vpw];
        let shift = (pos % self.vpw) * self.bpv;
        ((w >> shift) & self.value_mask()) as u32
    }

    #[inline]
    fn set(&self, v: &mut [u64], pos: usize, val: u32) {
        let shift = (pos % self.vpw) * self.bpv;
        v[pos / self.vpw] |= (val as u64) << shift;
    }

    #[inline]
    fn value_mask(&self) -> u64 {
        if self.bpv == 64 {
            u64::MAX
        } else {
            (1u64 << self.bpv) - 1
        }
    }
}

/// Operation evaluator on packed vectors.
#[derive(Clone, Debug)]
enum Kernel {
    Constant(u32),
    Chunked { cb: usize, table: Vec<u8> },
    PerValue,
}

fn build_kernel(alg: &FiniteAlgebra, op: usize, layout: Layout) -> Kernel {
    let arity = alg.signature().arity(op);
    if arity == 0 {
        return Kernel::Constant(alg.apply(op, &[]) as u32);
    }
    let bpv = layout.bpv;
    let Some(cb) = [8usize, 4, 2, 1]
        .into_iter()
        .find(|&cb| cb >= bpv && cb % bpv == 0 && arity * cb <= 16)
    else {
        return Kernel::PerValue;
    };
    let n = alg.size();
    let vpc = cb / bpv;
    let vmask = (1usize << bpv) - 1;
    let cmask = (1usize << cb) - 1;
    let entries = 1usize << (arity * cb);
    let mut table = vec![0u8; entries];
    let mut args = vec![0usize; arity];
    for (idx, slot) in table.iter_mut().enumerate() {
        let mut out = 0usize;
        'values: for j in 0..vpc {
            for (a, arg) in args.iter_mut().enumerate() {
                let chunk = (idx >> ((arity - 1 - a) * cb)) & cmask;
                let v = (chunk >> (j * bpv)) & vmask;
                if v >= n {
                    continue 'values;
                }
                *arg = v;
            }
            out |= alg.apply(op, &args) << (j * bpv);
        }
        *slot = out as u8;
    }
    Kernel::Chunked { cb, table }
}

struct Evaluator<'a> {
    alg: &'a FiniteAlgebra,
    layout: Layout,
    positions: usize,
    kernels: Vec<Kernel>,
}

impl Evaluator<'_> {
    fn apply(&self, op: usize, args: &[&[u64]], out: &mut [u64]) {
        let layout = self.layout;
        match &self.kernels[op] {
            Kernel::Constant(c) => {
                out.fill(0);
                for p in 0..self.positions {
                    layout.set(out, p, *c);
                }
            }
            Kernel::Chunked { cb, table } => {
                let cb = *cb;
                let cmask = (1u64 << cb) - 1;
                let chunks = 64 / cb;
                if args.len() == 2 && cb == 8 {
                    let (x, y) = (args[0], args[1]);
                    for w in 0..layout.words {
                        let (a, b) = (x[w], y[w]);
                        let mut res = 0u64;
                        for c in 0..8 {
                            let s = c * 8;
                            let idx = (((a >> s) & 0xff) << 8 | ((b >> s) & 0xff)) as usize;
                            res |= (table[idx] as u64) << s;
                        }
                        out[w] = res;
                    }
                } else {
                    for w in 0..layout.words {
                        let mut res = 0u64;
                        for c in 0..chunks {
                            let s = c * cb;
                            let mut idx = 0u64;
                            for a in args {
                                idx = (idx << cb) | ((a[w] >> s) & cmask);
                            }
                            res |= (table[idx as usize] as u64) << s;
                        }
                        out[w] = res;
                    }
                }
            }
            Kernel::PerValue => {
                out.fill(0);
                let mut vals = vec![0usize; args.len()];
                for p in 0..self.positions {
                    for (v, a) in vals.iter_mut().zip(args) {
                        *v = layout.get(a, p) as usize;
                    }
                    layout.set(out, p, self.alg.apply(op, &vals) as u32);
                }
            }
        }
        if let Some(last) = out.last_mut() {
            *last &= layout.last_mask;
        }
    }
}

#[inline]
fn hash_words(words: &[u64]) -> u64 {
    let mut h = FxBuildHasher.build_hasher();
    words.hash(&mut h);
    h.finish()
}

/// Decodes coordinate `t` of `A^g` into generator values.
pub fn decode_tuple(n: usize, g: usize, mut t: usize) -> Vec<Element> {
    let mut out = vec![0; g];
    for slot in out.iter_mut().rev() {
        *slot = t % n;
        t /= n;
    }
    out
}

fn encode_tuple(n: usize, tuple: &[Element]) -> usize {
    tuple.iter().fold(0, |acc, &v| acc * n + v)
}

/// Closure of `start` in `A^2` (pairs encoded as `a * n + b`).
fn subpower_closure(alg: &FiniteAlgebra, start: &[(Element, Element)]) -> Vec<bool> {
    let n = alg.size();
    let mut present = vec![false; n * n];
    let mut list: Vec<(Element, Element)> = Vec::new();
    for op in 0..alg.ops().len() {
        if alg.signature().arity(op) == 0 {
            let c = alg.apply(op, &[]);
            if !present[c * n + c] {
                present[c * n + c] = true;
                list.push((c, c));
            }
        }
    }
    for &(a, b) in start {
        if !present[a * n + b] {
            present[a * n + b] = true;
            list.push((a, b));
        }
    }
    let mut old = 0;
    while old < list.len() {
        let frontier = old;
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
                if idx.iter().any(|&i| i >= frontier) {
                    for i in 0..arity {
                        (xs[i], ys[i]) = list[idx[i]];
                    }
                    let (x, y) = (alg.apply(op, &xs), alg.apply(op, &ys));
                    if !present[x * n + y] {
                        present[x * n + y] = true;
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
    present
}

/// Decides for every coordinate whether it is kept, constant, or an image
/// of an earlier kept coordinate.
fn plan_coordinates(alg: &FiniteAlgebra, g: usize, tuple_count: usize, dedup: bool) -> Vec<Coord> {
    let n = alg.size();
    if !dedup {
        return (0..tuple_count).map(|t| Coord::Kept(t as u32)).collect();
    }
    let mut coords = Vec::with_capacity(tuple_count);
    let mut kept: Vec<(usize, Vec<Element>)> = Vec::new();
    'coords: for t in 0..tuple_count {
        let tv = decode_tuple(n, g, t);
        // Values of all term functions at t: the subuniverse generated by t's entries.
        let diag: Vec<(Element, Element)> = tv.iter().map(|&v| (v, v)).collect();
        let sub = subpower_closure(alg, &diag);
        let values: Vec<Element> = (0..n).filter(|&v| sub[v * n + v]).collect();
        if values.len() == 1 {
            coords.push(Coord::Constant(values[0] as u32));
            continue;
        }
        for (pos, (_, sv)) in kept.iter().enumerate() {
            let gens: Vec<(Element, Element)> = sv.iter().copied().zip(tv.iter().copied()).collect();
            let rel = subpower_closure(alg, &gens);
            let mut map = vec![u32::MAX; n];
            let mut functional = true;
            'rows: for a in 0..n {
                for b in 0..n {
                    if rel[a * n + b] {
                        if map[a] != u32::MAX {
                            functional = false;
                            break 'rows;
                        }
                        map[a] = b as u32;
                    }
                }
            }
            if functional {
                for m in map.iter_mut() {
                    if *m == u32::MAX {
                        *m = 0;
                    }
                }
                coords.push(Coord::Image(pos as u32, map));
                continue 'coords;
            }
        }
        coords.push(Coord::Kept(kept.len() as u32));
        kept.push((t, tv));
    }
    coords
}

/// Locally new vectors found while expanding one chunk of argument tuples.
struct ChunkOut {
    op: usize,
    arity: usize,
    words: Vec<u64>,
    args: Vec<u32>,
    count: usize,
}

/// Builds `F(g)` by breadth-first closure from the projections.
///
/// Element order is discovery order: operations in signature order, argument
/// tuples in lexicographic order, restricted at each level to tuples with at
/// least one argument from the previous level.
pub fn build_free(alg: &FiniteAlgebra, g: usize, opts: FreeOptions) -> Result<FreeAlgebra> {
    let n = alg.size();
    let tuple_count = checked_pow(n, g)?;
    if tuple_count > opts.cap_entries {
        return Err(Error::CapExceeded {
            what: "free algebra coordinates",
            reached: tuple_count,
            cap: opts.cap_entries,
        });
    }
    let max_elements = opts.cap_entries / tuple_count.max(1);
    let coords = plan_coordinates(alg, g, tuple_count, opts.dedup_columns);
    let kept_tuples: Vec<usize> = coords
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Coord::Kept(_)))
        .map(|(t, _)| t)
        .collect();
    let positions = kept_tuples.len();
    let layout = Layout::new(n, positions);
    let w = layout.words;
    let kernels: Vec<Kernel> = (0..alg.ops().len())
        .map(|op| build_kernel(alg, op, layout))
        .collect();
    let eval = Evaluator {
        alg,
        layout,
        positions,
        kernels,
    };

    let mut arena: Vec<u64> = Vec::new();
    let mut witnesses: Vec<Witness> = Vec::new();
    let mut index: HashTable<u32> = HashTable::new();
    let mut generators = Vec::with_capacity(g);

    let insert = |arena: &mut Vec<u64>,
                      witnesses: &mut Vec<Witness>,
                      index: &mut HashTable<u32>,
                      v: &[u64],
                      wit: Witness|
     -> Result<usize> {
        let h = hash_words(v);
        if let Some(&i) = index.find(h, |&i| &arena[i as usize * w..(i as usize + 1) * w] == v) {
            return Ok(i as usize);
        }
        let i = witnesses.len();
        if i + 1 > max_elements {
            return Err(Error::CapExceeded {
                what: "free algebra elements",
                reached: i + 1,
                cap: max_elements,
            });
        }
        arena.extend_from_slice(v);
        witnesses.push(wit);
        index.insert_unique(h, i as u32, |&j| {
            hash_words(&arena[j as usize * w..(j as usize + 1) * w])
        });
        Ok(i)
    };

    for i in 0..g {
        let mut v = vec![0u64; w];
        for (p, &t) in kept_tuples.iter().enumerate() {
            layout.set(&mut v, p, decode_tuple(n, g, t)[i] as u32);
        }
        generators.push(insert(&mut arena, &mut witnesses, &mut index, &v, Witness::Gen(i))?);
    }
    let mut levels = vec![0, witnesses.len()];
    let ops: Vec<usize> = (0..alg.ops().len()).collect();
    let batch = (rayon::current_num_threads() * 8).max(8);

    loop {
        let lo = levels[levels.len() - 2];
        let hi = levels[levels.len() - 1];
        let first = levels.len() == 2;
        // Constants enter at the first expansion only.
        if first {
            for &op in &ops {
                if alg.signature().arity(op) == 0 {
                    let mut out = vec![0u64; w];
                    eval.apply(op, &[], &mut out);
                    insert(&mut arena, &mut witnesses, &mut index, &out, Witness::App(op, vec![]))?;
                }
            }
        }
        if lo == hi && !first {
            break;
        }
        let jobs: Vec<(usize, usize)> = ops
            .iter()
            .filter(|&&op| alg.signature().arity(op) > 0)
            .flat_map(|&op| (0..hi).map(move |a0| (op, a0)))
            .collect();
        for group in jobs.chunks(batch) {
            let outs: Vec<ChunkOut> = {
                let arena_ref = &arena;
                let index_ref = &index;
                group
                    .par_iter()
                    .map(|&(op, a0)| {
                        expand_chunk(&eval, arena_ref, index_ref, w, op, a0, lo, hi)
                    })
                    .collect()
            };
            for out in outs {
                for c in 0..out.count {
                    let v = &out.words[c * w..(c + 1) * w];
                    let args = out.args[c * out.arity..(c + 1) * out.arity].to_vec();
                    insert(&mut arena, &mut witnesses, &mut index, v, Witness::App(out.op, args))?;
                }
            }
        }
        let len = witnesses.len();
        if len == hi {
            break;
        }
        levels.push(len);
    }
    if *levels.last().unwrap() != witnesses.len() {
        levels.push(witnesses.len());
    }

    let mut free = FreeAlgebra {
        base: alg.clone(),
        g,
        tuple_count,
        coords,
        kept: positions,
        layout,
        arena,
        witnesses,
        levels,
        generators,
        tables: None,
    };
    let len = free.len();
    let total: usize = alg
        .ops()
        .iter()
        .map(|o| len.checked_pow(o.arity as u32).unwrap_or(usize::MAX))
        .fold(0usize, |acc, x| acc.saturating_add(x));
    if total <= TABLE_CAP {
        free.tables = Some(free.compute_tables(&eval, &index)?);
    }
    Ok(free)
}

#[allow(clippy::too_many_arguments)]
fn expand_chunk(
    eval: &Evaluator<'_>,
    arena: &[u64],
    index: &HashTable<u32>,
    w: usize,
    op: usize,
    a0: usize,
    lo: usize,
    hi: usize,
) -> ChunkOut {
    let arity = eval.alg.signature().arity(op);
    let mut out = ChunkOut {
        op,
        arity,
        words: Vec::new(),
        args: Vec::new(),
        count: 0,
    };
    let mut local: HashTable<u32> = HashTable::new();
    let mut res = vec![0u64; w];
    let mut args = vec![a0; arity];
    let elem = |i: usize| &arena[i * w..(i + 1) * w];

    // Odometer over args[1..] with the constraint that some argument is new.
    let rest = arity - 1;
    let mut ranges: Vec<(usize, usize)> = vec![(0, hi); rest];
    let mut slices: Vec<&[u64]> = Vec::with_capacity(arity);
    let mut visit = |args: &[usize], out: &mut ChunkOut, local: &mut HashTable<u32>, res: &mut Vec<u64>| {
        slices.clear();
        slices.extend(args.iter().map(|&a| elem(a)));
        eval.apply(op, &slices, res);
        let h = hash_words(res);
        if index
            .find(h, |&i| elem(i as usize) == &res[..])
            .is_some()
        {
            return;
        }
        if local
            .find(h, |&i| &out.words[i as usize * w..(i as usize + 1) * w] == &res[..])
            .is_some()
        {
            return;
        }
        let c = out.count as u32;
        out.words.extend_from_slice(res);
        out.args.extend(args.iter().map(|&a| a as u32));
        out.count += 1;
        let words = &out.words;
        local.insert_unique(h, c, |&j| hash_words(&words[j as usize * w..(j as usize + 1) * w]));
    };

    if rest == 0 {
        if a0 >= lo {
            visit(&args, &mut out, &mut local, &mut res);
        }
        return out;
    }
    // need_new[i]: whether positions 1..=i are all old (so a later one must be new)
    fn range_for(pos: usize, rest: usize, all_old_before: bool, lo: usize, hi: usize) -> (usize, usize) {
        if pos == rest && all_old_before {
            (lo, hi)
        } else {
            (0, hi)
        }
    }
    let mut all_old = vec![false; rest + 1];
    all_old[0] = a0 < lo;
    // initialize
    for p in 1..=rest {
        ranges[p - 1] = range_for(p, rest, all_old[p - 1], lo, hi);
        args[p] = ranges[p - 1].0;
        all_old[p] = all_old[p - 1] && args[p] < lo;
    }
    loop {
        if !(all_old[rest - 1] && args[rest] < lo) && ranges[rest - 1].0 < ranges[rest - 1].1 {
            visit(&args, &mut out, &mut local, &mut res);
        }
        // advance
        let mut p = rest;
        loop {
            args[p] += 1;
            if args[p] < ranges[p - 1].1 {
                break;
            }
            p -= 1;
            if p == 0 {
                return out;
            }
        }
        all_old[p] = all_old[p - 1] && args[p] < lo;
        for q in p + 1..=rest {
            ranges[q - 1] = range_for(q, rest, all_old[q - 1], lo, hi);
            args[q] = ranges[q - 1].0;
            all_old[q] = all_old[q - 1] && args[q] < lo;
        }
    }
}

impl FreeAlgebra {
    pub fn base(&self) -> &FiniteAlgebra {
        &self.base
    }

    pub fn generator_count(&self) -> usize {
        self.g
    }

    /// `|A|^g`, the number of coordinates.
    pub fn tuple_count(&self) -> usize {
        self.tuple_count
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// Element index of the `i`-th projection.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Start indices of the breadth-first levels, followed by the length.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    /// Number of coordinates actually stored per element.
    pub fn stored_coordinates(&self) -> usize {
        self.kept
    }

    pub fn witness(&self, e: usize) -> &Witness {
        &self.witnesses[e]
    }

    fn packed(&self, e: usize) -> &[u64] {
        let w = self.layout.words;
        &self.arena[e * w..(e + 1) * w]
    }

    /// Value of element `e` at coordinate `t`.
    #[inline]
    pub fn value_at(&self, e: usize, t: usize) -> Element {
        match &self.coords[t] {
            Coord::Kept(p) => self.layout.get(self.packed(e), *p as usize) as Element,
            Coord::Constant(c) => *c as Element,
            Coord::Image(p, map) => map[self.layout.get(self.packed(e), *p as usize) as usize] as Element,
        }
    }

    /// The full value vector of `e` over all coordinates.
    pub fn vector(&self, e: usize) -> Vec<u32> {
        (0..self.tuple_count).map(|t| self.value_at(e, t) as u32).collect()
    }

    /// Value of `e` read as a term function at the generator assignment `tuple`.
    pub fn value_at_tuple(&self, e: usize, tuple: &[Element]) -> Element {
        self.value_at(e, encode_tuple(self.base.size(), tuple))
    }

    /// The stored witness as a term over `x0..x{g-1}`.
    pub fn term_of(&self, e: usize) -> Result<Term> {
        if e >= self.len() {
            return Err(Error::OutOfRange {
                value: e,
                size: self.len(),
            });
        }
        let mut memo: Vec<Option<Term>> = vec![None; self.len()];
        Ok(self.term_rec(e, &mut memo))
    }

    fn term_rec(&self, e: usize, memo: &mut Vec<Option<Term>>) -> Term {
        if let Some(t) = &memo[e] {
            return t.clone();
        }
        let t = match &self.witnesses[e] {
            Witness::Gen(i) => Term::Var(*i),
            Witness::App(op, args) => Term::App(
                self.base.op(*op).name.clone(),
                args.iter().map(|&a| self.term_rec(a as usize, memo)).collect(),
            ),
        };
        memo[e] = Some(t.clone());
        t
    }

    /// Induced operation, if tables were stored.
    pub fn apply(&self, op: usize, args: &[usize]) -> Option<usize> {
        let tables = self.tables.as_ref()?;
        let idx = args.iter().fold(0usize, |acc, &a| acc * self.len() + a);
        Some(tables[op][idx] as usize)
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// The free algebra as a finite algebra in its own right (needs tables).
    pub fn to_algebra(&self) -> Result<FiniteAlgebra> {
        let tables = self.tables.as_ref().ok_or(Error::CapExceeded {
            what: "induced operation table entries",
            reached: self.len(),
            cap: TABLE_CAP,
        })?;
        let ops = self
            .base
            .ops()
            .iter()
            .zip(tables)
            .map(|(o, t)| Operation {
                name: o.name.clone(),
                arity: o.arity,
                table: t.clone(),
            })
            .collect();
        FiniteAlgebra::new(
            format!("F_{}({})", self.base.name(), self.g),
            self.len(),
            ops,
        )
    }

    fn compute_tables(&self, eval: &Evaluator<'_>, index: &HashTable<u32>) -> Result<Vec<Vec<u32>>> {
        let w = self.layout.words;
        let len = self.len();
        let mut tables = Vec::new();
        for op in 0..self.base.ops().len() {
            let arity = self.base.signature().arity(op);
            let count = checked_pow(len, arity)?;
            let table: Vec<u32> = (0..count)
                .into_par_iter()
                .map_init(
                    || (vec![0u64; w], vec![0usize; arity]),
                    |(res, args), mut idx| {
                        for slot in args.iter_mut().rev() {
                            *slot = idx % len;
                            idx /= len;
                        }
                        let slices: Vec<&[u64]> = args.iter().map(|&a| self.packed(a)).collect();
                        eval.apply(op, &slices, res);
                        let h = hash_words(res);
                        *index
                            .find(h, |&i| self.packed(i as usize) == &res[..])
                            .expect("free algebra is closed")
                    },
                )
                .collect();
            tables.push(table);
        }
        Ok(tables)
    }

    /// The congruence of `F` generated by identifying generators in pairs.
    ///
    /// For a free algebra this is the kernel of the substitution that sends
    /// each generator to the least generator of its class, so two elements are
    /// related iff they agree on every coordinate constant on the classes.
    pub fn generator_congruence(&self, pairs: &[(usize, usize)]) -> Result<Partition> {
        let g = self.g;
        let n = self.base.size();
        let mut uf = UnionFind::new(g);
        for &(u, v) in pairs {
            for x in [u, v] {
                if x >= g {
                    return Err(Error::OutOfRange { value: x, size: g });
                }
            }
            uf.union(u, v);
        }
        let labels = uf.labels();
        let mut reps: Vec<usize> = labels.clone();
        reps.sort_unstable();
        reps.dedup();
        let class_pos: Vec<usize> = labels
            .iter()
            .map(|l| reps.binary_search(l).unwrap())
            .collect();
        let count = checked_pow(n, reps.len())?;
        let mut coords = Vec::with_capacity(count);
        for c in 0..count {
            let cv = decode_tuple(n, reps.len(), c);
            let tuple: Vec<Element> = class_pos.iter().map(|&p| cv[p]).collect();
            coords.push(encode_tuple(n, &tuple));
        }
        // Drop coordinates that are constant or copies of another listed one.
        coords.retain(|&t| !matches!(self.coords[t], Coord::Constant(_)));
        let len = self.len();
        let sigs: Vec<Vec<u32>> = (0..len)
            .into_par_iter()
            .map(|e| coords.iter().map(|&t| self.value_at(e, t) as u32).collect())
            .collect();
        let mut first: rustc_hash::FxHashMap<&[u32], usize> = rustc_hash::FxHashMap::default();
        let labels: Vec<usize> = (0..len)
            .map(|e| *first.entry(&sigs[e][..]).or_insert(e))
            .collect();
        Ok(Partition::from_labels(&labels))
    }
}

type CacheKey = (String, usize, usize, bool);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<FreeAlgebra>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<FreeAlgebra>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Known lower bounds on `|F(g)|`, per algebra text: exact sizes of built
/// free algebras and the element counts at which builds hit their cap.
fn floors() -> &'static Mutex<HashMap<String, Vec<(usize, usize)>>> {
    static FLOORS: OnceLock<Mutex<HashMap<String, Vec<(usize, usize)>>>> = OnceLock::new();
    FLOORS.get_or_init(Default::default)
}

/// [`build_free`] memoized per process, keyed by the algebra's canonical text.
/// Spectrum scans and reports ask for the same free algebras many times.
///
/// `F(g')` embeds in `F(g)` for `g' <= g`, so a build is refused up front
/// when a smaller free algebra is already known to be over the element cap.
pub fn cached_free(alg: &FiniteAlgebra, g: usize, opts: FreeOptions) -> Result<Arc<FreeAlgebra>> {
    let text = alg.to_alg_string();
    let key = (text.clone(), g, opts.cap_entries, opts.dedup_columns);
    if let Some(f) = cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(f));
    }
    if let Ok(tuples) = checked_pow(alg.size(), g) {
        let max_elements = opts.cap_entries / tuples.max(1);
        let known = floors()
            .lock()
            .unwrap()
            .get(&text)
            .and_then(|v| v.iter().filter(|(g0, _)| *g0 <= g).map(|(_, s)| *s).max());
        if let Some(size) = known.filter(|&s| s > max_elements) {
            return Err(Error::CapExceeded {
                what: "free algebra elements",
                reached: size,
                cap: max_elements,
            });
        }
    }
    let built = build_free(alg, g, opts);
    let floor = match &built {
        Ok(f) => Some(f.len()),
        Err(Error::CapExceeded {
            what: "free algebra elements",
            reached,
            ..
        }) => Some(*reached),
        Err(_) => None,
    };
    if let Some(size) = floor {
        floors().lock().unwrap().entry(text).or_default().push((g, size));
    }
    let f = Arc::new(built?);
    cache().lock().unwrap().insert(key, Arc::clone(&f));
    Ok(f)
}

pub fn clear_free_cache() {
    cache().lock().unwrap().clear();
    floors().lock().unwrap().clear();
}
