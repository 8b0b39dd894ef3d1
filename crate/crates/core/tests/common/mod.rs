//! Shared helpers for the integration tests: seeded random algebras and
//! brute-force oracles that do not use the library's relation code.

#![allow(dead_code)]

use cwb_core::{BinRel, Element, FiniteAlgebra, Kind, Operation};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod suites;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_table(rng: &mut ChaCha8Rng, size: usize, arity: usize, idempotent: bool) -> Vec<u32> {
    let len = size.pow(arity as u32);
    (0..len)
        .map(|idx| {
            let args = digits(idx, size, arity);
            if idempotent && args.iter().all(|&a| a == args[0]) {
                args[0] as u32
            } else {
                rng.random_range(0..size) as u32
            }
        })
        .collect()
}

/// Base-`size` digits of `idx`, most significant first (the table layout).
pub fn digits(mut idx: usize, size: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
    out
}

/// One or two operations of arity 1 to 3 with uniformly random tables. The
/// total table size is kept small enough for brute-force relation
/// enumeration.
pub fn random_algebra(seed: u64, max_size: usize) -> FiniteAlgebra {
    let mut rng = rng(seed);
    let size = rng.random_range(1..=max_size);
    let count = rng.random_range(1..=2);
    let max_arity = if size <= 3 { 3 } else { 2 };
    let ops = (0..count)
        .map(|i| {
            let arity = rng.random_range(1..=max_arity);
            let idempotent = rng.random_bool(0.5);
            Operation {
                name: format!("f{i}"),
                arity,
                table: random_table(&mut rng, size, arity, idempotent),
            }
        })
        .collect();
    FiniteAlgebra::new(format!("random{seed}"), size, ops).unwrap()
}

/// Algebras with a majority term operation, hence with Jónsson, Day and
/// Gumm terms. Size 2: the majority operation with up to two random
/// monotone idempotent ternary operations. Size 3: a randomly relabelled 3-element chain
/// with lattice operations, optionally with the median and a random binary
/// lattice term. Larger random majority algebras have free algebras far too
/// big to search.
pub fn majority_algebra(seed: u64, size: usize) -> FiniteAlgebra {
    let mut rng = rng(seed);
    let mut ops = Vec::new();
    match size {
        2 => {
            ops.push(Operation {
                name: "m".into(),
                arity: 3,
                table: (0..8).map(|idx| majority(&digits(idx, 2, 3)) as u32).collect(),
            });
            // monotone idempotent ternary functions keep the clone inside
            // the distributive lattice clone, so free algebras stay small
            let monotone: Vec<Vec<u32>> = (0u32..256)
                .map(|bits| (0..8).map(|i| bits >> i & 1).collect::<Vec<u32>>())
                .filter(|t| t[0] == 0 && t[7] == 1)
                .filter(|t| (0..8).all(|i| (0..8).all(|j| i & j != i || t[i] <= t[j])))
                .collect();
            for i in 0..rng.random_range(0..=2) {
                ops.push(Operation {
                    name: format!("f{i}"),
                    arity: 3,
                    table: monotone[rng.random_range(0..monotone.len())].clone(),
                });
            }
        }
        3 => {
            // rank[x] is the position of x in the chain
            let mut rank = [0usize, 1, 2];
            for i in (1..3).rev() {
                rank.swap(i, rng.random_range(0..=i));
            }
            let by_rank = |r: usize| rank.iter().position(|&x| x == r).unwrap() as u32;
            let binary = |f: &dyn Fn(usize, usize) -> usize| -> Vec<u32> {
                (0..9).map(|idx| by_rank(f(rank[idx / 3], rank[idx % 3]))).collect()
            };
            ops.push(Operation { name: "join".into(), arity: 2, table: binary(&|a, b| a.max(b)) });
            ops.push(Operation { name: "meet".into(), arity: 2, table: binary(&|a, b| a.min(b)) });
            if rng.random_bool(0.5) {
                let table = (0..27)
                    .map(|idx| {
                        let v = digits(idx, 3, 3);
                        by_rank(majority(&[rank[v[0]], rank[v[1]], rank[v[2]]]))
                    })
                    .collect();
                ops.push(Operation { name: "med".into(), arity: 3, table });
            }
            if rng.random_bool(0.5) {
                // x ∨ (x ∧ y) style terms: pick one of the binary lattice terms
                let pick = rng.random_range(0..3);
                let f = move |a: usize, b: usize| match pick {
                    0 => a,
                    1 => b,
                    _ => a.min(b),
                };
                ops.push(Operation { name: "t".into(), arity: 2, table: binary(&f) });
            }
        }
        _ => panic!("majority algebras are generated for sizes 2 and 3"),
    }
    FiniteAlgebra::new(format!("majority{size}_{seed}"), size, ops).unwrap()
}

/// Majority value of three ranks: the median.
fn majority(v: &[usize]) -> usize {
    let mut s = [v[0], v[1], v[2]];
    s.sort_unstable();
    s[1]
}

/// Relation as a boolean matrix.
pub type Matrix = Vec<Vec<bool>>;

pub fn to_matrix(r: &BinRel) -> Matrix {
    let n = r.size();
    (0..n).map(|a| (0..n).map(|b| r.contains(a, b)).collect()).collect()
}

pub fn from_matrix(m: &Matrix) -> BinRel {
    let pairs: Vec<(Element, Element)> = (0..m.len())
        .flat_map(|a| (0..m.len()).filter(move |&b| m[a][b]).map(move |b| (a, b)))
        .collect();
    BinRel::from_pairs(m.len(), &pairs).unwrap()
}

/// Whether every operation maps coordinatewise related tuples to related
/// values, by enumerating all pairs of argument tuples.
pub fn preserves(alg: &FiniteAlgebra, m: &Matrix) -> bool {
    let n = alg.size();
    alg.ops().iter().all(|op| {
        let len = n.pow(op.arity as u32);
        (0..len).all(|i| {
            let x = digits(i, n, op.arity);
            (0..len).all(|j| {
                let y = digits(j, n, op.arity);
                !x.iter().zip(&y).all(|(&a, &b)| m[a][b])
                    || m[op.table[i] as usize][op.table[j] as usize]
            })
        })
    })
}

pub fn has_kind(alg: &FiniteAlgebra, m: &Matrix, kind: Kind) -> bool {
    let n = m.len();
    let reflexive = (0..n).all(|a| m[a][a]);
    let symmetric = (0..n).all(|a| (0..n).all(|b| m[a][b] == m[b][a]));
    let transitive = (0..n).all(|a| (0..n).all(|b| !m[a][b] || (0..n).all(|c| !m[b][c] || m[a][c])));
    reflexive
        && match kind {
            Kind::Admissible => true,
            Kind::Tolerance => symmetric,
            Kind::Congruence => symmetric && transitive,
        }
        && preserves(alg, m)
}

/// Every reflexive relation on `0..n`.
pub fn reflexive_relations(n: usize) -> impl Iterator<Item = Matrix> {
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    (0u64..1 << off.len()).map(move |mask| {
        let mut m = vec![vec![false; n]; n];
        for (a, row) in m.iter_mut().enumerate() {
            row[a] = true;
        }
        for (i, &(a, b)) in off.iter().enumerate() {
            m[a][b] = mask >> i & 1 == 1;
        }
        m
    })
}

/// The least relation of `kind` containing `seed`, as the intersection of
/// every relation of that kind containing it.
pub fn brute_generate(alg: &FiniteAlgebra, seed: &[(Element, Element)], kind: Kind) -> Matrix {
    let n = alg.size();
    let mut acc = vec![vec![true; n]; n];
    for m in reflexive_relations(n) {
        if seed.iter().all(|&(a, b)| m[a][b]) && has_kind(alg, &m, kind) {
            for a in 0..n {
                for b in 0..n {
                    acc[a][b] &= m[a][b];
                }
            }
        }
    }
    acc
}

/// Every set partition of `0..n`, as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            prefix.push(b);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// Congruences found by filtering all partitions.
pub fn brute_congruences(alg: &FiniteAlgebra) -> Vec<BinRel> {
    let n = alg.size();
    let mut out: Vec<BinRel> = partitions(n)
        .into_iter()
        .map(|labels| {
            (0..n)
                .map(|a| (0..n).map(|b| labels[a] == labels[b]).collect())
                .collect::<Matrix>()
        })
        .filter(|m| preserves(alg, m))
        .map(|m| from_matrix(&m))
        .collect();
    out.sort();
    out
}
