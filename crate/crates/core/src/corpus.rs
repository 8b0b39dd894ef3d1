//! The bundled algebras.

use crate::algebra::{parse_algebra, FiniteAlgebra};

pub const TRIVIAL1: &str = include_str!("../corpus/trivial1.alg");
pub const Z2: &str = include_str!("../corpus/z2.alg");
pub const LATTICE2: &str = include_str!("../corpus/lattice2.alg");
pub const CHAIN3: &str = include_str!("../corpus/chain3.alg");
pub const SEMILATTICE2: &str = include_str!("../corpus/semilattice2.alg");

/// `(name, source)` for every bundled algebra.
pub const ALL: &[(&str, &str)] = &[
    ("trivial1", TRIVIAL1),
    ("z2", Z2),
    ("lattice2", LATTICE2),
    ("chain3", CHAIN3),
    ("semilattice2", SEMILATTICE2),
];

fn load(src: &str) -> FiniteAlgebra {
    parse_algebra(src).expect("bundled algebra parses")
}

pub fn trivial() -> FiniteAlgebra {
    load(TRIVIAL1)
}

pub fn z2() -> FiniteAlgebra {
    load(Z2)
}

pub fn lattice2() -> FiniteAlgebra {
    load(LATTICE2)
}

pub fn chain3() -> FiniteAlgebra {
    load(CHAIN3)
}

pub fn semilattice2() -> FiniteAlgebra {
    load(SEMILATTICE2)
}

pub fn all() -> Vec<FiniteAlgebra> {
    ALL.iter().map(|(_, src)| load(src)).collect()
}

pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, src)| load(src))
}
