//! Congruence identities, Maltsev term chains and free algebras over finite
//! algebras.

pub mod algebra;
pub mod bitset;
pub mod constructions;
pub mod corpus;
pub mod error;
pub mod free;
pub mod identity;
pub mod partition;
pub mod relations;
pub mod term;
pub mod terms;

pub use algebra::{parse_algebra, Element, FiniteAlgebra, Operation, Signature};
pub use error::{Error, Result};
pub use relations::{all_congruences, cong_join, generate, is_compatible, BinRel, Kind};
pub use term::{eval_term, Term};
