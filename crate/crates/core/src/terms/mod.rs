//! Maltsev term chains: verification against their equations and minimal
//! chain search in free algebras.

pub mod chain;
pub mod search;

pub use chain::{verify_chain, Scheme, TermChain, Verdict, Violation};
pub use search::{search_day, search_gumm, search_jonsson, Found, Search};
