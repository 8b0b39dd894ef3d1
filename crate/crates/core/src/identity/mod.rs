//! Congruence identities: syntax, evaluation, variety-wide and single-algebra
//! checks, the built-in catalog, and spectra.

pub mod ast;
pub mod catalog;
pub mod concrete;
pub mod eval;
pub mod generic;
pub mod parser;
pub mod spectrum;

pub use ast::{Count, Definition, Expr, Identity, Level};
pub use concrete::{check_concrete, ConcreteOptions, ConcreteVerdict, Counterexample};
pub use eval::{eval_expr, Env};
pub use generic::{pw_check, PwVerdict};
pub use parser::parse_identity;
pub use spectrum::{spectrum, SpectrumOptions, SpectrumResult, SpectrumValue};
