//! Explicit constructions from term chains, the table of bound formulas, and
//! the report checking the bounds against measured spectra.

pub mod bounds;
pub mod report;
pub mod transform;
pub mod witness;

pub use bounds::{bound, formulas, lookup_bound, BoundFormula, Claim};
pub use report::{consistency_report, BoundCheck, Measured, Report, ReportOptions, SpectrumEntry, Status};
pub use transform::{jonsson_to_day, jonsson_to_day_on};
pub use witness::{
    day_witness_chain, find_day_decomposition, find_path, gumm_witness_chain, GummInput, GummVariant,
    WitnessChain,
};
