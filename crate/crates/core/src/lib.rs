//! Quasi-measures on finite coats: axiom checking with witnesses, exterior
//! measures by exact minimum-weight set cover, and extension to the
//! generated algebra with pre-measure verification. An interval backend
//! covers the exponential survival example on `[0, ∞)`.

pub mod cli;
pub mod cover;
pub mod error;
pub mod extension;
pub mod instance;
pub mod interval;
pub mod quasi;
pub mod report;
pub mod set;
pub mod testkit;
pub mod value;

pub use cover::{outer, outer_exhaustive, CoverSolution, OuterMeasureCache};
pub use error::{Error, Result};
pub use extension::{extend, is_caratheodory_measurable, verify_premeasure, MeasureTable};
pub use instance::{parse_instance, InstanceSpec};
pub use quasi::{check_alt_conditions, check_axioms, CoverMode, QuasiMeasure, Variant};
pub use report::{AxiomReport, CheckOutcome, Status};
pub use set::{Coat, GroundSet, SubsetMask};
pub use value::QValue;

/// Limits for loops that quantify over all `2^n` subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_exhaustive_n: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_exhaustive_n: 16,
        }
    }
}
