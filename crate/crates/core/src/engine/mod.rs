//! Depth-first SLD resolution with resource limits and step counting, and
//! bounded ground extensions computed by query enumeration.

mod compile;
mod extension;
mod signature;
mod solve;

pub use extension::{bounded_extension, cartesian, ground_instances, ground_lists, ground_values, ModelSummary};
pub(crate) use extension::decide;
pub use signature::{infer_signature, ArgKind, Signature};
pub use solve::{solve, AnswerSet, EngineError, SolveLimits, Solver};
