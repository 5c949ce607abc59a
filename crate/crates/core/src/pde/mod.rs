//! The four benchmark problems: residual operators, condition-enforcing
//! transforms, reference solutions, and the evaluation metric.

mod grid;
mod metric;
mod problem;
pub mod reference;

pub use grid::{GridSpec, ReferenceGrid};
pub use metric::relative_l2;
pub use problem::{PdeKind, PdeProblem, ReactionSign, ResidualObjective};
