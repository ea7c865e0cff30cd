//! Computable embeddings between linear orders and equivalence structures,
//! run on finite presentations.
//!
//! A structure is presented as a growing sequence of finite atomic diagrams
//! ([`stream::StructureStream`]). Operators map diagrams to diagrams under a
//! budget ([`kernel::EnumerationOperator`]) or consume one stage at a time
//! ([`kernel::Construction`]). The [`forcing`] module decides forcing
//! questions over bounded extensions, and [`classifier`] reads run logs back
//! as evidence about the limit isomorphism type.

pub mod classifier;
pub mod encoding;
pub mod enumerate;
pub mod error;
pub mod forcing;
pub mod generate;
pub mod kernel;
pub mod ops;
pub mod stream;
pub mod structures;

pub use error::{Error, Result};
pub use generate::{generate, CanonicalSpec, Family, Policy};
pub use kernel::{run, BudgetSchedule, EnumerationOperator, OpRef, OperatorTarget, RunLog};
pub use stream::StructureStream;
pub use structures::{Elem, Fact, FiniteDiagram, Signature};
