//! Concrete operators and constructions.

pub mod axioms;
pub mod eq2ord;
pub mod formula;
pub mod multiplier;
pub mod ord2eq;
pub mod phi_pair;
pub mod phi_sigma2;
pub mod replicate;

use std::sync::Arc;

use crate::error::Result;
use crate::kernel::{Concatenate, FillStyle, IntervalFill, OpRef, Reverse};

/// The shipped second equivalence-to-order operator: thresholds 3/2, reversed.
pub fn eq2ord_v2() -> OpRef {
    Arc::new(Reverse(Arc::new(eq2ord::Eq2Ord::v2_raw())))
}

/// Left-closed fill of `eq2ord_v1` below right-closed fill of `eq2ord_v2`.
/// On Ê₁ the limit is 1+η, on Ê₂ it is η+1.
pub fn endpoint_pipeline() -> Result<OpRef> {
    let low: OpRef = Arc::new(IntervalFill::new(Arc::new(eq2ord::Eq2Ord::v1()), FillStyle::LeftClosed)?);
    let high: OpRef = Arc::new(IntervalFill::new(eq2ord_v2(), FillStyle::RightClosed)?);
    Ok(Arc::new(Concatenate::new(low, high)?))
}
