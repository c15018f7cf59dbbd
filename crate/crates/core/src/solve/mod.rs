//! Realizations of linkages: closed-form forward placement, enumeration of
//! branches, Levenberg–Marquardt refinement, curve tracing and sampling
//! verification.

mod place;
mod refine;
mod sparse;
mod trace;
mod verify;

pub use place::{enumerate_realizations, forward_place, sample_branches, MAX_ENUMERATION_BITS};
pub use refine::{refine, refine_with, LinearPin, RefineOptions, RefineOutcome, RefineStatus};
pub use sparse::{CholeskyError, SymbolicCholesky};
pub use trace::{trace_curve, TraceExit, TraceOptions, TracePoint, TraceResult};
pub use verify::{sample_ball, verify_functional, VerifyReport, VerifyTolerances};

use crate::placement::PlaceError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("input {slot} lies outside the certified ball")]
    OutsideCertifiedBall { slot: usize },
    #[error("placement degenerates at step {step}")]
    PlacementDegenerate { step: usize },
    #[error(transparent)]
    Placement(PlaceError),
    #[error("expected {expected} inputs, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("{bits} branch bits are too many to enumerate")]
    TooManyBranches { bits: usize },
    #[error("corrector failed at the seed")]
    SeedRejected,
}

impl From<PlaceError> for SolveError {
    fn from(e: PlaceError) -> Self {
        match e {
            PlaceError::Degenerate { step } => SolveError::PlacementDegenerate { step },
            other => SolveError::Placement(other),
        }
    }
}
