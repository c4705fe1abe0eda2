//! Exact-arithmetic engine for the fourth-order max-type recurrence
//!
//! ```text
//! x[n+4] = max(x[n+3], x[n+2], x[n+1], 0) - x[n]
//! ```
//!
//! Sequence values are elements of the field generated over the rationals by
//! square roots of squarefree positive integers, represented canonically so
//! that every comparison and every orbit computation is exact. On top of the
//! stepper the crate provides the window classification into the five cases
//! `C1..C5` with their 10/11-step closed forms, route tracing through the
//! case graph, periodicity certificates, accumulation-interval prediction
//! with empirical density checks, construction of nearby periodic tuples of
//! arbitrarily large period via continued-fraction convergents, and the first
//! integrals `V1`/`V2` together with their Lyness-map counterparts `H1`/`H2`.
//!
//! The crate is `no_std` (it requires `alloc`); all values are immutable and
//! all operations are pure, so everything can be shared freely across
//! threads.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod cases;
mod gcd;
pub mod invariants;
mod parse;
pub mod recurrence;
pub mod scalar;

pub use analysis::{
    decompose_term, density_report, detect_period, kronecker_gaps, nearby_periodic,
    nonpositive_bounds, predict_accumulation, predict_periodicity, AccumulationPrediction,
    AnalysisError, Certificate, DensityReport, NonpositiveBounds, PeriodicNeighbor,
    PeriodicityReport, TermDecomposition, Verdict,
};
pub use cases::{
    case_fast_forward, classify, satisfies, trace_routes, CaseId, CasesError, RouteId,
    RouteSegment, RouteTrace,
};
pub use invariants::{
    check_invariance, lyness_h, lyness_h_unreduced, lyness_step, tropical_limit_residual,
    unreduced_eq, v1, v2, InvariantId, LynessError, LynessScalar, LynessState, TropicalError,
};
pub use parse::{ParseError, ParseErrorKind};
pub use recurrence::{
    bound_m, equivalent, normalize_max_first, normalize_to_c4, orbit, step_backward,
    step_forward, Direction, NormalizeError, OrbitSlice, Tuple4,
};
pub use scalar::{rational_ratio, Rational, Scalar, Sign, ZeroDivisor};
