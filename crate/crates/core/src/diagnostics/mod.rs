//! Rate measurement on traces, sampled regularity constants, and the
//! closed-form constants the convergence theory predicts.

mod bounds;
mod rates;
mod regularity;

pub use bounds::{predicted_bounds, PredictedBounds};
pub use rates::{analyze_errors, analyze_trace, error_floor, RateReport, MIN_USABLE_ERRORS};
pub use regularity::{estimate_regularity, sampled_normal, DistanceSource, RegularityEstimate};
