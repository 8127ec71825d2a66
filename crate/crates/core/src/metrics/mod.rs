//! SRCC, PLCC and the logistic-mapped PLCC used to compare scores with MOS.

mod correlation;
pub mod logistic;
mod report;
pub mod simplex;

pub use correlation::{midranks, plcc, srcc, MIN_SAMPLES};
pub use logistic::{logistic_fit, LogisticFit, LogisticParams, MIN_FIT_SAMPLES};
pub use report::{evaluate, join, EvalOptions, EvalReport, Joined};
