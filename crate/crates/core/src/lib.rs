//! Statistical evaluation of the separation (equalized odds) fairness
//! criterion on pointwise test data, and of comparative separation on
//! pairwise comparative-judgment test data.
//!
//! The pieces:
//!
//! * [`data`] / [`io`] — domain types plus the CSV and distribution-file
//!   formats;
//! * [`pointwise`] — group-conditional TPR/FPR, EOD/AOD;
//! * [`pairwise`] — pair construction and the pooled comparative TPR per
//!   group-pair bucket;
//! * [`stats`] — two-proportion z-tests and the composed verdicts;
//! * [`power`] — analytic Type II error, power, and pair-budget matching;
//! * [`sim`] — seeded Monte Carlo studies of detection frequency and
//!   estimator moments;
//! * [`weights`] — Reweighing/FairBalance preprocessing weights.
//!
//! All computation is in `f64`; estimators and tests are pure functions
//! over immutable inputs and safe to call from multiple threads.

#![forbid(unsafe_code)]

pub mod data;
pub mod error;
pub mod io;
pub mod normal;
pub mod pairwise;
pub mod pointwise;
pub mod power;
pub mod sim;
pub mod stats;
pub mod weights;

pub use data::{
    Group, GroupPair, JointDistribution, JudgedPair, LabeledPoint, Mode, PairLabel, PairPrediction,
    PairSet, PointSet,
};
pub use error::{Error, Result};
