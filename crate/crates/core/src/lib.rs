//! Simulation and analysis of two-mode click-counting statistics.
//!
//! A click-counting detector splits light over `N` on-off bins and reports how
//! many of them fired. This crate builds exact joint click distributions
//! `c(a, b)` for photon-number states seen through such detectors, samples
//! finite-shot count matrices from them, and evaluates three families of
//! nonclassicality tests on the result:
//!
//! * the conditional correlation coefficient `κ` against its classical maximum,
//! * Pearson's coefficient `γ` against the classical bound built from the
//!   binomial `Q` parameters of both arms,
//! * the higher-order conditional nonclassicality number `𝔑`, the smallest
//!   eigenvalue over all conditional matrices of normally ordered moments.
//!
//! None of the criteria need the detector efficiency, dark-click rate or
//! response function; those only enter the simulator.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the CLI and
//! parallel bootstrap live in `clickstat-cli`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod criteria;
pub mod eigen;
mod error;
mod math;
pub mod model;
pub mod sampling;
pub mod simulator;
pub mod stats;
pub mod uncertainty;

pub use criteria::{evaluate_all, evaluate_counts, CriteriaReport, Estimate, Statistic, Verdict};
pub use error::{Error, Result};
pub use model::{CountMatrix, DetectorConfig, JointClickDistribution, JointPhotonDistribution};
pub use simulator::StateSpec;
pub use uncertainty::{bootstrap, BootstrapConfig, BootstrapSummary};
