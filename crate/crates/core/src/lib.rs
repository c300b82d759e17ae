//! Adaptive stochastic minimization under probing constraints.
//!
//! Elements carry independent discrete weights that are revealed only when
//! the element is probed (selected). A policy picks elements subject to a
//! knapsack, cardinality or matroid constraint and is scored by a
//! non-increasing objective of the selected set: the minimum weight, the sum
//! of the `k` smallest weights, or the weight of a minimum basis of an inner
//! matroid.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: distributions, instances, realizations, sampling, JSON I/O.
//! * [`matroid`]: independence oracles, contraction, rank, min-weight basis.
//! * [`objective`]: objective functions and their threshold ranks.
//! * [`policy`]: the probing executor, exact evaluation and Monte Carlo.
//! * [`solvers`]: threshold and rank solvers (density greedy, extended
//!   greedy, binning, matroid greedy, adaptive matroid greedy).
//! * [`metamin`]: adaptive binary search over power-of-two thresholds and
//!   the sum-of-`k` driver.
//! * [`oracle`]: brute-force optimal adaptive / non-adaptive values.
//! * [`verify`]: randomized verification suites built on the oracles.

pub mod error;
pub mod gen;
pub mod idset;
pub mod matroid;
pub mod metamin;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod policy;
pub mod rational;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use idset::IdSet;
pub use matroid::{Matroid, MatroidSpec};
pub use model::{ConstraintSpec, Element, Instance, ObjectiveSpec, Realization, WeightDistribution};
pub use objective::Objective;
pub use policy::{execute, Policy, RunReport};
pub use rational::Rational;
