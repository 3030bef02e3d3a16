//! Numerical sufficient-condition checks for analytic functions on the unit
//! disk normalized by `f(0) = 0`, `f'(0) = 1`.
//!
//! The crate evaluates the criterion functionals for the classes `C(α)`,
//! `S*(α)` and `STS(μ)`, estimates their extrema over the disk, and checks
//! that every hypothesis which holds on the scanned region is followed by
//! the class membership it implies.

pub mod catalog;
pub mod cli;
pub mod criteria;
pub mod harness;
pub mod report;
pub mod scanner;
pub mod series;

pub use catalog::{AnalyticFunction, FunctionSpec, SchwarzFunction};
pub use criteria::{ClassId, Criterion, CriterionRegistry, CriterionSpec};
pub use harness::{ImplicationReport, JackResult, Verdict};
pub use num_complex::Complex64;
pub use scanner::{Mode, ScanConfig, SupEstimate};
pub use series::TaylorSeries;
