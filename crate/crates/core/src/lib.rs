//! Sparse principal component analysis under a hard cardinality constraint:
//!
//! ```text
//! maximize xᵀAx  subject to  ‖x‖₂ ≤ 1, ‖x‖₀ ≤ s
//! ```
//!
//! The crate provides optimality verifiers (support optimality,
//! co-stationarity, coordinate-wise maximality), the greedy and partial
//! coordinate-wise solvers with their thresholding and conditional-gradient
//! baselines, exhaustive enumeration for small instances, and data loading.
//!
//! ```
//! use spca_core::{io, solvers};
//!
//! let a = io::pitprops().covariance().unwrap();
//! let r = solvers::pcw_solve(&a, &solvers::SolverConfig::new(4)).unwrap();
//! assert!(r.value > 2.5);
//! ```

pub mod conditions;
pub mod enumeration;
pub mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod solvers;
pub mod sparsity;

pub use error::{Result, SpcaError};
pub use exec::Execution;
pub use linalg::{Matrix, SymMatrix};
