//! Solvers for the split common null point problem in R^n: find `x` with
//! `0 ∈ B_i(x)` for every `i` and `0 ∈ F_j(A_j x)` for every `j`, where the
//! `B_i`, `F_j` are maximal monotone and the `A_j` are linear.
//!
//! - [`linops`]: vectors, dense operators, `‖A*A‖` estimation.
//! - [`mappings`]: the mapping catalog and its resolvents.
//! - [`problems`]: instances, validation, the product-space lift, reductions.
//! - [`schemes`]: forward-backward, product-space, Halpern and Haugazeau runs.
//! - [`format`]: the TOML instance format and the CSV trace format.

pub mod format;
pub mod linops;
pub mod mappings;
pub mod problems;
pub mod schemes;

pub use linops::{GramNorm, LinearOp, LinopError, Vector};
pub use mappings::{
    fixed_point_residual, project_set, resolve, ConvexSet, MapKind, MappingError, MonotoneMap,
    Resolvent, ResolventParams,
};
pub use problems::{ScnppInstance, ValidationReport, Violation};
pub use schemes::{
    cauchy_tail, haugazeau_t, relax, run, AlphaSchedule, Algorithm, CauchyTail, Gamma, RunStatus,
    RunTrace, SolveError,
    SolverConfig, Stepper,
};
