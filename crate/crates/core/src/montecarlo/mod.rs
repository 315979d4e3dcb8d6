//! Finite-N Metropolis sampling of the full Dirac ensembles.
//!
//! Both matrices are full Hermitian matrices, except that a component
//! entering through a commutator is kept traceless: its trace does not
//! appear in the action, so that direction is flat and not normalizable.

mod action;
mod ks;
mod matrix;
mod sampler;

pub use action::{action_eval, action_from_traces, dirac_matrix, dirac_trace_power, dirac_traces, traces, Cache, Traces, HERMITICITY_TOL};
pub use ks::{ks_distance, MarginalCdf};
pub use matrix::Matrix;
pub use num_complex::Complex64;
pub use sampler::{
    batch_means, estimate_dirac, estimate_moment, run_chain, ChainOutput, EstimateWithError, Observable,
    SampleStream, SamplerConfig, TraceRow, ACCEPTANCE_WINDOW, BATCHES_PER_CHAIN, MIN_BATCHES, TARGET_ACCEPTANCE,
};
