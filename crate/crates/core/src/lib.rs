//! Large-N analysis of quartic two-matrix Dirac ensembles.
//!
//! The crate generates and solves the planar loop equations of the
//! effective model, evaluates the published closed forms exactly in the
//! quadratic field `Q(sqrt(t2^2 + 8 t4))`, enumerates the colored gluings
//! behind the perturbative expansion, and samples the finite-N ensembles
//! of signatures (2,0), (1,1) and (0,2) by Metropolis Monte Carlo.

pub mod algebra;
pub mod closedform;
pub mod error;
pub mod mapenum;
pub mod montecarlo;
pub mod sde;
pub mod solver;
pub mod words;

pub use algebra::{CouplingPoint, MomentSeries, PowerSeries, SurdScalar, Q};
pub use closedform::Signature;
pub use error::{Error, Result};
pub use mapenum::{TwoCell, UnstableMap};
pub use sde::SdeEquation;
pub use solver::MomentTable;
pub use words::{canonicalize, CanonicalMoment, Letter, Word};
