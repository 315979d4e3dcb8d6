//! Exact arithmetic substrates: rationals, the quadratic surd field `Q(s)`
//! with `s^2 = t2^2 + 8 t4`, and truncated power series in `t4`.

mod coupling;
mod rational;
mod series;
mod surd;

pub use coupling::CouplingPoint;
pub use rational::{parse_rational, rational_sqrt, rational_to_f64, Q};
pub use series::{series_sqrt, MomentSeries, PowerSeries};
pub use surd::{SurdOp, SurdScalar};
