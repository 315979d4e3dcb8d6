use num_traits::{Signed, Zero};
use serde::Serialize;

use super::rational::{parse_rational, rational_to_f64, Q};
use crate::error::{Error, Result};

/// Couplings `(t2, t4)` of the quartic potential `t2 tr D^2 + t4 tr D^4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CouplingPoint {
    pub t2: Q,
    pub t4: Q,
}

impl CouplingPoint {
    pub fn new(t2: Q, t4: Q) -> Self {
        CouplingPoint { t2, t4 }
    }

    pub fn from_ints(t2: i64, t4: i64) -> Self {
        CouplingPoint::new(Q::from_integer(t2.into()), Q::from_integer(t4.into()))
    }

    pub fn parse(t2: &str, t4: &str) -> Result<Self> {
        Ok(CouplingPoint::new(parse_rational(t2)?, parse_rational(t4)?))
    }

    /// The radicand `t2^2 + 8 t4`.
    pub fn radicand(&self) -> Q {
        &self.t2 * &self.t2 + Q::from_integer(8.into()) * &self.t4
    }

    /// Requires `t2^2 + 8 t4 >= 0` so that `s` is real.
    pub fn require_real_surd(&self) -> Result<()> {
        if self.radicand().is_negative() {
            return Err(Error::Domain(format!(
                "t2^2 + 8 t4 = {} < 0; the square root is not real",
                self.radicand()
            )));
        }
        Ok(())
    }

    /// Requires `t2 > 0` and `t4 > 0`.
    pub fn require_physical(&self) -> Result<()> {
        if !self.t2.is_positive() {
            return Err(Error::Domain(format!("t2 = {} must be > 0", self.t2)));
        }
        if !self.t4.is_positive() {
            return Err(Error::Domain(format!("t4 = {} must be > 0", self.t4)));
        }
        Ok(())
    }

    pub fn is_gaussian(&self) -> bool {
        self.t4.is_zero()
    }

    pub fn t2_f64(&self) -> f64 {
        rational_to_f64(&self.t2)
    }

    pub fn t4_f64(&self) -> f64 {
        rational_to_f64(&self.t4)
    }
}

impl std::fmt::Display for CouplingPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(t2 = {}, t4 = {})", self.t2, self.t4)
    }
}

#[derive(Serialize)]
struct CouplingJson {
    t2: String,
    t4: String,
}

impl Serialize for CouplingPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CouplingJson { t2: self.t2.to_string(), t4: self.t4.to_string() }.serialize(s)
    }
}
