use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::{rational_sqrt, rational_to_f64, Q};
use crate::error::{Error, Result};

/// Field operation selector for [`SurdScalar::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurdOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exact element `a + b*s` of `Q(s)`, where `s = sqrt(ssq)` and `ssq` is the
/// radicand of the coupling point the value belongs to.
///
/// The radicand travels with every value so that elements of different
/// fields are never mixed silently; the `try_*` methods report a mismatch,
/// the operator impls panic on one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurdScalar {
    pub a: Q,
    pub b: Q,
    pub ssq: Q,
}

impl SurdScalar {
    pub fn new(a: Q, b: Q, ssq: Q) -> Self {
        SurdScalar { a, b, ssq }
    }

    pub fn rational(a: Q, ssq: Q) -> Self {
        SurdScalar::new(a, Q::zero(), ssq)
    }

    pub fn zero(ssq: Q) -> Self {
        SurdScalar::rational(Q::zero(), ssq)
    }

    pub fn one(ssq: Q) -> Self {
        SurdScalar::rational(Q::one(), ssq)
    }

    /// The generator `s` itself.
    pub fn s(ssq: Q) -> Self {
        SurdScalar::new(Q::zero(), Q::one(), ssq)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Collapses to a rational when `b = 0` or `ssq` is a perfect square.
    pub fn to_rational(&self) -> Option<Q> {
        if self.b.is_zero() {
            return Some(self.a.clone());
        }
        rational_sqrt(&self.ssq).map(|r| &self.a + &self.b * r)
    }

    /// Conjugate `a - b*s`.
    pub fn conj(&self) -> Self {
        SurdScalar::new(self.a.clone(), -self.b.clone(), self.ssq.clone())
    }

    /// Field norm `a^2 - b^2 ssq`.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * &self.ssq
    }

    pub fn scale(&self, k: &Q) -> Self {
        SurdScalar::new(&self.a * k, &self.b * k, self.ssq.clone())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ssq != other.ssq {
            return Err(Error::RadicandMismatch {
                left: self.ssq.to_string(),
                right: other.ssq.to_string(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(SurdScalar::new(&self.a + &other.a, &self.b + &other.b, self.ssq.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(SurdScalar::new(&self.a - &other.a, &self.b - &other.b, self.ssq.clone()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let a = &self.a * &other.a + &self.b * &other.b * &self.ssq;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(SurdScalar::new(a, b, self.ssq.clone()))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        if n.is_zero() {
            // Only possible when ssq is a perfect square and a = -/+ b sqrt(ssq).
            return Err(Error::NotInvertible(self.to_string()));
        }
        Ok(SurdScalar::new(&self.a / &n, -(&self.b / &n), self.ssq.clone()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.try_mul(&other.inverse()?)
    }

    pub fn combine(&self, other: &Self, op: SurdOp) -> Result<Self> {
        match op {
            SurdOp::Add => self.try_add(other),
            SurdOp::Sub => self.try_sub(other),
            SurdOp::Mul => self.try_mul(other),
            SurdOp::Div => self.try_div(other),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = SurdScalar::one(self.ssq.clone());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Sign of the real number `a + b sqrt(ssq)` (requires `ssq >= 0`).
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        if sa == 0 {
            return sb;
        }
        // Opposite signs: compare a^2 with b^2 ssq.
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * &self.ssq;
        if a2 > b2 {
            sa
        } else if a2 < b2 {
            sb
        } else {
            0
        }
    }

    /// Double-precision value. When `a` and `b*s` nearly cancel, the value is
    /// computed as `norm / (a - b s)` to avoid catastrophic cancellation.
    pub fn to_f64(&self) -> f64 {
        let a = rational_to_f64(&self.a);
        if self.b.is_zero() {
            return a;
        }
        if let Some(r) = rational_sqrt(&self.ssq) {
            return rational_to_f64(&(&self.a + &self.b * r));
        }
        let bs = rational_to_f64(&self.b) * rational_to_f64(&self.ssq).sqrt();
        if a.signum() == bs.signum() || a == 0.0 {
            a + bs
        } else {
            rational_to_f64(&self.norm()) / (a - bs)
        }
    }
}

fn sign(q: &Q) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for SurdScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})*s", self.b),
            (false, false) => write!(f, "{} + ({})*s", self.a, self.b),
        }
    }
}

impl<'a> Add<&'a SurdScalar> for &'a SurdScalar {
    type Output = SurdScalar;
    fn add(self, rhs: &SurdScalar) -> SurdScalar {
        self.try_add(rhs).expect("surd radicand mismatch")
    }
}

impl<'a> Sub<&'a SurdScalar> for &'a SurdScalar {
    type Output = SurdScalar;
    fn sub(self, rhs: &SurdScalar) -> SurdScalar {
        self.try_sub(rhs).expect("surd radicand mismatch")
    }
}

impl<'a> Mul<&'a SurdScalar> for &'a SurdScalar {
    type Output = SurdScalar;
    fn mul(self, rhs: &SurdScalar) -> SurdScalar {
        self.try_mul(rhs).expect("surd radicand mismatch")
    }
}

impl Add for SurdScalar {
    type Output = SurdScalar;
    fn add(self, rhs: SurdScalar) -> SurdScalar {
        &self + &rhs
    }
}

impl Sub for SurdScalar {
    type Output = SurdScalar;
    fn sub(self, rhs: SurdScalar) -> SurdScalar {
        &self - &rhs
    }
}

impl Mul for SurdScalar {
    type Output = SurdScalar;
    fn mul(self, rhs: SurdScalar) -> SurdScalar {
        &self * &rhs
    }
}

impl Neg for SurdScalar {
    type Output = SurdScalar;
    fn neg(self) -> SurdScalar {
        SurdScalar::new(-self.a, -self.b, self.ssq)
    }
}

#[derive(Serialize)]
struct SurdJson {
    a: String,
    b: String,
    ssq: String,
    decimal: f64,
}

impl Serialize for SurdScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SurdJson {
            a: self.a.to_string(),
            b: self.b.to_string(),
            ssq: self.ssq.to_string(),
            decimal: self.to_f64(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn surd(a: (i64, i64), b: (i64, i64), ssq: i64) -> SurdScalar {
        SurdScalar::new(q(a.0, a.1), q(b.0, b.1), q(ssq, 1))
    }

    #[test]
    fn generator_squares_to_radicand() {
        let s = SurdScalar::s(q(9, 1));
        let one = SurdScalar::one(q(9, 1));
        assert_eq!(&one * &s, s);
        assert_eq!(&s * &s, SurdScalar::rational(q(9, 1), q(9, 1)));
    }

    #[test]
    fn m2_at_unit_point() {
        let m2 = surd((-1, 32), (1, 32), 9);
        assert_eq!(m2.to_rational(), Some(q(1, 16)));
        assert_eq!(m2.to_f64(), 0.0625);
    }

    #[test]
    fn mismatched_radicands_are_rejected() {
        let x = SurdScalar::s(q(2, 1));
        let y = SurdScalar::s(q(3, 1));
        assert!(matches!(x.try_add(&y), Err(Error::RadicandMismatch { .. })));
        assert!(matches!(x.combine(&y, SurdOp::Mul), Err(Error::RadicandMismatch { .. })));
    }

    #[test]
    fn division_errors() {
        let zero = SurdScalar::zero(q(2, 1));
        let one = SurdScalar::one(q(2, 1));
        assert_eq!(one.try_div(&zero), Err(Error::DivisionByZero));
        // 3 - s is zero as a real number when ssq = 9, but nonzero componentwise.
        let degenerate = surd((3, 1), (-1, 1), 9);
        assert!(matches!(degenerate.inverse(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn signum_handles_cancellation() {
        assert_eq!(surd((-1, 1), (1, 1), 2).signum(), 1);
        assert_eq!(surd((2, 1), (-1, 1), 2).signum(), 1);
        assert_eq!(surd((1, 1), (-1, 1), 2).signum(), -1);
        assert_eq!(surd((3, 1), (-1, 1), 9).signum(), 0);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(surd((-1, 32), (1, 32), 9)).unwrap();
        assert_eq!(v["a"], "-1/32");
        assert_eq!(v["b"], "1/32");
        assert_eq!(v["ssq"], "9");
        assert_eq!(v["decimal"], 0.0625);
    }

    /// High-precision reference: floor(x * 10^30) via integer square roots.
    fn reference(x: &SurdScalar) -> f64 {
        let scale = num_traits::pow(BigInt::from(10), 30);
        let scaled = &x.ssq * Q::from_integer(&scale * &scale);
        let root = (scaled.numer() * scaled.denom()).sqrt();
        let s_scaled = Q::new(root, scaled.denom().clone());
        let v = &x.a * Q::from_integer(scale.clone()) + &x.b * s_scaled;
        rational_to_f64(&v) / 1e30
    }

    fn small_q() -> impl Strategy<Value = Q> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| q(n, d))
    }

    fn nonzero_q() -> impl Strategy<Value = Q> {
        small_q().prop_filter("nonzero", |x| !x.is_zero())
    }

    fn elem(ssq: Q) -> impl Strategy<Value = SurdScalar> {
        (small_q(), small_q()).prop_map(move |(a, b)| SurdScalar::new(a, b, ssq.clone()))
    }

    proptest! {
        #[test]
        fn field_axioms(x in elem(q(7, 3)), y in elem(q(7, 3)), z in elem(q(7, 3))) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &y, &y + &x);
            if !x.is_zero() {
                let inv = x.inverse().unwrap();
                prop_assert_eq!(&x * &inv, SurdScalar::one(q(7, 3)));
            }
        }

        #[test]
        fn float_bridge_is_accurate(t2 in nonzero_q(), t4 in nonzero_q(), a in small_q(), b in nonzero_q()) {
            let t2 = t2.abs();
            let t4 = t4.abs();
            let ssq = &t2 * &t2 + Q::from_integer(8.into()) * &t4;
            let x = SurdScalar::new(a, b, ssq);
            let exact = reference(&x);
            let approx = x.to_f64();
            prop_assert!((approx - exact).abs() <= 1e-12 * exact.abs().max(1e-300),
                "{} vs {}", approx, exact);
        }
    }
}
