use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::{rational_sqrt, Q};
use crate::error::{Error, Result};

/// Dense truncated power series `c_0 + c_1 x + ... + c_K x^K` over the
/// rationals. Every product or quotient truncates to the smaller order of
/// its operands; asking for a coefficient past `K` is an error, never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Q>,
}

impl PowerSeries {
    /// Builds a series of truncation order `order`, zero-filling or cutting
    /// the supplied coefficients.
    pub fn new(mut coeffs: Vec<Q>, order: usize) -> Self {
        coeffs.resize(order + 1, Q::zero());
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries::new(Vec::new(), order)
    }

    pub fn constant(c: Q, order: usize) -> Self {
        PowerSeries::new(vec![c], order)
    }

    /// The variable `x` itself.
    pub fn var(order: usize) -> Self {
        PowerSeries::new(vec![Q::zero(), Q::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Result<&Q> {
        self.coeffs
            .get(k)
            .ok_or(Error::BeyondTruncation { requested: k, order: self.order() })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::BeyondTruncation { requested: order, order: self.order() });
        }
        Ok(PowerSeries { coeffs: self.coeffs[..=order].to_vec() })
    }

    pub fn scale(&self, k: &Q) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        PowerSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        PowerSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect() }
    }

    pub fn neg(&self) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![Q::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        PowerSeries { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = PowerSeries::constant(Q::one(), self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::SeriesNotInvertible);
        }
        let n = self.order();
        let inv0 = c0.recip();
        let mut out: Vec<Q> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Q::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &out[k - j];
            }
            out.push(-(acc * &inv0));
        }
        Ok(PowerSeries { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Square root with the positive rational root of the constant term,
    /// via `2 g_0 g_k = f_k - sum_{j=1}^{k-1} g_j g_{k-j}`.
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if !c0.is_positive() {
            return Err(Error::NotARationalSquare(c0.to_string()));
        }
        let g0 = rational_sqrt(c0).ok_or_else(|| Error::NotARationalSquare(c0.to_string()))?;
        let two_g0 = &g0 + &g0;
        let mut g: Vec<Q> = vec![g0];
        for k in 1..=self.order() {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc -= &g[j] * &g[k - j];
            }
            g.push(acc / &two_g0);
        }
        Ok(PowerSeries { coeffs: g })
    }

    /// Divides by `x^k`; the first `k` coefficients must vanish. The result
    /// loses `k` orders of precision.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(Error::BeyondTruncation { requested: k, order: self.order() });
        }
        if let Some((p, c)) = self.coeffs[..k].iter().enumerate().find(|(_, c)| !c.is_zero()) {
            return Err(Error::PoleAtOrigin { power: p, value: c.to_string() });
        }
        Ok(PowerSeries { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && !(first && k == self.order()) {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag} t4")?,
                _ => write!(f, "{mag} t4^{k}")?,
            }
            first = false;
        }
        write!(f, " + O(t4^{})", self.order() + 1)
    }
}

/// A [`PowerSeries`] in `t4` at a fixed rational base point `t2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MomentSeries {
    pub t2: Q,
    pub series: PowerSeries,
}

impl MomentSeries {
    pub fn new(t2: Q, coeffs: Vec<Q>, order: usize) -> Self {
        MomentSeries { t2, series: PowerSeries::new(coeffs, order) }
    }

    pub fn from_series(t2: Q, series: PowerSeries) -> Self {
        MomentSeries { t2, series }
    }

    pub fn zero(t2: Q, order: usize) -> Self {
        MomentSeries::from_series(t2, PowerSeries::zero(order))
    }

    pub fn constant(t2: Q, c: Q, order: usize) -> Self {
        MomentSeries::from_series(t2, PowerSeries::constant(c, order))
    }

    /// The series `t2^2 + 8 t4`.
    pub fn radicand(t2: Q, order: usize) -> Self {
        let c0 = &t2 * &t2;
        MomentSeries::new(t2, vec![c0, Q::from_integer(8.into())], order)
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeffs(&self) -> &[Q] {
        self.series.coeffs()
    }

    pub fn coeff(&self, k: usize) -> Result<&Q> {
        self.series.coeff(k)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.t2 != other.t2 {
            return Err(Error::BasePointMismatch {
                left: self.t2.to_string(),
                right: other.t2.to_string(),
            });
        }
        Ok(())
    }

    fn wrap(&self, series: PowerSeries) -> Self {
        MomentSeries { t2: self.t2.clone(), series }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(self.series.add(&other.series)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(self.series.sub(&other.series)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(self.series.mul(&other.series)))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(self.series.div(&other.series)?))
    }

    pub fn scale(&self, k: &Q) -> Self {
        self.wrap(self.series.scale(k))
    }

    pub fn sqrt(&self) -> Result<Self> {
        Ok(self.wrap(self.series.sqrt()?))
    }

    pub fn shift_down(&self, k: usize) -> Result<Self> {
        Ok(self.wrap(self.series.shift_down(k)?))
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        Ok(self.wrap(self.series.truncate(order)?))
    }

    pub fn eval(&self, t4: &Q) -> Q {
        self.series.eval(t4)
    }
}

/// `series_sqrt` under its conventional name.
pub fn series_sqrt(f: &MomentSeries) -> Result<MomentSeries> {
    f.sqrt()
}

impl fmt::Display for MomentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.series)
    }
}

#[derive(Serialize)]
struct SeriesJson {
    t2: String,
    coeffs: Vec<String>,
}

impl Serialize for MomentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            t2: self.t2.to_string(),
            coeffs: self.coeffs().iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}
