//! Published closed forms for the large-N moments, Dirac moments and free
//! energy, evaluated exactly in `Q(s)`, `s = sqrt(t2^2 + 8 t4)`.
//!
//! Every moment is a polynomial in `t2`, `t4`, `s` over `c t4^p`. The table
//! is data, so a deliberately corrupted copy can be built for regression
//! tests of the verifier.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{rational_sqrt, rational_to_f64, CouplingPoint, MomentSeries, PowerSeries, SurdScalar, Q};
use crate::error::{Error, Result};
use crate::words::{vanishes_by_parity, CanonicalMoment};

/// KO-signature of the fuzzy geometry; fixes the signs in the full action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Signature {
    #[serde(rename = "(2,0)")]
    S20,
    #[serde(rename = "(1,1)")]
    S11,
    #[serde(rename = "(0,2)")]
    S02,
}

impl Signature {
    pub const ALL: [Signature; 3] = [Signature::S20, Signature::S11, Signature::S02];

    /// `(eps1, eps2)`: `+1` for an anticommutator, `-1` for a commutator.
    pub fn eps(self) -> (i32, i32) {
        match self {
            Signature::S20 => (1, 1),
            Signature::S11 => (1, -1),
            Signature::S02 => (-1, -1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Signature::S20 => "(2,0)",
            Signature::S11 => "(1,1)",
            Signature::S02 => "(0,2)",
        }
    }

    /// Accepts `(2,0)`, `2,0` or `20`.
    pub fn parse(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| c.is_ascii_digit()).collect();
        match t.as_str() {
            "20" => Ok(Signature::S20),
            "11" => Ok(Signature::S11),
            "02" => Ok(Signature::S02),
            _ => Err(Error::Domain(format!("unknown signature {text:?}; expected (2,0), (1,1) or (0,2)"))),
        }
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// `coef * t2^t2_pow * t4^t4_pow * s^s_pow`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coef: i64,
    pub t2_pow: u32,
    pub t4_pow: u32,
    pub s_pow: u32,
}

const fn mono(coef: i64, t2_pow: u32, t4_pow: u32, s_pow: u32) -> Monomial {
    Monomial { coef, t2_pow, t4_pow, s_pow }
}

/// `(sum of monomials) / (denominator * t4^t4_denominator)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub numerator: Vec<Monomial>,
    pub denominator: i64,
    pub t4_denominator: u32,
}

impl ClosedForm {
    fn new(numerator: &[Monomial], denominator: i64, t4_denominator: u32) -> Self {
        ClosedForm { numerator: numerator.to_vec(), denominator, t4_denominator }
    }

    fn zero() -> Self {
        ClosedForm::new(&[], 1, 0)
    }

    /// Exact value; requires `t4 != 0` whenever the form divides by `t4`.
    pub fn eval(&self, p: &CouplingPoint) -> Result<SurdScalar> {
        p.require_real_surd()?;
        let ssq = p.radicand();
        if self.t4_denominator > 0 && p.t4.is_zero() {
            return Err(Error::Domain("closed form divides by t4 = 0".into()));
        }
        let mut acc = SurdScalar::zero(ssq.clone());
        let s = SurdScalar::s(ssq.clone());
        for m in &self.numerator {
            let c = Q::from_integer(m.coef.into())
                * num_traits::pow(p.t2.clone(), m.t2_pow as usize)
                * num_traits::pow(p.t4.clone(), m.t4_pow as usize);
            acc = &acc + &s.pow(m.s_pow).scale(&c);
        }
        let den = Q::from_integer(self.denominator.into())
            * num_traits::pow(p.t4.clone(), self.t4_denominator as usize);
        Ok(acc.scale(&den.recip()))
    }

    /// Floating-point evaluation at real couplings.
    pub fn eval_f64(&self, t2: f64, t4: f64) -> f64 {
        let s = (t2 * t2 + 8.0 * t4).sqrt();
        let num: f64 = self
            .numerator
            .iter()
            .map(|m| m.coef as f64 * t2.powi(m.t2_pow as i32) * t4.powi(m.t4_pow as i32) * s.powi(m.s_pow as i32))
            .sum();
        num / (self.denominator as f64 * t4.powi(self.t4_denominator as i32))
    }

    /// Taylor series in `t4` at base point `t2`, to order `order`. Fails with
    /// [`Error::PoleAtOrigin`] if the numerator does not vanish to the order
    /// of the `t4` denominator.
    pub fn taylor(&self, t2: &Q, order: usize) -> Result<MomentSeries> {
        if !t2.is_positive() {
            return Err(Error::Domain(format!("t2 = {t2} must be > 0 for Taylor expansion")));
        }
        let p = self.t4_denominator as usize;
        let n = order + p;
        let s = MomentSeries::radicand(t2.clone(), n).sqrt()?.series;
        let t4 = PowerSeries::var(n);
        let mut num = PowerSeries::zero(n);
        for m in &self.numerator {
            let c = Q::from_integer(m.coef.into()) * num_traits::pow(t2.clone(), m.t2_pow as usize);
            num = num.add(&t4.pow(m.t4_pow).mul(&s.pow(m.s_pow)).scale(&c));
        }
        let shifted = num.shift_down(p)?;
        let scaled = shifted.scale(&Q::from_integer(self.denominator.into()).recip());
        Ok(MomentSeries::from_series(t2.clone(), scaled))
    }
}

const DEG6: [Monomial; 4] = [mono(1, 3, 0, 0), mono(-2, 0, 1, 1), mono(-1, 2, 0, 1), mono(6, 1, 1, 0)];

fn scaled(ms: &[Monomial], k: i64) -> Vec<Monomial> {
    ms.iter().map(|m| Monomial { coef: m.coef * k, ..*m }).collect()
}

/// Degree-8 numerator `a t2^4 + b t2 t4 s + c t2^2 t4 + d t2^3 s + e t4^2`.
fn deg8(a: i64, b: i64, c: i64, d: i64, e: i64) -> ClosedForm {
    ClosedForm::new(
        &[mono(a, 4, 0, 0), mono(b, 1, 1, 1), mono(c, 2, 1, 0), mono(d, 3, 0, 1), mono(e, 0, 2, 0)],
        524_288,
        4,
    )
}

/// The twenty tabulated moments through degree 8.
#[derive(Clone, Debug)]
pub struct ClosedFormTable {
    entries: Vec<(CanonicalMoment, ClosedForm)>,
}

impl ClosedFormTable {
    pub fn standard() -> Self {
        let c = |r: &[u32]| CanonicalMoment::from_runs(r);
        let deg4 = [mono(-1, 1, 0, 1), mono(1, 2, 0, 0), mono(4, 0, 1, 0)];
        let entries = vec![
            (c(&[2]), ClosedForm::new(&[mono(1, 0, 0, 1), mono(-1, 1, 0, 0)], 32, 1)),
            (c(&[4]), ClosedForm::new(&deg4, 256, 2)),
            (c(&[2, 2]), ClosedForm::new(&deg4, 512, 2)),
            (c(&[1, 1, 1, 1]), ClosedForm::zero()),
            (c(&[6]), ClosedForm::new(&scaled(&DEG6, -19), 32_768, 3)),
            (c(&[4, 2]), ClosedForm::new(&scaled(&DEG6, -1), 32_768, 3)),
            (c(&[2, 1, 2, 1]), ClosedForm::new(&scaled(&DEG6, -3), 32_768, 3)),
            (c(&[3, 1, 1, 1]), ClosedForm::new(&scaled(&DEG6, -7), 32_768, 3)),
            (c(&[8]), deg8(11, -48, 92, -11, 104)),
            (c(&[4, 1, 2, 1]), deg8(5, -24, 44, -5, 56)),
            (c(&[6, 2]), deg8(15, -64, 124, -15, 136)),
            (c(&[2, 1, 1, 2, 1, 1]), deg8(3, -16, 28, -3, 40)),
            (c(&[3, 1, 3, 1]), deg8(3, -8, 20, -3, 8)),
            (c(&[3, 3, 1, 1]), deg8(3, -8, 20, -3, 8)),
            (c(&[5, 1, 1, 1]), deg8(3, -8, 20, -3, 8)),
            (c(&[1, 1, 1, 1, 1, 1, 1, 1]), deg8(3, -8, 20, -3, 8)),
            (c(&[2, 2, 2, 2]), deg8(9, -40, 76, -9, 88)),
            (c(&[4, 4]), deg8(11, -48, 92, -11, 104)),
            (
                c(&[2, 2, 1, 1, 1, 1]),
                ClosedForm::new(&[mono(1, 4, 0, 0), mono(4, 2, 1, 0), mono(-1, 3, 0, 1), mono(-8, 0, 2, 0)], 524_288, 4),
            ),
            (c(&[3, 2, 1, 2]), deg8(5, -24, 44, -5, 56)),
        ];
        ClosedFormTable { entries }
    }

    /// Copy of the table with one entry's constant denominator replaced.
    pub fn with_denominator(mut self, moment: &CanonicalMoment, denominator: i64) -> Self {
        for (m, f) in &mut self.entries {
            if m == moment {
                f.denominator = denominator;
            }
        }
        self
    }

    pub fn entries(&self) -> &[(CanonicalMoment, ClosedForm)] {
        &self.entries
    }

    pub fn get(&self, c: &CanonicalMoment) -> Option<&ClosedForm> {
        self.entries.iter().find(|(m, _)| m == c).map(|(_, f)| f)
    }

    /// Exact moment value; parity-vanishing classes are 0, the empty class 1.
    pub fn moment(&self, c: &CanonicalMoment, p: &CouplingPoint) -> Result<SurdScalar> {
        require_positive_t4(p)?;
        p.require_real_surd()?;
        let ssq = p.radicand();
        if c.is_empty() {
            return Ok(SurdScalar::one(ssq));
        }
        if vanishes_by_parity(c) {
            return Ok(SurdScalar::zero(ssq));
        }
        self.get(c).ok_or_else(|| Error::UnknownMoment(c.clone()))?.eval(p)
    }
}

fn require_positive_t4(p: &CouplingPoint) -> Result<()> {
    if !p.t4.is_positive() {
        return Err(Error::Domain(format!("t4 = {} must be > 0", p.t4)));
    }
    Ok(())
}

/// Closed-form moment from the standard table.
pub fn moment(c: &CanonicalMoment, p: &CouplingPoint) -> Result<SurdScalar> {
    ClosedFormTable::standard().moment(c, p)
}

/// Closed form of the Dirac moment `d_ell`, `ell` in `{2, 4, 6}`.
pub fn dirac_closed_form(ell: u32) -> Result<ClosedForm> {
    match ell {
        2 => Ok(ClosedForm::new(&[mono(1, 0, 0, 1), mono(-1, 1, 0, 0)], 4, 1)),
        4 => Ok(ClosedForm::new(&[mono(1, 2, 0, 0), mono(-1, 1, 0, 1), mono(4, 0, 1, 0)], 8, 2)),
        6 => Ok(ClosedForm::new(
            &[mono(-19, 3, 0, 0), mono(19, 2, 0, 1), mono(-114, 1, 1, 0), mono(38, 0, 1, 1)],
            256,
            3,
        )),
        _ => Err(Error::UnknownDiracMoment(ell)),
    }
}

pub fn dirac_moment(ell: u32, p: &CouplingPoint) -> Result<SurdScalar> {
    let form = dirac_closed_form(ell)?;
    require_positive_t4(p)?;
    form.eval(p)
}

/// `d_2 = 8 m_2` and `d_4 = 8 m_4 + 16 m_{2,2} - 8 m_{1,1,1,1} + 32 m_2^2`, from
/// expanding `tr D^l` in traces of `A`, `B` and factorizing the bi-tracial
/// terms. Generic over any commutative coefficient ring supplied by `lookup`.
pub fn dirac_from_moments<T, F, M, S>(ell: u32, lookup: F, mul: M, scale_sum: S) -> Result<T>
where
    F: Fn(&CanonicalMoment) -> Result<T>,
    M: Fn(&T, &T) -> T,
    S: Fn(&[(i64, T)]) -> T,
{
    let c = |r: &[u32]| CanonicalMoment::from_runs(r);
    match ell {
        2 => Ok(scale_sum(&[(8, lookup(&c(&[2]))?)])),
        4 => {
            let m2 = lookup(&c(&[2]))?;
            Ok(scale_sum(&[
                (8, lookup(&c(&[4]))?),
                (16, lookup(&c(&[2, 2]))?),
                (-8, lookup(&c(&[1, 1, 1, 1]))?),
                (32, mul(&m2, &m2)),
            ]))
        }
        _ => Err(Error::NoWordExpansion(ell)),
    }
}

/// Dirac moment assembled from the closed-form word moments.
pub fn dirac_from_words(ell: u32, p: &CouplingPoint) -> Result<SurdScalar> {
    let table = ClosedFormTable::standard();
    let ssq = p.radicand();
    dirac_from_moments(
        ell,
        |c| table.moment(c, p),
        |a, b| a * b,
        |terms| {
            terms.iter().fold(SurdScalar::zero(ssq.clone()), |acc, (k, v)| {
                &acc + &v.scale(&Q::from_integer((*k).into()))
            })
        },
    )
}

/// Gaussian free energy `-5 ln 2 + 2 ln(pi) - 2 ln t2`.
pub fn gaussian_free_energy(t2: &Q) -> Result<f64> {
    if !t2.is_positive() {
        return Err(Error::Domain(format!("t2 = {t2} must be > 0")));
    }
    Ok(-5.0 * 2f64.ln() + 2.0 * PI.ln() - 2.0 * rational_to_f64(t2).ln())
}

/// The published genus-zero free energy
/// `-1/2 + t2/(t2 + s) + ln[pi^2 (t2 + s) / (64 t2^2)]`.
///
/// For `t4 < 0` (down to the critical point) this is the analytic
/// continuation and requires `allow_negative_t4`.
pub fn free_energy(p: &CouplingPoint, allow_negative_t4: bool) -> Result<f64> {
    free_energy_f64(rational_to_f64(&p.t2), rational_to_f64(&p.t4), allow_negative_t4)
}

pub fn free_energy_f64(t2: f64, t4: f64, allow_negative_t4: bool) -> Result<f64> {
    if t2 <= 0.0 {
        return Err(Error::Domain(format!("t2 = {t2} must be > 0")));
    }
    if t4 < 0.0 && !allow_negative_t4 {
        return Err(Error::Domain(format!("t4 = {t4} < 0 needs the analytic-continuation flag")));
    }
    let rad = t2 * t2 + 8.0 * t4;
    if rad < 0.0 {
        return Err(Error::Domain(format!("t4 = {t4} lies beyond the critical point")));
    }
    let s = rad.sqrt();
    let arg = PI * PI * (t2 + s) / (64.0 * t2 * t2);
    if arg <= 0.0 {
        return Err(Error::Domain("logarithm argument is not positive".into()));
    }
    Ok(-0.5 + t2 / (t2 + s) + arg.ln())
}

/// `F0(t2, t4) = F_gauss(t2) - int_0^t4 d_4(t2, u) du`, the integrated form of
/// `dF0/dt4 = -d_4`, by composite Gauss-Legendre quadrature on `d_4`.
pub fn free_energy_integrated(p: &CouplingPoint) -> Result<f64> {
    let base = gaussian_free_energy(&p.t2)?;
    let t2 = rational_to_f64(&p.t2);
    let t4 = rational_to_f64(&p.t4);
    if t2 * t2 + 8.0 * t4 < 0.0 {
        return Err(Error::Domain("t4 lies beyond the critical point".into()));
    }
    // d_4 = 4 / (t2 + s)^2 is the cancellation-free form of the closed form.
    let d4 = |u: f64| 4.0 / (t2 + (t2 * t2 + 8.0 * u).sqrt()).powi(2);
    Ok(base - gauss_legendre(d4, 0.0, t4, 64))
}

fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            X.iter().zip(W.iter()).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Critical coupling `t_c = -t2^2 / 8`.
pub fn critical_point(t2: &Q) -> Q {
    -(t2 * t2) / Q::from_integer(8.into())
}

#[derive(Clone, Debug, Serialize)]
pub struct SusceptibilityTerm {
    /// Power of `(t4 - t_c)`, a half-integer stored as `numerator / 2`.
    pub exponent_twice: u32,
    /// Exact coefficient in `Q(sqrt 2)`.
    pub coefficient: SurdScalar,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SusceptibilityExpansion {
    pub t2: String,
    pub critical_point: String,
    pub terms: Vec<SusceptibilityTerm>,
    /// String susceptibility exponent from the leading half-integer power
    /// `(t4 - t_c)^(1 - gamma)`.
    pub gamma: String,
}

/// Expansion of `d_4(t2, t4) / d_4(t2, t_c)` in powers of `(t4 - t_c)^(1/2)`.
///
/// Writes `t4 = (s^2 - t2^2)/8`, so that `d_4` becomes a ratio of
/// polynomials in `s`, expands it by series division, and substitutes
/// `s = 2 sqrt(2) (t4 - t_c)^(1/2)`.
pub fn susceptibility_expansion(t2: &Q, num_terms: usize) -> Result<SusceptibilityExpansion> {
    if num_terms < 2 {
        return Err(Error::Domain("at least two terms are required".into()));
    }
    if !t2.is_positive() {
        return Err(Error::Domain(format!("t2 = {t2} must be > 0")));
    }
    let n = num_terms - 1;
    let s = PowerSeries::var(n);
    let t2c = PowerSeries::constant(t2.clone(), n);
    let half = Q::new(1.into(), 2.into());
    let eighth = Q::new(1.into(), 8.into());
    // d_4 = [(s - t2)^2 / 2] / [(s^2 - t2^2)^2 / 8]
    let numer = s.sub(&t2c).pow(2).scale(&half);
    let denom = s.pow(2).sub(&t2c.pow(2)).pow(2).scale(&eighth);
    let d4 = numer.div(&denom)?;
    let ratio = d4.scale(&d4.coeff(0)?.recip());

    let two = Q::from_integer(2.into());
    let mut terms = Vec::with_capacity(num_terms);
    let mut gamma = None;
    for k in 0..=n {
        // (2 sqrt 2)^k = 2^k * 2^(k/2)
        let c = ratio.coeff(k)?.clone() * num_traits::pow(two.clone(), k + k / 2);
        let coefficient = if k % 2 == 0 {
            SurdScalar::rational(c, two.clone())
        } else {
            SurdScalar::new(Q::zero(), c, two.clone())
        };
        if gamma.is_none() && k % 2 == 1 && !coefficient.is_zero() {
            gamma = Some(Q::one() - Q::new(BigInt::from(k), BigInt::from(2)));
        }
        let value = coefficient.to_f64();
        terms.push(SusceptibilityTerm { exponent_twice: k as u32, coefficient, value });
    }
    Ok(SusceptibilityExpansion {
        t2: t2.to_string(),
        critical_point: critical_point(t2).to_string(),
        terms,
        gamma: gamma.map(|g| g.to_string()).unwrap_or_else(|| "undetermined".into()),
    })
}

/// `t4^(-l/4) d_l(t2 / sqrt(t4), 1)`, evaluated exactly. Requires `t4 = r^4`
/// for a positive rational `r`; the result is mapped back into the field of
/// `p` using `s(t2/r^2, 1) = s(t2, t4) / r^2`.
pub fn rescale_dirac(ell: u32, p: &CouplingPoint) -> Result<SurdScalar> {
    require_positive_t4(p)?;
    let r = rational_sqrt(&p.t4)
        .and_then(|sq| rational_sqrt(&sq))
        .ok_or_else(|| Error::Domain(format!("t4 = {} is not a rational fourth power; use the floating-point route", p.t4)))?;
    let r2 = &r * &r;
    let scaled = CouplingPoint::new(&p.t2 / &r2, Q::one());
    let inner = dirac_moment(ell, &scaled)?;
    let factor = num_traits::pow(r.clone(), ell as usize).recip();
    Ok(SurdScalar::new(&inner.a * &factor, &inner.b / &r2 * &factor, p.radicand()))
}

/// Floating-point version of [`rescale_dirac`] for arbitrary `t4 > 0`.
pub fn rescale_dirac_f64(ell: u32, t2: f64, t4: f64) -> Result<f64> {
    if t4 <= 0.0 {
        return Err(Error::Domain(format!("t4 = {t4} must be > 0")));
    }
    let form = dirac_closed_form(ell)?;
    Ok(t4.powf(-(ell as f64) / 4.0) * form.eval_f64(t2 / t4.sqrt(), 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentRow {
    pub index: CanonicalMoment,
    pub name: String,
    pub degree: u32,
    pub value: SurdScalar,
}

/// All tabulated moments at `p`, in table order.
pub fn moment_table(p: &CouplingPoint) -> Result<Vec<MomentRow>> {
    let table = ClosedFormTable::standard();
    table
        .entries()
        .iter()
        .map(|(c, _)| {
            Ok(MomentRow { index: c.clone(), name: c.name(), degree: c.degree(), value: table.moment(c, p)? })
        })
        .collect()
}

/// CSV with columns `index,degree,a,b,ssq,decimal`.
pub fn moment_table_csv(rows: &[MomentRow]) -> String {
    let mut out = String::from("index,degree,a,b,ssq,decimal\n");
    for r in rows {
        out.push_str(&format!(
            "\"{}\",{},{},{},{},{:.17e}\n",
            r.name,
            r.degree,
            r.value.a,
            r.value.b,
            r.value.ssq,
            r.value.to_f64()
        ));
    }
    out
}
