//! Perturbative solution of the loop equations as power series in `t4`.
//!
//! Order 0 is Gaussian: planar Wick pairings. At order `k`, the equation of
//! any word `w` isolates the highest-degree unknown `m[wA]`:
//!
//! ```text
//! 8 t2 m[wA]_k = LHS_k - 16 (quartic terms)_{k-1} - 64 (m_2 m[wA])_{k-1}
//! ```
//!
//! `LHS_k` only involves lower-degree moments at order `k`, and the quartic
//! terms have degree `deg w + 3`, so order `k` needs degrees up to
//! `D + 2 (K - k)`. Every word whose completion `wA` lies in a class gives an
//! independent determination of that class; all of them must agree.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{MomentSeries, PowerSeries, Q};
use crate::closedform::{dirac_closed_form, dirac_from_moments, ClosedFormTable};
use crate::error::{Error, Result};
use crate::sde::{generate_equation, CoeffTag};
use crate::words::{even_classes_of_degree, vanishes_by_parity, CanonicalMoment, Letter, Word};

/// Number of non-crossing pairings of the letters of `w` (read cyclically)
/// that only pair equal letters.
pub fn planar_pairings(w: &Word) -> u128 {
    let l = w.letters();
    let n = l.len();
    if n % 2 == 1 {
        return 0;
    }
    // c[i][j]: pairings of the half-open interval i..j.
    let mut c = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        c[i][i] = 1;
    }
    for len in (2..=n).step_by(2) {
        for i in 0..=n - len {
            let j = i + len;
            let mut total = 0u128;
            for m in (i + 1..j).step_by(2) {
                if l[i] == l[m] {
                    total += c[i + 1][m] * c[m + 1][j];
                }
            }
            c[i][j] = total;
        }
    }
    c[0][n]
}

/// Gaussian moment: planar pairings times `(8 t2)^(-deg/2)`.
pub fn gaussian_moment(c: &CanonicalMoment, t2: &Q) -> Q {
    if vanishes_by_parity(c) {
        return Q::zero();
    }
    let count = planar_pairings(&c.word());
    let prop = (Q::from_integer(8.into()) * t2).recip();
    Q::from_integer(count.into()) * num_traits::pow(prop, (c.degree() / 2) as usize)
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Pin `m_{1,1,1,1}` to zero instead of solving for it.
    pub enforce_vanishing_abab: bool,
    /// Evaluate every word determining a class and require agreement. When
    /// off, a single word per class is used.
    pub check_consistency: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { enforce_vanishing_abab: false, check_consistency: true }
    }
}

/// Moment series for every even class of degree `<= max_degree`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub t2: Q,
    pub max_degree: usize,
    pub order: usize,
    pub entries: BTreeMap<CanonicalMoment, MomentSeries>,
    /// How many distinct loop equations determined each class at order 1.
    pub determinations: BTreeMap<CanonicalMoment, usize>,
}

impl MomentTable {
    pub fn get(&self, c: &CanonicalMoment) -> Option<&MomentSeries> {
        self.entries.get(c)
    }

    /// Series of any class of degree `<= max_degree`, parity-vanishing ones
    /// included (as zero), the empty class as 1.
    pub fn series(&self, c: &CanonicalMoment) -> Option<MomentSeries> {
        if c.is_empty() {
            return Some(MomentSeries::constant(self.t2.clone(), Q::one(), self.order));
        }
        if vanishes_by_parity(c) && c.degree() as usize <= self.max_degree {
            return Some(MomentSeries::zero(self.t2.clone(), self.order));
        }
        self.entries.get(c).cloned()
    }

    /// `index,order,coefficient` rows with exact rational coefficients.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,order,coefficient\n");
        for (c, s) in &self.entries {
            for (k, v) in s.coeffs().iter().enumerate() {
                out.push_str(&format!("\"{}\",{k},{v}\n", c.name()));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let moments: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(c, s)| {
                serde_json::json!({
                    "index": c,
                    "name": c.name(),
                    "coeffs": s.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "t2": self.t2.to_string(),
            "max_degree": self.max_degree,
            "order": self.order,
            "moments": moments,
        })
    }
}

/// Words `w` with `[wA] = c`, one per reversal pair (the equations of `w`
/// and its reverse coincide).
fn determining_words(c: &CanonicalMoment) -> Vec<Word> {
    let mut out = Vec::new();
    for u in c.orbit() {
        if u.letters().last() != Some(&Letter::A) {
            continue;
        }
        let w = Word::new(u.letters()[..u.len() - 1].to_vec());
        if w <= w.reverse() {
            out.push(w);
        }
    }
    out
}

type Coeffs = HashMap<CanonicalMoment, Vec<Q>>;

fn coeff_of<'a>(table: &'a Coeffs, c: &CanonicalMoment, k: usize, one: &'a Q, zero: &'a Q) -> &'a Q {
    if c.is_empty() {
        return if k == 0 { one } else { zero };
    }
    if vanishes_by_parity(c) {
        return zero;
    }
    &table[c][k]
}

/// Order-`k` determination of `[wA]` from the equation of `w`.
fn determine(w: &Word, k: usize, table: &Coeffs, t2: &Q, m2: &CanonicalMoment) -> Q {
    let eq = generate_equation(w);
    let (one, zero) = (Q::one(), Q::zero());
    let target = eq.leading_moment().expect("nontrivial equation").clone();
    let mut acc = Q::zero();
    for (a, b) in &eq.lhs {
        for j in 0..=k {
            let x = coeff_of(table, a, j, &one, &zero);
            if x.is_zero() {
                continue;
            }
            acc += x * coeff_of(table, b, k - j, &one, &zero);
        }
    }
    let sixteen = Q::from_integer(16.into());
    for t in &eq.rhs {
        match t.tag {
            CoeffTag::Q => acc -= &sixteen * coeff_of(table, &t.moment, k - 1, &one, &zero),
            CoeffTag::Qneg => acc += &sixteen * coeff_of(table, &t.moment, k - 1, &one, &zero),
            CoeffTag::BT => {
                let mut conv = Q::zero();
                for j in 0..k {
                    conv += coeff_of(table, m2, j, &one, &zero) * coeff_of(table, &target, k - 1 - j, &one, &zero);
                }
                acc -= Q::from_integer(64.into()) * conv;
            }
            CoeffTag::C2 => {}
        }
    }
    acc / (Q::from_integer(8.into()) * t2)
}

/// Solves for all even classes of degree `<= max_degree` through order `order`.
pub fn solve_series(max_degree: usize, order: usize, t2: &Q, options: SolveOptions) -> Result<MomentTable> {
    if !t2.is_positive() {
        return Err(Error::Domain(format!("t2 = {t2} must be > 0")));
    }
    let top = |k: usize| max_degree + 2 * (order - k);
    if top(0) > 64 {
        return Err(Error::Domain(format!("working degree {} exceeds 64 letters", top(0))));
    }
    let abab = CanonicalMoment::from_runs(&[1, 1, 1, 1]);
    let m2 = CanonicalMoment::from_runs(&[2]);
    let classes: BTreeMap<usize, Vec<CanonicalMoment>> =
        (2..=top(0)).step_by(2).map(|d| (d, even_classes_of_degree(d))).collect();

    let mut table: Coeffs = HashMap::new();
    for cs in classes.values() {
        for c in cs {
            table.insert(c.clone(), vec![gaussian_moment(c, t2)]);
        }
    }
    let mut determinations = BTreeMap::new();

    for k in 1..=order {
        for d in (2..=top(k)).step_by(2) {
            let results: Vec<Result<(CanonicalMoment, Q, usize)>> = classes[&d]
                .par_iter()
                .map(|c| {
                    if options.enforce_vanishing_abab && *c == abab {
                        return Ok((c.clone(), Q::zero(), 0));
                    }
                    let mut words = determining_words(c);
                    if !options.check_consistency {
                        words.truncate(1);
                    }
                    let first = determine(&words[0], k, &table, t2, &m2);
                    for w in &words[1..] {
                        let other = determine(w, k, &table, t2, &m2);
                        if other != first {
                            return Err(Error::InconsistentDetermination {
                                moment: c.clone(),
                                order: k,
                                first: first.to_string(),
                                second: other.to_string(),
                            });
                        }
                    }
                    Ok((c.clone(), first, words.len()))
                })
                .collect();
            for r in results {
                let (c, v, n) = r?;
                if k == 1 {
                    determinations.insert(c.clone(), n);
                }
                table.get_mut(&c).expect("class registered").push(v);
            }
        }
    }

    let entries = table
        .into_iter()
        .filter(|(c, _)| c.degree() as usize <= max_degree)
        .map(|(c, v)| {
            let s = MomentSeries::from_series(t2.clone(), PowerSeries::new(v, order));
            (c, s)
        })
        .collect();
    determinations.retain(|c: &CanonicalMoment, _| c.degree() as usize <= max_degree);
    Ok(MomentTable { t2: t2.clone(), max_degree, order, entries, determinations })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    /// First order at which the Taylor coefficient differs.
    Mismatch { order: usize, closed_form: String, solver: String },
    /// The closed form is singular at `t4 = 0`.
    Pole { power: usize },
    /// The solver table does not cover this entry.
    NotCovered,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub label: String,
    #[serde(flatten)]
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub t2: String,
    pub max_degree: usize,
    pub order: usize,
    pub rows: Vec<CheckRow>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status == CheckStatus::Pass)
    }
}

fn compare(closed: Result<MomentSeries>, solved: Option<MomentSeries>) -> CheckStatus {
    let Some(solved) = solved else { return CheckStatus::NotCovered };
    match closed {
        Err(Error::PoleAtOrigin { power, .. }) => CheckStatus::Pole { power },
        Err(e) => CheckStatus::Mismatch { order: 0, closed_form: e.to_string(), solver: String::new() },
        Ok(cf) => {
            for (k, (a, b)) in cf.coeffs().iter().zip(solved.coeffs()).enumerate() {
                if a != b {
                    return CheckStatus::Mismatch { order: k, closed_form: a.to_string(), solver: b.to_string() };
                }
            }
            CheckStatus::Pass
        }
    }
}

/// Compares the Taylor expansion of every tabulated closed form (and of
/// `d_2`, `d_4`) with the perturbative solution, coefficient by coefficient.
pub fn verify_closed_forms_with(
    table: &ClosedFormTable,
    solved: &MomentTable,
) -> VerificationReport {
    let t2 = &solved.t2;
    let k = solved.order;
    let mut rows = Vec::new();
    for (c, form) in table.entries() {
        if c.degree() as usize > solved.max_degree {
            continue;
        }
        rows.push(CheckRow { label: c.name(), status: compare(form.taylor(t2, k), solved.series(c)) });
    }
    for ell in [2u32, 4] {
        if (ell as usize) > solved.max_degree {
            continue;
        }
        let closed = dirac_closed_form(ell).expect("tabulated").taylor(t2, k);
        let words = dirac_from_moments(
            ell,
            |c| solved.series(c).ok_or_else(|| Error::MissingMoment(c.clone())),
            |a: &MomentSeries, b: &MomentSeries| a.try_mul(b).expect("same base point"),
            |terms| {
                terms.iter().fold(MomentSeries::zero(t2.clone(), k), |acc, (n, v)| {
                    acc.try_add(&v.scale(&Q::from_integer((*n).into()))).expect("same base point")
                })
            },
        )
        .ok();
        rows.push(CheckRow { label: format!("d_{ell}"), status: compare(closed, words) });
    }
    VerificationReport { t2: t2.to_string(), max_degree: solved.max_degree, order: k, rows }
}

pub fn verify_closed_forms(max_degree: usize, order: usize, t2: &Q) -> Result<VerificationReport> {
    let solved = solve_series(max_degree, order, t2, SolveOptions::default())?;
    Ok(verify_closed_forms_with(&ClosedFormTable::standard(), &solved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::series_residual;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn c(r: &[u32]) -> CanonicalMoment {
        CanonicalMoment::from_runs(r)
    }

    /// Exhaustive oracle: enumerate all perfect matchings and test crossing.
    fn brute_pairings(letters: &[Letter]) -> u128 {
        fn go(free: &mut Vec<usize>, pairs: &mut Vec<(usize, usize)>, letters: &[Letter]) -> u128 {
            if free.is_empty() {
                let crossing = pairs.iter().any(|&(a, b)| {
                    pairs.iter().any(|&(c, d)| a < c && c < b && b < d)
                });
                return u128::from(!crossing);
            }
            let first = free.remove(0);
            let mut total = 0;
            for i in 0..free.len() {
                let other = free[i];
                if letters[first] != letters[other] {
                    continue;
                }
                free.remove(i);
                pairs.push((first, other));
                total += go(free, pairs, letters);
                pairs.pop();
                free.insert(i, other);
            }
            free.insert(0, first);
            total
        }
        go(&mut (0..letters.len()).collect(), &mut Vec::new(), letters)
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_moment(&c(&[2]), &q(1, 1)), q(1, 8));
        assert_eq!(gaussian_moment(&c(&[2]), &q(3, 1)), q(1, 24));
        assert_eq!(gaussian_moment(&c(&[4]), &q(1, 1)), q(1, 32));
        assert_eq!(gaussian_moment(&c(&[2, 2]), &q(1, 1)), q(1, 64));
        assert_eq!(gaussian_moment(&c(&[1, 1, 1, 1]), &q(1, 1)), q(0, 1));
        assert_eq!(gaussian_moment(&c(&[1, 1]), &q(1, 1)), q(0, 1));
    }

    #[test]
    fn catalan_counts() {
        for (n, cat) in [(2, 1), (4, 2), (6, 5), (8, 14), (20, 16796)] {
            assert_eq!(planar_pairings(&Word::power(Letter::A, n)), cat);
        }
    }

    #[test]
    fn pairing_count_matches_brute_force() {
        for d in (2..=10).step_by(2) {
            for cls in even_classes_of_degree(d) {
                let w = cls.word();
                assert_eq!(planar_pairings(&w), brute_pairings(w.letters()), "{cls}");
            }
        }
    }

    #[test]
    fn low_order_series() {
        let t = solve_series(2, 2, &q(1, 1), SolveOptions::default()).unwrap();
        assert_eq!(t.get(&c(&[2])).unwrap().coeffs(), &[q(1, 8), q(-1, 4), q(33, 32)]);
        let t = solve_series(4, 1, &q(1, 1), SolveOptions::default()).unwrap();
        assert_eq!(t.get(&c(&[4])).unwrap().coeffs(), &[q(1, 32), q(-33, 256)]);
        let t = solve_series(2, 0, &q(1, 1), SolveOptions::default()).unwrap();
        assert_eq!(t.get(&c(&[2])).unwrap().coeffs(), &[q(1, 8)]);
    }

    /// Values frozen from an independent brute-force Wick expansion of the
    /// effective action (labeled gluings, exact rationals).
    #[test]
    fn frozen_wick_values() {
        let t = solve_series(6, 2, &q(1, 1), SolveOptions::default()).unwrap();
        let s = |r: &[u32]| t.get(&c(r)).unwrap().coeffs().to_vec();
        assert_eq!(s(&[2]), vec![q(1, 8), q(-1, 4), q(33, 32)]);
        assert_eq!(s(&[2, 2]), vec![q(1, 64), q(-17, 256), q(91, 256)]);
        assert_eq!(s(&[1, 1, 1, 1]), vec![q(0, 1), q(1, 256), q(-9, 256)]);
        assert_eq!(s(&[6])[..2], [q(5, 512), q(-63, 1024)]);
        assert_eq!(s(&[4, 2])[..2], [q(1, 256), q(-13, 512)]);
        assert_eq!(s(&[3, 1, 1, 1])[..2], [q(0, 1), q(1, 1024)]);
        assert_eq!(s(&[2, 1, 2, 1])[..2], [q(1, 512), q(-13, 1024)]);
    }

    #[test]
    fn every_class_has_several_consistent_determinations() {
        let t = solve_series(6, 2, &q(1, 1), SolveOptions::default()).unwrap();
        assert!(t.determinations.values().all(|&n| n >= 1));
        assert!(t.determinations[&c(&[2, 1, 2, 1])] >= 2);
    }

    #[test]
    fn solution_satisfies_all_equations() {
        let t2 = q(2, 3);
        let t = solve_series(8, 2, &t2, SolveOptions::default()).unwrap();
        // Equations whose moments stay within degree 8.
        for d in (1..=5).step_by(2) {
            for bits in 0u32..(1 << d) {
                let w = Word::new((0..d).rev().map(|i| if bits >> i & 1 == 1 { Letter::B } else { Letter::A }).collect());
                let eq = generate_equation(&w);
                if eq.is_trivial() {
                    continue;
                }
                let r = series_residual(&eq, &t2, 2, |m| t.series(m)).unwrap();
                // The quartic terms enter at one order higher, so the top
                // coefficient is exact only if degree d + 3 <= 8.
                assert!(r.coeffs()[..2].iter().all(Zero::is_zero), "{w}: {r}");
                if d + 3 <= 8 {
                    assert!(r.coeffs().iter().all(Zero::is_zero), "{w}: {r}");
                }
            }
        }
    }

    #[test]
    fn enforcing_zero_abab_is_inconsistent() {
        let r = solve_series(6, 2, &q(1, 1), SolveOptions { enforce_vanishing_abab: true, check_consistency: true });
        assert!(matches!(r, Err(Error::InconsistentDetermination { .. })));
    }

    #[test]
    fn exports() {
        let t = solve_series(2, 1, &q(1, 1), SolveOptions::default()).unwrap();
        assert_eq!(t.to_csv(), "index,order,coefficient\n\"m_2\",0,1/8\n\"m_2\",1,-1/4\n");
        assert_eq!(t.to_json()["moments"][0]["coeffs"][1], "-1/4");
    }

    #[test]
    fn verification_report_shapes() {
        let r = verify_closed_forms(2, 0, &q(1, 1)).unwrap();
        assert!(r.all_pass());
        let r = verify_closed_forms(2, 1, &q(1, 1)).unwrap();
        assert!(r.all_pass());
        let r = verify_closed_forms(2, 2, &q(1, 1)).unwrap();
        assert!(!r.all_pass());
        assert_eq!(
            r.rows[0].status,
            CheckStatus::Mismatch { order: 2, closed_form: "1".into(), solver: "33/32".into() }
        );
    }

    #[test]
    fn corrupted_denominator_is_detected() {
        let solved = solve_series(6, 1, &q(1, 1), SolveOptions::default()).unwrap();
        let good = verify_closed_forms_with(&ClosedFormTable::standard(), &solved);
        let bad_table = ClosedFormTable::standard().with_denominator(&c(&[6]), 3_276_832_768);
        let bad = verify_closed_forms_with(&bad_table, &solved);
        let row = |r: &VerificationReport| r.rows.iter().find(|x| x.label == "m_6").unwrap().status.clone();
        assert_ne!(row(&good), row(&bad));
        assert!(matches!(row(&bad), CheckStatus::Mismatch { order: 0, .. }));
    }
}
