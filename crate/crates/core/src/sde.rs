//! Large-N loop equations of the effective two-matrix model.
//!
//! For a word `w`, integrating `d/dA_ij (w)_ij e^{-S}` by parts and letting
//! traces factorize gives
//!
//! ```text
//! sum_{w = u A v} m[u] m[v] = 8 t2 m[wA]
//!     + 16 t4 (m[wAAA] - m[wBAB] + m[wABB] + m[wBBA]) + 64 t4 m_2 m[wA]
//! ```
//!
//! where `[.]` is the class of a word. Coefficients are kept as tags so the
//! same equation can be evaluated exactly, as a series in `t4`, or printed.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{CouplingPoint, MomentSeries, PowerSeries, SurdScalar, Q};
use crate::error::{Error, Result};
use crate::words::{canonicalize, splits_at, vanishes_by_parity, CanonicalMoment, Letter, Word};

/// Coefficient tag of a right-hand-side term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CoeffTag {
    /// `8 t2`.
    C2,
    /// `+16 t4`.
    Q,
    /// `-16 t4`.
    Qneg,
    /// `64 t4 m_2`.
    BT,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RhsTerm {
    pub moment: CanonicalMoment,
    pub tag: CoeffTag,
    /// The word appended to the source word to produce this term.
    pub insertion: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdeEquation {
    pub source_word: Word,
    /// Factorized products, one per surviving `A` position of the source word;
    /// the empty class stands for the factor 1.
    pub lhs: Vec<(CanonicalMoment, CanonicalMoment)>,
    /// Linear terms in generation order: `C2`, the four quartic insertions
    /// `AAA, BAB, ABB, BBA`, then `BT`. Parity-vanishing terms are omitted.
    pub rhs: Vec<RhsTerm>,
}

/// Order-independent content of an equation, used for deduplication and
/// comparison against hand-transcribed equation lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructuralKey {
    pub lhs: Vec<(CanonicalMoment, CanonicalMoment)>,
    pub c2: Option<CanonicalMoment>,
    /// Net multiple of `16 t4` per moment, zero entries removed.
    pub quartic: Vec<(CanonicalMoment, i64)>,
    pub bt: Option<CanonicalMoment>,
}

impl StructuralKey {
    /// Canonical one-line rendering; two keys are equal iff these strings are.
    pub fn normalized(&self) -> String {
        let mut out = String::from("LHS[");
        out.push_str(
            &self.lhs.iter().map(|(a, b)| format!("{a}*{b}")).collect::<Vec<_>>().join(" + "),
        );
        out.push_str("] C2[");
        if let Some(c) = &self.c2 {
            out.push_str(&c.name());
        }
        out.push_str("] Q[");
        out.push_str(
            &self.quartic.iter().map(|(m, k)| format!("{k}*{m}")).collect::<Vec<_>>().join(" + "),
        );
        out.push_str("] BT[");
        if let Some(c) = &self.bt {
            out.push_str(&c.name());
        }
        out.push(']');
        out
    }
}

const QUARTIC_INSERTIONS: [(&str, CoeffTag); 4] =
    [("AAA", CoeffTag::Q), ("BAB", CoeffTag::Qneg), ("ABB", CoeffTag::Q), ("BBA", CoeffTag::Q)];

/// Loop equation generated by the word `w`.
pub fn generate_equation(w: &Word) -> SdeEquation {
    let mut lhs = Vec::new();
    for (u, v) in splits_at(w, Letter::A) {
        let (cu, cv) = (canonicalize(&u), canonicalize(&v));
        if vanishes_by_parity(&cu) || vanishes_by_parity(&cv) {
            continue;
        }
        lhs.push((cu, cv));
    }
    let mut rhs = Vec::new();
    let mut push = |ins: &str, tag: CoeffTag| {
        let insertion = Word::parse(ins).expect("static insertion word");
        let moment = canonicalize(&w.concat(&insertion));
        if !vanishes_by_parity(&moment) {
            rhs.push(RhsTerm { moment, tag, insertion });
        }
    };
    push("A", CoeffTag::C2);
    for (ins, tag) in QUARTIC_INSERTIONS {
        push(ins, tag);
    }
    push("A", CoeffTag::BT);
    SdeEquation { source_word: w.clone(), lhs, rhs }
}

impl SdeEquation {
    /// True when every term vanishes by parity (`0 = 0`).
    pub fn is_trivial(&self) -> bool {
        self.lhs.is_empty() && self.rhs.is_empty()
    }

    /// The class `[wA]` isolated by the `8 t2` term.
    pub fn leading_moment(&self) -> Option<&CanonicalMoment> {
        self.rhs.iter().find(|t| t.tag == CoeffTag::C2).map(|t| &t.moment)
    }

    /// Quartic terms merged per moment, first-occurrence order, net multiple
    /// of `16 t4`; cancelled moments are dropped.
    pub fn quartic_merged(&self) -> Vec<(CanonicalMoment, i64)> {
        let mut out: Vec<(CanonicalMoment, i64)> = Vec::new();
        for t in &self.rhs {
            let sign = match t.tag {
                CoeffTag::Q => 1,
                CoeffTag::Qneg => -1,
                _ => continue,
            };
            match out.iter_mut().find(|(m, _)| *m == t.moment) {
                Some((_, k)) => *k += sign,
                None => out.push((t.moment.clone(), sign)),
            }
        }
        out.retain(|(_, k)| *k != 0);
        out
    }

    /// Left-hand products merged in first-occurrence order with multiplicity;
    /// factor pairs are unordered.
    pub fn lhs_merged(&self) -> Vec<((CanonicalMoment, CanonicalMoment), i64)> {
        let mut out: Vec<((CanonicalMoment, CanonicalMoment), i64)> = Vec::new();
        for (a, b) in &self.lhs {
            let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            match out.iter_mut().find(|(k, _)| *k == key) {
                Some((_, n)) => *n += 1,
                None => out.push((key, 1)),
            }
        }
        out
    }

    fn tagged(&self, tag: CoeffTag) -> Option<CanonicalMoment> {
        self.rhs.iter().find(|t| t.tag == tag).map(|t| t.moment.clone())
    }

    pub fn structural_key(&self) -> StructuralKey {
        let mut lhs: Vec<(CanonicalMoment, CanonicalMoment)> = self
            .lhs
            .iter()
            .map(|(a, b)| if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) })
            .collect();
        lhs.sort();
        let mut quartic = self.quartic_merged();
        quartic.sort();
        StructuralKey {
            lhs,
            c2: self.tagged(CoeffTag::C2),
            quartic,
            bt: self.tagged(CoeffTag::BT),
        }
    }

    /// Every moment the equation mentions, including `m_2` when `BT` is present.
    pub fn moments(&self) -> Vec<CanonicalMoment> {
        let mut set: Vec<CanonicalMoment> = Vec::new();
        let mut add = |c: &CanonicalMoment| {
            if !c.is_empty() && !set.contains(c) {
                set.push(c.clone());
            }
        };
        for (a, b) in &self.lhs {
            add(a);
            add(b);
        }
        for t in &self.rhs {
            add(&t.moment);
            if t.tag == CoeffTag::BT {
                add(&CanonicalMoment::from_runs(&[2]));
            }
        }
        set
    }

    fn render_lhs(&self, latex: bool) -> String {
        let merged = self.lhs_merged();
        if merged.is_empty() {
            return "0".to_string();
        }
        merged
            .iter()
            .map(|((a, b), n)| {
                let factors: Vec<String> =
                    [a, b].iter().filter(|c| !c.is_empty()).map(|c| name(c, latex)).collect();
                let body = factors.join(" ");
                match (n, body.is_empty()) {
                    (1, true) => "1".to_string(),
                    (_, true) => n.to_string(),
                    (1, false) => body,
                    (_, false) => format!("{n} {body}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn render(&self, latex: bool) -> String {
        let (t2, t4) = if latex { ("t_{2}", "t_{4}") } else { ("t2", "t4") };
        let mut parts: Vec<String> = Vec::new();
        if let Some(c) = self.tagged(CoeffTag::C2) {
            parts.push(format!("8 {t2} {}", name(&c, latex)));
        }
        let mut inner = String::new();
        for (i, (m, k)) in self.quartic_merged().iter().enumerate() {
            let mag = 16 * k.abs();
            match (i, *k < 0) {
                (0, false) => write!(inner, "{mag} {}", name(m, latex)),
                (0, true) => write!(inner, "-{mag} {}", name(m, latex)),
                (_, false) => write!(inner, " + {mag} {}", name(m, latex)),
                (_, true) => write!(inner, " - {mag} {}", name(m, latex)),
            }
            .expect("write to string");
        }
        if let Some(c) = self.tagged(CoeffTag::BT) {
            let m2 = name(&CanonicalMoment::from_runs(&[2]), latex);
            let sep = if inner.is_empty() { "" } else { " + " };
            write!(inner, "{sep}64 {m2} {}", name(&c, latex)).expect("write to string");
        }
        if !inner.is_empty() {
            if latex {
                parts.push(format!("{t4}\\left({inner}\\right)"));
            } else {
                parts.push(format!("{t4}({inner})"));
            }
        }
        let rhs = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        format!("{} = {rhs}", self.render_lhs(latex))
    }

    /// Plain-text form, e.g.
    /// `1 = 8 t2 m_2 + t4(16 m_4 - 16 m_{1,1,1,1} + 32 m_{2,2} + 64 m_2 m_2)`.
    pub fn to_text(&self) -> String {
        self.render(false)
    }

    pub fn to_latex(&self) -> String {
        self.render(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let lhs: Vec<serde_json::Value> = self
            .lhs
            .iter()
            .map(|(a, b)| serde_json::json!([a, b]))
            .collect();
        let mut rhs: Vec<serde_json::Value> = Vec::new();
        if let Some(c) = self.tagged(CoeffTag::C2) {
            rhs.push(serde_json::json!({"idx": c, "coeff": "8 t2"}));
        }
        for (m, k) in self.quartic_merged() {
            rhs.push(serde_json::json!({"idx": m, "coeff": format!("{} t4", 16 * k)}));
        }
        if let Some(c) = self.tagged(CoeffTag::BT) {
            rhs.push(serde_json::json!({"idx": c, "coeff": "64 t4 m_2"}));
        }
        serde_json::json!({
            "word": self.source_word.to_string(),
            "lhs": lhs,
            "rhs": rhs,
        })
    }
}

fn name(c: &CanonicalMoment, latex: bool) -> String {
    if !latex {
        return c.name();
    }
    if c.is_empty() {
        return "1".to_string();
    }
    let runs: Vec<String> = c.runs().iter().map(u32::to_string).collect();
    format!("m_{{{}}}", runs.join(","))
}

/// Single-`A`-block words `B^i A^j B^k` (j odd, i + k even) of odd degree up
/// to `max_word_degree`, deduplicated by structural content in generation
/// order. This family reproduces the classical hand-derived list of
/// 29 equations (20 distinct) at degree 7.
pub fn generate_system(max_word_degree: usize) -> Vec<SdeEquation> {
    let mut words = Vec::new();
    for d in (1..=max_word_degree).step_by(2) {
        for j in (1..=d).step_by(2) {
            let rest = d - j;
            for i in 0..=rest {
                let k = rest - i;
                let w = Word::power(Letter::B, i)
                    .concat(&Word::power(Letter::A, j))
                    .concat(&Word::power(Letter::B, k));
                words.push(w);
            }
        }
    }
    dedup(words)
}

/// Every word of odd degree up to `max_word_degree` with odd `A`-degree and
/// even `B`-degree (the others give `0 = 0`), deduplicated structurally.
pub fn generate_full_system(max_word_degree: usize) -> Vec<SdeEquation> {
    let mut words = Vec::new();
    for d in (1..=max_word_degree).step_by(2) {
        for bits in 0u64..(1u64 << d) {
            let letters: Vec<Letter> =
                (0..d).rev().map(|i| if bits >> i & 1 == 1 { Letter::B } else { Letter::A }).collect();
            words.push(Word::new(letters));
        }
    }
    dedup(words)
}

fn dedup(words: Vec<Word>) -> Vec<SdeEquation> {
    let mut seen = HashSet::new();
    words
        .iter()
        .map(generate_equation)
        .filter(|e| !e.is_trivial())
        .filter(|e| seen.insert(e.structural_key()))
        .collect()
}

/// Moment values keyed by class.
pub type Assignment = BTreeMap<CanonicalMoment, SurdScalar>;

/// `RHS - LHS` in the surd field of `point`. Parity-vanishing classes are 0,
/// the empty class is 1, anything else must be supplied by `lookup`.
pub fn residual_with<F>(eq: &SdeEquation, point: &CouplingPoint, lookup: F) -> Result<SurdScalar>
where
    F: Fn(&CanonicalMoment) -> Option<SurdScalar>,
{
    let ssq = point.radicand();
    let value = |c: &CanonicalMoment| -> Result<SurdScalar> {
        if c.is_empty() {
            return Ok(SurdScalar::one(ssq.clone()));
        }
        if vanishes_by_parity(c) {
            return Ok(SurdScalar::zero(ssq.clone()));
        }
        let v = lookup(c).ok_or_else(|| Error::MissingMoment(c.clone()))?;
        if v.ssq != ssq {
            return Err(Error::RadicandMismatch { left: v.ssq.to_string(), right: ssq.to_string() });
        }
        Ok(v)
    };
    let m2 = CanonicalMoment::from_runs(&[2]);
    let c2 = Q::from_integer(8.into()) * &point.t2;
    let q = Q::from_integer(16.into()) * &point.t4;
    let bt = Q::from_integer(64.into()) * &point.t4;
    let mut acc = SurdScalar::zero(ssq.clone());
    for t in &eq.rhs {
        let m = value(&t.moment)?;
        let term = match t.tag {
            CoeffTag::C2 => m.scale(&c2),
            CoeffTag::Q => m.scale(&q),
            CoeffTag::Qneg => m.scale(&-q.clone()),
            CoeffTag::BT => m.try_mul(&value(&m2)?)?.scale(&bt),
        };
        acc = acc.try_add(&term)?;
    }
    for (a, b) in &eq.lhs {
        acc = acc.try_sub(&value(a)?.try_mul(&value(b)?)?)?;
    }
    Ok(acc)
}

/// [`residual_with`] over an explicit table.
pub fn residual(eq: &SdeEquation, assignment: &Assignment, point: &CouplingPoint) -> Result<SurdScalar> {
    residual_with(eq, point, |c| assignment.get(c).cloned())
}

/// `RHS - LHS` as a series in `t4` at base point `t2`.
pub fn series_residual<F>(eq: &SdeEquation, t2: &Q, order: usize, lookup: F) -> Result<MomentSeries>
where
    F: Fn(&CanonicalMoment) -> Option<MomentSeries>,
{
    let value = |c: &CanonicalMoment| -> Result<PowerSeries> {
        if c.is_empty() {
            return Ok(PowerSeries::constant(Q::from_integer(1.into()), order));
        }
        if vanishes_by_parity(c) {
            return Ok(PowerSeries::zero(order));
        }
        let v = lookup(c).ok_or_else(|| Error::MissingMoment(c.clone()))?;
        if &v.t2 != t2 {
            return Err(Error::BasePointMismatch { left: v.t2.to_string(), right: t2.to_string() });
        }
        Ok(v.series)
    };
    let t4 = PowerSeries::var(order);
    let m2 = CanonicalMoment::from_runs(&[2]);
    let c2 = Q::from_integer(8.into()) * t2;
    let mut acc = PowerSeries::zero(order);
    for t in &eq.rhs {
        let m = value(&t.moment)?;
        let term = match t.tag {
            CoeffTag::C2 => m.scale(&c2),
            CoeffTag::Q => m.mul(&t4).scale(&Q::from_integer(16.into())),
            CoeffTag::Qneg => m.mul(&t4).scale(&Q::from_integer((-16).into())),
            CoeffTag::BT => m.mul(&value(&m2)?).mul(&t4).scale(&Q::from_integer(64.into())),
        };
        acc = acc.add(&term);
    }
    for (a, b) in &eq.lhs {
        acc = acc.sub(&value(a)?.mul(&value(b)?));
    }
    let acc = if acc.order() > order { acc.truncate(order)? } else { acc };
    Ok(MomentSeries::from_series(t2.clone(), acc))
}

impl SdeEquation {
    /// Letter-swapped image: the equation obtained from `d/dB` acting on the
    /// swapped word. Classes are swap-invariant, so only the source word and
    /// insertion words change.
    pub fn swapped(&self) -> SdeEquation {
        SdeEquation {
            source_word: self.source_word.swap(),
            lhs: self.lhs.clone(),
            rhs: self
                .rhs
                .iter()
                .map(|t| RhsTerm { moment: t.moment.clone(), tag: t.tag, insertion: t.insertion.swap() })
                .collect(),
        }
    }
}

/// Parses one hand-written equation of the form
/// `A^3: 2 m_2 = 8 t2 m_4 + t4(16 m_6 - 16 m_{3,1,1,1} + ... + 64 m_2 m_4)`
/// into its source word and structural key. Repeated terms are merged the
/// same way generated equations are.
pub fn parse_printed(line: &str) -> Result<(Word, StructuralKey)> {
    let bad = |why: &str| Error::ParseWord(format!("{why}: {line}"));
    let (word, rest) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
    let word = Word::parse(word)?;
    let (lhs_text, rhs_text) = rest.split_once('=').ok_or_else(|| bad("missing '='"))?;

    let mut lhs = Vec::new();
    let lhs_text = lhs_text.trim();
    if lhs_text != "0" {
        for term in lhs_text.split('+') {
            let mut toks: Vec<&str> = term.split_whitespace().collect();
            let mult = match toks.first().and_then(|t| t.parse::<usize>().ok()) {
                Some(k) => {
                    toks.remove(0);
                    k
                }
                None => 1,
            };
            let mut factors = Vec::new();
            for t in toks {
                if t == "1" {
                    continue;
                }
                match t.strip_suffix("^2") {
                    Some(m) => {
                        let c = CanonicalMoment::parse(m)?;
                        factors.push(c.clone());
                        factors.push(c);
                    }
                    None => factors.push(CanonicalMoment::parse(t)?),
                }
            }
            if factors.len() > 2 {
                return Err(bad("left-hand product of more than two moments"));
            }
            while factors.len() < 2 {
                factors.push(CanonicalMoment::empty());
            }
            factors.sort();
            for _ in 0..mult {
                lhs.push((factors[0].clone(), factors[1].clone()));
            }
        }
    }
    lhs.sort();

    let (c2_text, quartic_text) = rhs_text.split_once("t4(").ok_or_else(|| bad("missing 't4('"))?;
    let c2_text = c2_text.trim().trim_end_matches('+').trim();
    let c2 = c2_text.strip_prefix("8 t2").ok_or_else(|| bad("missing '8 t2'"))?;
    let c2 = Some(CanonicalMoment::parse(c2)?);
    let quartic_text = quartic_text.trim().strip_suffix(')').ok_or_else(|| bad("unclosed 't4('"))?;

    let mut quartic: Vec<(CanonicalMoment, i64)> = Vec::new();
    let mut bt = None;
    for term in quartic_text.replace("- ", "+ -").split('+') {
        let toks: Vec<&str> = term.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [k, m] => {
                let sign = match k.parse::<i64>() {
                    Ok(v) if v % 16 == 0 => v / 16,
                    _ => return Err(bad("quartic coefficient must be a multiple of 16")),
                };
                let c = CanonicalMoment::parse(m)?;
                match quartic.iter_mut().find(|(x, _)| *x == c) {
                    Some((_, n)) => *n += sign,
                    None => quartic.push((c, sign)),
                }
            }
            ["64", "m_2", m] => bt = Some(CanonicalMoment::parse(m)?),
            _ => return Err(bad("unrecognized quartic term")),
        }
    }
    quartic.retain(|(_, k)| *k != 0);
    quartic.sort();
    Ok((word, StructuralKey { lhs, c2, quartic, bt }))
}

/// True when a residual is exactly zero.
pub fn is_exact_zero(r: &SurdScalar) -> bool {
    r.a.is_zero() && r.b.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn printed_equations_parse_back() {
        for word in ["A", "A^3", "AB^2", "BAB", "B^2AB^2", "A^5B^2"] {
            let eq = generate_equation(&w(word));
            let (pw, key) = parse_printed(&format!("{word}: {}", eq.to_text())).unwrap();
            assert_eq!(pw, w(word));
            assert_eq!(key, eq.structural_key(), "{word}");
        }
        assert!(parse_printed("A 1 = 8 t2 m_2").is_err());
        assert!(parse_printed("A: 1 = 8 t2 m_2 + t4(12 m_4)").is_err());
        assert!(parse_printed("A: 1 = 8 t2 m_2 + t4(16 m_4 m_2 m_2)").is_err());
    }

    #[test]
    fn first_equation_text() {
        assert_eq!(
            generate_equation(&w("A")).to_text(),
            "1 = 8 t2 m_2 + t4(16 m_4 - 16 m_{1,1,1,1} + 32 m_{2,2} + 64 m_2 m_2)"
        );
    }

    #[test]
    fn degree_three_equations() {
        assert_eq!(
            generate_equation(&w("BAB")).to_text(),
            "0 = 8 t2 m_{1,1,1,1} + t4(48 m_{3,1,1,1} - 16 m_{2,1,2,1} + 64 m_2 m_{1,1,1,1})"
        );
        assert_eq!(
            generate_equation(&w("AB^2")).to_text(),
            "m_2 = 8 t2 m_{2,2} + t4(32 m_{4,2} - 16 m_{3,1,1,1} + 16 m_{2,1,2,1} + 64 m_2 m_{2,2})"
        );
        assert_eq!(
            generate_equation(&w("A^3")).to_text(),
            "2 m_2 = 8 t2 m_4 + t4(16 m_6 - 16 m_{3,1,1,1} + 32 m_{4,2} + 64 m_2 m_4)"
        );
        assert_eq!(
            generate_equation(&w("ABB")).structural_key(),
            generate_equation(&w("BBA")).structural_key()
        );
    }

    #[test]
    fn system_sizes() {
        assert_eq!(generate_system(1).len(), 1);
        assert_eq!(generate_system(3).len(), 4);
        assert_eq!(generate_system(7).len(), 20);
        assert_eq!(generate_full_system(3).len(), 4);
        assert_eq!(generate_full_system(7).len(), 50);
    }

    #[test]
    fn residual_examples() {
        let p = CouplingPoint::from_ints(1, 1);
        let ssq = p.radicand();
        let val = |v: Q| SurdScalar::rational(v, ssq.clone());
        let mut a = Assignment::new();
        a.insert(CanonicalMoment::from_runs(&[2]), val(q(1, 16)));
        a.insert(CanonicalMoment::from_runs(&[4]), val(q(1, 128)));
        a.insert(CanonicalMoment::from_runs(&[2, 2]), val(q(1, 256)));
        a.insert(CanonicalMoment::from_runs(&[1, 1, 1, 1]), val(q(0, 1)));
        let eq = generate_equation(&w("A"));
        assert!(is_exact_zero(&residual(&eq, &a, &p).unwrap()));

        a.insert(CanonicalMoment::from_runs(&[2]), val(q(17, 16)));
        assert!(!is_exact_zero(&residual(&eq, &a, &p).unwrap()));

        let bab = generate_equation(&w("BAB"));
        let zeros = |_: &CanonicalMoment| Some(SurdScalar::zero(ssq.clone()));
        assert!(is_exact_zero(&residual_with(&bab, &p, zeros).unwrap()));

        let empty = Assignment::new();
        assert!(matches!(residual(&eq, &empty, &p), Err(Error::MissingMoment(_))));
    }

    #[test]
    fn latex_and_json() {
        let eq = generate_equation(&w("A"));
        assert!(eq.to_latex().starts_with("1 = 8 t_{2} m_{2} + t_{4}\\left(16 m_{4}"));
        let j = eq.to_json();
        assert_eq!(j["word"], "A");
        assert_eq!(j["lhs"], serde_json::json!([[[], []]]));
        assert_eq!(j["rhs"][0]["coeff"], "8 t2");
        assert_eq!(j["rhs"][3]["coeff"], "32 t4");
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        proptest::collection::vec(any::<bool>(), 0..12)
            .prop_map(|v| Word::new(v.into_iter().map(|b| if b { Letter::B } else { Letter::A }).collect()))
    }

    proptest! {
        #[test]
        fn degree_bookkeeping(word in word_strategy()) {
            let eq = generate_equation(&word);
            let d = word.len() as u32;
            for t in &eq.rhs {
                prop_assert!(t.moment.degree() == d + 1 || t.moment.degree() == d + 3);
            }
            for (a, b) in &eq.lhs {
                prop_assert_eq!(a.degree() + b.degree(), d - 1);
            }
        }

        #[test]
        fn swap_covariance(word in word_strategy()) {
            // The B-derivative equation of swap(w) has the same content as the
            // A-derivative equation of w, with every word letter-swapped.
            let eq = generate_equation(&word);
            let image = eq.swapped();
            prop_assert_eq!(image.source_word, word.swap());
            for (t, s) in eq.rhs.iter().zip(image.rhs.iter()) {
                prop_assert_eq!(canonicalize(&word.swap().concat(&s.insertion)), t.moment.clone());
            }
            for ((u, v), (a, b)) in splits_at(&word.swap(), Letter::B).iter().zip(
                splits_at(&word, Letter::A).iter()) {
                prop_assert_eq!(canonicalize(u), canonicalize(a));
                prop_assert_eq!(canonicalize(v), canonicalize(b));
            }
        }

        #[test]
        fn reversal_gives_the_same_equation(word in word_strategy()) {
            prop_assert_eq!(
                generate_equation(&word).structural_key(),
                generate_equation(&word.reverse()).structural_key()
            );
        }
    }
}
