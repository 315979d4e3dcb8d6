//! Words over `{A, B}` and their classes under rotation, reversal and the
//! letter swap `A <-> B`.
//!
//! A class is named by its run lengths `(l1, l2, ..., lq)`, read off the
//! lexicographically least word of the orbit (with `A < B`); the word
//! `A^l1 B^l2 A^l3 ...` is then the canonical representative. Words of up to
//! 64 letters are canonicalized on packed bit strings (`A = 0`, `B = 1`,
//! first letter in the most significant used bit).

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn swap(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
        }
    }

    fn bit(self) -> u64 {
        match self {
            Letter::A => 0,
            Letter::B => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
        }
    }
}

/// A monomial in the noncommuting letters `A`, `B`; possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    /// `A^ell`.
    pub fn power(letter: Letter, ell: usize) -> Self {
        Word::new(vec![letter; ell])
    }

    /// Parses strings such as `ABAB`, `abab`, `A^3BAB^3` or `A3B`; whitespace
    /// is ignored and `1` or the empty string denote the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::ParseWord(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "1" {
            return Ok(Word::empty());
        }
        let chars: Vec<char> = compact.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let letter = match chars[i] {
                'A' | 'a' => Letter::A,
                'B' | 'b' => Letter::B,
                _ => return Err(bad()),
            };
            i += 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let count = if start == i {
                if chars[i - 1] == '^' {
                    return Err(bad());
                }
                1
            } else {
                chars[start..i].iter().collect::<String>().parse::<usize>().map_err(|_| bad())?
            };
            letters.extend(std::iter::repeat(letter).take(count));
        }
        Ok(Word::new(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn degree_of(&self, letter: Letter) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }

    pub fn a_degree(&self) -> usize {
        self.degree_of(Letter::A)
    }

    pub fn b_degree(&self) -> usize {
        self.degree_of(Letter::B)
    }

    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let n = letters.len();
            letters.rotate_left(k % n);
        }
        Word::new(letters)
    }

    pub fn reverse(&self) -> Word {
        Word::new(self.letters.iter().rev().copied().collect())
    }

    pub fn swap(&self) -> Word {
        Word::new(self.letters.iter().map(|l| l.swap()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(letters)
    }

    pub fn push(&mut self, letter: Letter) {
        self.letters.push(letter);
    }

    /// Run lengths of the word read left to right (letters alternate).
    pub fn runs(&self) -> Vec<u32> {
        let mut runs: Vec<u32> = Vec::new();
        let mut prev = None;
        for &l in &self.letters {
            if Some(l) == prev {
                *runs.last_mut().expect("nonempty") += 1;
            } else {
                runs.push(1);
                prev = Some(l);
            }
        }
        runs
    }

    /// Exponent notation, e.g. `A^3BAB^3`; the empty word prints as `1`.
    pub fn pretty(&self) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let mut i = 0;
        for r in self.runs() {
            out.push(self.letters[i].as_char());
            if r > 1 {
                out.push('^');
                out.push_str(&r.to_string());
            }
            i += r as usize;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// The class of a word under rotation, reversal and letter swap, named by
/// the run lengths of its least representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalMoment {
    degree: u32,
    runs: Vec<u32>,
}

impl CanonicalMoment {
    /// The empty class (normalized trace of the identity, value 1).
    pub fn empty() -> Self {
        CanonicalMoment { degree: 0, runs: Vec::new() }
    }

    /// Canonical class of `A^r1 B^r2 A^r3 ...` for arbitrary positive runs.
    pub fn from_runs(runs: &[u32]) -> Self {
        canonicalize(&word_from_runs(runs))
    }

    /// Parses `2`, `2,2`, `m_2`, `m_{3,1,1,3}` (also tolerating `.` as a
    /// separator). The runs are canonicalized.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::ParseWord(text.to_string());
        let t = text.trim();
        let t = t.strip_prefix("m_").unwrap_or(t);
        let t = t.strip_prefix('{').and_then(|s| s.strip_suffix('}')).unwrap_or(t);
        if t.is_empty() {
            return Ok(CanonicalMoment::empty());
        }
        let runs = t
            .split([',', '.'])
            .map(|p| p.trim().parse::<u32>().ok().filter(|&v| v > 0))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(bad)?;
        Ok(CanonicalMoment::from_runs(&runs))
    }

    pub fn runs(&self) -> &[u32] {
        &self.runs
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.degree == 0
    }

    /// Degree in the letter of the even-indexed runs (the canonical `A`).
    pub fn a_degree(&self) -> u32 {
        self.runs.iter().step_by(2).sum()
    }

    pub fn b_degree(&self) -> u32 {
        self.runs.iter().skip(1).step_by(2).sum()
    }

    /// The canonical representative `A^l1 B^l2 ...`.
    pub fn word(&self) -> Word {
        word_from_runs(&self.runs)
    }

    /// All distinct words in the class.
    pub fn orbit(&self) -> Vec<Word> {
        let base = self.word();
        let mut out: Vec<Word> = Vec::new();
        for w in [base.clone(), base.reverse(), base.swap(), base.swap().reverse()] {
            for k in 0..w.len().max(1) {
                out.push(w.rotate(k));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// LaTeX-free name as written in the literature: `m_2`, `m_{10}`,
    /// `m_{2,2}`; the empty class renders as `1`.
    pub fn name(&self) -> String {
        match self.runs.as_slice() {
            [] => "1".to_string(),
            [r] if *r < 10 => format!("m_{r}"),
            runs => format!(
                "m_{{{}}}",
                runs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

impl fmt::Display for CanonicalMoment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for CanonicalMoment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.runs.serialize(s)
    }
}

fn word_from_runs(runs: &[u32]) -> Word {
    let mut letters = Vec::new();
    for (i, &r) in runs.iter().enumerate() {
        let l = if i % 2 == 0 { Letter::A } else { Letter::B };
        letters.extend(std::iter::repeat(l).take(r as usize));
    }
    Word::new(letters)
}

/// Packs up to 64 letters, first letter in the most significant used bit.
fn pack(letters: &[Letter]) -> u64 {
    letters.iter().fold(0u64, |acc, l| (acc << 1) | l.bit())
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn rotl(x: u64, n: usize) -> u64 {
    if n <= 1 {
        return x;
    }
    ((x << 1) | (x >> (n - 1))) & mask(n)
}

fn reverse_bits(x: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - n)
    }
}

fn min_rotation(x: u64, n: usize) -> u64 {
    let mut best = x;
    let mut cur = x;
    for _ in 1..n {
        cur = rotl(cur, n);
        best = best.min(cur);
    }
    best
}

/// Least packed word over the rotation/reversal/swap orbit.
fn orbit_min_packed(x: u64, n: usize) -> u64 {
    let m = mask(n);
    let r = reverse_bits(x, n);
    [x, r, !x & m, !r & m]
        .into_iter()
        .map(|y| min_rotation(y, n))
        .min()
        .expect("four candidates")
}

fn runs_of_packed(x: u64, n: usize) -> Vec<u32> {
    let mut runs: Vec<u32> = Vec::new();
    let mut prev = 2u64;
    for i in (0..n).rev() {
        let bit = (x >> i) & 1;
        if bit == prev {
            *runs.last_mut().expect("nonempty") += 1;
        } else {
            runs.push(1);
            prev = bit;
        }
    }
    runs
}

/// Orbit-minimal representative of `w` under rotation, reversal and swap.
pub fn canonicalize(w: &Word) -> CanonicalMoment {
    let n = w.len();
    if n == 0 {
        return CanonicalMoment::empty();
    }
    let runs = if n <= 64 {
        runs_of_packed(orbit_min_packed(pack(w.letters()), n), n)
    } else {
        let mut best: Option<Word> = None;
        for v in [w.clone(), w.reverse(), w.swap(), w.swap().reverse()] {
            for k in 0..n {
                let r = v.rotate(k);
                if best.as_ref().map_or(true, |b| r < *b) {
                    best = Some(r);
                }
            }
        }
        best.expect("nonempty orbit").runs()
    };
    CanonicalMoment { degree: n as u32, runs }
}

/// One `(prefix, suffix)` pair per occurrence of `letter` in `w`.
pub fn splits_at(w: &Word, letter: Letter) -> Vec<(Word, Word)> {
    let l = w.letters();
    l.iter()
        .enumerate()
        .filter(|(_, &x)| x == letter)
        .map(|(p, _)| (Word::new(l[..p].to_vec()), Word::new(l[p + 1..].to_vec())))
        .collect()
}

/// True when the class has odd degree in either letter, so that its moment
/// vanishes under `A -> -A` or `B -> -B`.
pub fn vanishes_by_parity(c: &CanonicalMoment) -> bool {
    c.a_degree() % 2 == 1 || c.b_degree() % 2 == 1
}

/// All classes of a given degree, in increasing order of their least
/// representative. Uses the FKM necklace generator, then keeps the
/// necklaces that are also minimal under reversal and swap.
pub fn classes_of_degree(n: usize) -> Vec<CanonicalMoment> {
    assert!(n <= 64, "class enumeration is limited to 64 letters");
    if n == 0 {
        return vec![CanonicalMoment::empty()];
    }
    let mut out = Vec::new();
    let mut a = vec![0u8; n + 1];
    let mut t = 1usize;
    loop {
        if n % t == 0 {
            let x = a[1..].iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
            if orbit_min_packed(x, n) == x {
                out.push(CanonicalMoment { degree: n as u32, runs: runs_of_packed(x, n) });
            }
        }
        // Next prenecklace in lexicographic order.
        let mut i = n;
        while i > 0 && a[i] == 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        a[i] = 1;
        for j in i + 1..=n {
            a[j] = a[j - i];
        }
        t = i;
    }
    out
}

/// Classes of the given degree whose moments are not killed by parity.
pub fn even_classes_of_degree(n: usize) -> Vec<CanonicalMoment> {
    classes_of_degree(n).into_iter().filter(|c| !vanishes_by_parity(c)).collect()
}
