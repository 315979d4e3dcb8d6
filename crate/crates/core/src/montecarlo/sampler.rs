use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::action::{action_from_traces, dirac_matrix, dirac_trace_power, dirac_traces, traces, Cache};
use super::matrix::Matrix;
use crate::algebra::CouplingPoint;
use crate::closedform::Signature;
use crate::error::{Error, Result};
use crate::words::{Letter, Word};

/// Target acceptance rate for burn-in step-size tuning.
pub const TARGET_ACCEPTANCE: f64 = 0.4;
/// Acceptance rates outside this window are flagged in diagnostics.
pub const ACCEPTANCE_WINDOW: (f64, f64) = (0.2, 0.7);
/// Number of batches per chain for batch-means errors.
pub const BATCHES_PER_CHAIN: usize = 32;
/// Minimum number of batches for a reported error.
pub const MIN_BATCHES: usize = 16;

/// Quantity recorded on every thinned state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Observable {
    /// `(1/N) Re tr w(A, B)`.
    Word(String),
    /// `(1/N^2) tr D^ell` from the dense Dirac operator, recorded on every
    /// `dirac_stride`-th thinned state.
    Dirac(u32),
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub signature: Signature,
    pub point: CouplingPoint,
    /// Proposals per chain, burn-in included.
    pub steps: u64,
    pub burn_in: u64,
    /// Proposals between recorded states.
    pub thinning: u64,
    /// Initial proposal scale; tuned during burn-in, then frozen.
    pub step_scale: f64,
    pub seed: u64,
    pub chains: usize,
    pub observables: Vec<Observable>,
    pub dirac_stride: u64,
    /// Record a trace row on every recorded state.
    pub record_trace: bool,
}

impl SamplerConfig {
    pub fn new(n: usize, signature: Signature, point: CouplingPoint) -> Self {
        SamplerConfig {
            n,
            signature,
            point,
            steps: 200_000,
            burn_in: 20_000,
            thinning: 10,
            step_scale: 0.1,
            seed: 1,
            chains: 4,
            observables: vec![Observable::Word("AA".into())],
            dirac_stride: 50,
            record_trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n == 0 {
            return bad("n must be >= 1");
        }
        if self.steps <= self.burn_in {
            return bad("steps must exceed burn_in");
        }
        if self.step_scale.is_nan() || self.step_scale <= 0.0 {
            return bad("step_scale must be > 0");
        }
        if self.thinning == 0 || self.dirac_stride == 0 {
            return bad("thinning and dirac_stride must be >= 1");
        }
        if self.chains == 0 {
            return bad("chains must be >= 1");
        }
        self.point.require_physical()?;
        for o in &self.observables {
            match o {
                Observable::Word(w) => {
                    Word::parse(w)?;
                }
                Observable::Dirac(ell) if ell % 2 == 1 || *ell == 0 => {
                    return Err(Error::Domain(format!("Dirac moment order {ell} must be even and positive")));
                }
                Observable::Dirac(_) => {}
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub step: u64,
    pub tr_a2: f64,
    pub tr_d2: f64,
    pub tr_d4: f64,
    pub acceptance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainOutput {
    pub chain: usize,
    /// One series per configured observable.
    pub series: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    pub tuned_step_scale: f64,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

/// All chains of one run.
#[derive(Clone, Debug, Serialize)]
pub struct SampleStream {
    pub config: SamplerConfig,
    pub chains: Vec<ChainOutput>,
}

impl SampleStream {
    pub fn acceptance_rate(&self) -> f64 {
        self.chains.iter().map(|c| c.acceptance_rate).sum::<f64>() / self.chains.len() as f64
    }

    /// Warnings for chains whose acceptance left the healthy window.
    pub fn diagnostics(&self) -> Vec<String> {
        self.chains
            .iter()
            .filter(|c| c.acceptance_rate < ACCEPTANCE_WINDOW.0 || c.acceptance_rate > ACCEPTANCE_WINDOW.1)
            .map(|c| format!("chain {}: acceptance {:.3} outside [{}, {}]", c.chain, c.acceptance_rate, ACCEPTANCE_WINDOW.0, ACCEPTANCE_WINDOW.1))
            .collect()
    }

    /// `step,tr_a2,tr_d2,tr_d4,acceptance` for every chain, chains in order.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("chain,step,tr_a2,tr_d2,tr_d4,acceptance\n");
        for c in &self.chains {
            for r in &c.trace {
                out.push_str(&format!(
                    "{},{},{:.12e},{:.12e},{:.12e},{:.6}\n",
                    c.chain, r.step, r.tr_a2, r.tr_d2, r.tr_d4, r.acceptance
                ));
            }
        }
        out
    }
}

struct State {
    a: Matrix,
    b: Matrix,
    cache: Cache,
    action: f64,
}

fn word_value(w: &[Letter], a: &Matrix, b: &Matrix) -> f64 {
    let n = a.n();
    if w.is_empty() {
        return 1.0;
    }
    let pick = |l: Letter| if l == Letter::A { a } else { b };
    let mut acc = pick(w[0]).clone();
    for &l in &w[1..] {
        acc = acc.mul(pick(l));
    }
    acc.trace().re / n as f64
}

fn run_one(cfg: &SamplerConfig, chain: usize, words: &[Option<Word>]) -> ChainOutput {
    let n = cfg.n;
    let sig = cfg.signature;
    let (e1, e2) = sig.eps();
    let (t2, t4) = (cfg.point.t2_f64(), cfg.point.t4_f64());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chain as u64);

    let a = Matrix::zeros(n);
    let b = Matrix::zeros(n);
    let cache = Cache::new(&a, &b);
    let action = action_from_traces(&traces(&a, &b, &cache), n, sig, t2, t4);
    let mut st = State { a, b, cache, action };

    let mut scale = cfg.step_scale;
    let mut window_accepts = 0u64;
    let mut accepted = 0u64;
    let mut proposed = 0u64;
    let mut recorded = 0u64;
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); cfg.observables.len()];
    let mut trace = Vec::new();

    // A traceless 1x1 component is identically zero: never propose it.
    let frozen_a = n == 1 && e1 < 0;
    let frozen_b = n == 1 && e2 < 0;
    for step in 0..cfg.steps {
        let move_a = match (frozen_a, frozen_b) {
            (false, true) => true,
            (true, false) => false,
            _ => rng.random::<bool>(),
        };
        let mut h = Matrix::random_hermitian(n, &mut rng);
        // The commutator components see only the traceless part.
        if (move_a && e1 < 0) || (!move_a && e2 < 0) {
            h.project_traceless();
        }
        let (cand_a, cand_b, cand_cache) = if move_a {
            let mut x = st.a.clone();
            x.add_scaled(&h, scale);
            let c = Cache { a2: x.mul(&x), b2: st.cache.b2.clone(), ab: x.mul(&st.b) };
            (Some(x), None, c)
        } else {
            let mut y = st.b.clone();
            y.add_scaled(&h, scale);
            let c = Cache { a2: st.cache.a2.clone(), b2: y.mul(&y), ab: st.a.mul(&y) };
            (None, Some(y), c)
        };
        let new_action = {
            let a_ref = cand_a.as_ref().unwrap_or(&st.a);
            let b_ref = cand_b.as_ref().unwrap_or(&st.b);
            action_from_traces(&traces(a_ref, b_ref, &cand_cache), n, sig, t2, t4)
        };
        let delta = new_action - st.action;
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta).exp();
        if accept {
            if let Some(x) = cand_a {
                st.a = x;
            }
            if let Some(y) = cand_b {
                st.b = y;
            }
            st.cache = cand_cache;
            st.action = new_action;
        }

        if step < cfg.burn_in {
            window_accepts += accept as u64;
            if (step + 1) % 200 == 0 {
                let rate = window_accepts as f64 / 200.0;
                scale *= (2.0 * (rate - TARGET_ACCEPTANCE)).exp();
                window_accepts = 0;
            }
            continue;
        }
        proposed += 1;
        accepted += accept as u64;
        if (step - cfg.burn_in + 1) % cfg.thinning != 0 {
            continue;
        }
        let dense_now = recorded % cfg.dirac_stride == 0;
        recorded += 1;
        let mut dense: Option<Matrix> = None;
        for (i, o) in cfg.observables.iter().enumerate() {
            match o {
                Observable::Word(_) => {
                    let w = words[i].as_ref().expect("parsed word");
                    series[i].push(word_value(w.letters(), &st.a, &st.b));
                }
                Observable::Dirac(ell) if dense_now => {
                    let d = dense.get_or_insert_with(|| dirac_matrix(&st.a, &st.b, sig));
                    series[i].push(dirac_trace_power(d, *ell) / (n * n) as f64);
                }
                Observable::Dirac(_) => {}
            }
        }
        if cfg.record_trace {
            let t = traces(&st.a, &st.b, &st.cache);
            let (d2, d4) = dirac_traces(&t, n, sig);
            let nn = (n * n) as f64;
            trace.push(TraceRow {
                step: step + 1,
                tr_a2: t.a2 / n as f64,
                tr_d2: d2 / nn,
                tr_d4: d4 / nn,
                acceptance: accepted as f64 / proposed as f64,
            });
        }
    }
    ChainOutput {
        chain,
        series,
        acceptance_rate: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
        tuned_step_scale: scale,
        trace,
    }
}

/// Runs `cfg.chains` independent Metropolis chains in parallel. Chain `i`
/// uses stream `i` of a ChaCha generator seeded with `cfg.seed`, so results
/// are reproducible and independent of the thread count.
pub fn run_chain(cfg: &SamplerConfig) -> Result<SampleStream> {
    cfg.validate()?;
    let words: Vec<Option<Word>> = cfg
        .observables
        .iter()
        .map(|o| match o {
            Observable::Word(w) => Some(Word::parse(w).expect("validated")),
            Observable::Dirac(_) => None,
        })
        .collect();
    let chains = (0..cfg.chains).into_par_iter().map(|c| run_one(cfg, c, &words)).collect();
    Ok(SampleStream { config: cfg.clone(), chains })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateWithError {
    pub mean: f64,
    pub std_error: f64,
    pub n_eff: f64,
}

impl EstimateWithError {
    /// `|mean - target| <= k * std_error`.
    pub fn consistent_with(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Pooled batch means over chains: each chain's series is cut into
/// [`BATCHES_PER_CHAIN`] equal batches (remainder dropped at the front).
pub fn batch_means(per_chain: &[&[f64]]) -> Result<EstimateWithError> {
    let mut means = Vec::new();
    let mut all = Vec::new();
    for s in per_chain {
        let size = s.len() / BATCHES_PER_CHAIN;
        if size == 0 {
            continue;
        }
        let start = s.len() - size * BATCHES_PER_CHAIN;
        let used = &s[start..];
        all.extend_from_slice(used);
        for chunk in used.chunks(size) {
            means.push(chunk.iter().sum::<f64>() / size as f64);
        }
    }
    if means.len() < MIN_BATCHES {
        return Err(Error::Config(format!("only {} batches; need at least {MIN_BATCHES}", means.len())));
    }
    let b = means.len() as f64;
    let mean = means.iter().sum::<f64>() / b;
    let var_b = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let std_error = (var_b / b).sqrt();
    let n = all.len() as f64;
    let var_x = all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let n_eff = if std_error > 0.0 { (var_x / (std_error * std_error)).min(n) } else { n };
    Ok(EstimateWithError { mean, std_error, n_eff })
}

fn observable_index(stream: &SampleStream, o: &Observable) -> Result<usize> {
    stream
        .config
        .observables
        .iter()
        .position(|x| x == o)
        .ok_or_else(|| Error::Config(format!("observable {o:?} was not recorded")))
}

fn estimate(stream: &SampleStream, o: &Observable) -> Result<EstimateWithError> {
    let i = observable_index(stream, o)?;
    let series: Vec<&[f64]> = stream.chains.iter().map(|c| c.series[i].as_slice()).collect();
    batch_means(&series)
}

/// Estimate of `(1/N) tr w(A, B)`; the word must have been recorded.
pub fn estimate_moment(stream: &SampleStream, w: &Word) -> Result<EstimateWithError> {
    let wanted = w.to_string();
    let o = stream
        .config
        .observables
        .iter()
        .find(|o| matches!(o, Observable::Word(x) if Word::parse(x).map(|v| v.to_string()) == Ok(wanted.clone())))
        .cloned()
        .ok_or_else(|| Error::Config(format!("word {w} was not recorded")))?;
    estimate(stream, &o)
}

/// Estimate of `(1/N^2) tr D^ell`.
pub fn estimate_dirac(stream: &SampleStream, ell: u32) -> Result<EstimateWithError> {
    if ell % 2 == 1 {
        return Err(Error::Domain(format!("Dirac moment order {ell} is odd")));
    }
    estimate(stream, &Observable::Dirac(ell))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{ks_distance, MarginalCdf};

    fn cfg(n: usize, sig: Signature, t2: i64, t4: i64) -> SamplerConfig {
        let mut c = SamplerConfig::new(n, sig, CouplingPoint::from_ints(t2, t4));
        c.steps = 40_000;
        c.burn_in = 4_000;
        c.chains = 2;
        c
    }

    #[test]
    fn validation() {
        let mut c = cfg(3, Signature::S20, 1, 1);
        c.burn_in = c.steps;
        assert!(matches!(run_chain(&c), Err(Error::Config(_))));
        let mut c = cfg(3, Signature::S20, 1, 1);
        c.step_scale = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg(3, Signature::S20, 1, 1);
        c.observables.push(Observable::Dirac(3));
        assert!(matches!(c.validate(), Err(Error::Domain(_))));
        assert!(cfg(3, Signature::S20, 1, -1).validate().is_err());
    }

    #[test]
    fn same_seed_same_stream() {
        let mut c = cfg(3, Signature::S11, 1, 1);
        c.steps = 5_000;
        c.burn_in = 1_000;
        c.observables = vec![Observable::Word("AA".into()), Observable::Dirac(2)];
        let x = run_chain(&c).unwrap();
        let y = run_chain(&c).unwrap();
        for (a, b) in x.chains.iter().zip(&y.chains) {
            assert_eq!(a.series, b.series);
        }
        c.seed = 2;
        let z = run_chain(&c).unwrap();
        assert_ne!(x.chains[0].series, z.chains[0].series);
    }

    #[test]
    fn chains_differ() {
        let x = run_chain(&cfg(2, Signature::S20, 1, 1)).unwrap();
        assert_ne!(x.chains[0].series, x.chains[1].series);
    }

    #[test]
    fn odd_words_vanish_and_acceptance_is_tuned() {
        let mut c = cfg(4, Signature::S02, 1, 1);
        c.observables = vec![Observable::Word("AB".into()), Observable::Word("A".into())];
        let s = run_chain(&c).unwrap();
        let ab = estimate_moment(&s, &Word::parse("AB").unwrap()).unwrap();
        assert!(ab.consistent_with(0.0, 4.0), "{ab:?}");
        let a = estimate_moment(&s, &Word::parse("A").unwrap()).unwrap();
        assert!(a.consistent_with(0.0, 4.0), "{a:?}");
        assert!(s.diagnostics().is_empty(), "{:?}", s.diagnostics());
        assert!(matches!(estimate_dirac(&s, 3), Err(Error::Domain(_))));
        assert!(estimate_dirac(&s, 2).is_err());
    }

    #[test]
    fn second_moment_decreases_with_t2() {
        let vals: Vec<f64> = [1, 2, 4]
            .iter()
            .map(|&t2| {
                let s = run_chain(&cfg(3, Signature::S20, t2, 1)).unwrap();
                estimate_moment(&s, &Word::parse("AA").unwrap()).unwrap().mean
            })
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
    }

    #[test]
    fn one_by_one_marginals() {
        for (sig, cdf) in [
            (Signature::S11, MarginalCdf::quartic(1.0, 1.0)),
            (Signature::S20, MarginalCdf::two_scalar(1.0, 1.0)),
        ] {
            let mut c = cfg(1, sig, 1, 1);
            c.steps = 204_000;
            c.thinning = 10;
            c.observables = vec![Observable::Word("A".into())];
            let s = run_chain(&c).unwrap();
            let xs: Vec<f64> = s.chains.iter().flat_map(|c| c.series[0].iter().copied()).collect();
            let d = ks_distance(&xs, |x| cdf.eval(x));
            assert!(d < 0.03, "{sig:?}: {d}");
        }
    }

    #[test]
    fn trace_rows() {
        let mut c = cfg(2, Signature::S20, 1, 1);
        c.steps = 6_000;
        c.burn_in = 1_000;
        c.record_trace = true;
        let s = run_chain(&c).unwrap();
        let csv = s.trace_csv();
        assert!(csv.starts_with("chain,step,tr_a2,tr_d2,tr_d4,acceptance\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * 500);
        let row = &s.chains[0].trace[10];
        assert!(row.tr_d2 > 0.0 && row.tr_d4 > 0.0 && row.tr_a2 > 0.0);
    }

    #[test]
    fn batch_means_of_constant_series() {
        let xs = vec![2.0; 640];
        let e = batch_means(&[&xs]).unwrap();
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.std_error, 0.0);
        assert!(batch_means(&[&xs[..10]]).is_err());
    }
}
