use quartic_dirac::closedform::{dirac_moment, Signature};
use quartic_dirac::montecarlo::{action_eval, estimate_dirac, estimate_moment, run_chain, Matrix, Observable, SamplerConfig};
use quartic_dirac::{CouplingPoint, Word};

#[test]
fn dirac_moments_at_n10_are_close_to_large_n_values() {
    let p = CouplingPoint::from_ints(1, 1);
    let mut cfg = SamplerConfig::new(10, Signature::S20, p.clone());
    cfg.steps = 80_000;
    cfg.burn_in = 20_000;
    cfg.chains = 4;
    cfg.dirac_stride = 30;
    cfg.observables = vec![Observable::Word("AB".into()), Observable::Dirac(2), Observable::Dirac(4)];
    let s = run_chain(&cfg).unwrap();
    assert!(s.diagnostics().is_empty(), "{:?}", s.diagnostics());
    for ell in [2, 4] {
        let e = estimate_dirac(&s, ell).unwrap();
        let want = dirac_moment(ell, &p).unwrap().to_f64();
        assert!(((e.mean - want) / want).abs() < 0.05, "d_{ell}: {e:?} vs {want}");
    }
    let ab = estimate_moment(&s, &Word::parse("AB").unwrap()).unwrap();
    assert!(ab.consistent_with(0.0, 4.0), "{ab:?}");
}

#[test]
fn dense_dirac_operator_reproduces_the_action() {
    // S = t2 tr D^2 + t4 tr D^4 on the dense operator.
    let p = CouplingPoint::from_ints(2, 3);
    let a = Matrix::from_real_diagonal(&[0.3, -0.1, 0.7]);
    let b = Matrix::from_real_diagonal(&[-0.4, 0.2, 0.5]);
    for sig in Signature::ALL {
        let d = quartic_dirac::montecarlo::dirac_matrix(&a, &b, sig);
        let dense = 2.0 * quartic_dirac::montecarlo::dirac_trace_power(&d, 2)
            + 3.0 * quartic_dirac::montecarlo::dirac_trace_power(&d, 4);
        let s = action_eval(&a, &b, sig, &p).unwrap();
        assert!((dense - s).abs() < 1e-10 * dense.abs().max(1.0), "{sig}: {dense} vs {s}");
    }
}
