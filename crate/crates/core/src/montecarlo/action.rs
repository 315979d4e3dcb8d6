use num_complex::Complex64;

use super::matrix::Matrix;
use crate::algebra::CouplingPoint;
use crate::closedform::Signature;
use crate::error::{Error, Result};

/// Hermiticity tolerance for externally supplied matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// The traces the full action depends on.
#[derive(Clone, Copy, Debug, Default)]
pub struct Traces {
    pub a: f64,
    pub b: f64,
    pub a2: f64,
    pub b2: f64,
    pub a3: f64,
    pub b3: f64,
    pub a4: f64,
    pub b4: f64,
    pub a2b2: f64,
    pub abab: f64,
    pub ab: f64,
    pub ab2: f64,
    pub ba2: f64,
}

/// Products cached between proposals: `A^2`, `B^2`, `AB`.
#[derive(Clone, Debug)]
pub struct Cache {
    pub a2: Matrix,
    pub b2: Matrix,
    pub ab: Matrix,
}

impl Cache {
    pub fn new(a: &Matrix, b: &Matrix) -> Self {
        Cache { a2: a.mul(a), b2: b.mul(b), ab: a.mul(b) }
    }
}

pub fn traces(a: &Matrix, b: &Matrix, c: &Cache) -> Traces {
    let re = |z: Complex64| z.re;
    Traces {
        a: re(a.trace()),
        b: re(b.trace()),
        a2: re(c.a2.trace()),
        b2: re(c.b2.trace()),
        a3: re(c.a2.trace_of_product(a)),
        b3: re(c.b2.trace_of_product(b)),
        a4: c.a2.frobenius_sq(),
        b4: c.b2.frobenius_sq(),
        a2b2: re(c.a2.trace_of_product(&c.b2)),
        abab: re(c.ab.trace_of_product(&c.ab)),
        ab: re(c.ab.trace()),
        ab2: re(a.trace_of_product(&c.b2)),
        ba2: re(b.trace_of_product(&c.a2)),
    }
}

/// `(tr D^2, tr D^4)` as trace polynomials in `A` and `B`.
pub fn dirac_traces(t: &Traces, n: usize, sig: Signature) -> (f64, f64) {
    let (e1, e2) = sig.eps();
    let (e1, e2, n) = (e1 as f64, e2 as f64, n as f64);
    let d2 = 4.0 * (n * t.a2 + n * t.b2 + e1 * t.a * t.a + e2 * t.b * t.b);
    let d4 = 4.0 * n * (t.a4 + t.b4 + 4.0 * t.a2b2 - 2.0 * t.abab)
        + 4.0 * (4.0 * e1 * t.a3 * t.a + 4.0 * e2 * t.b3 * t.b + 3.0 * t.a2 * t.a2 + 3.0 * t.b2 * t.b2)
        + 16.0 * (e1 * t.ab2 * t.a + e2 * t.ba2 * t.b)
        + 8.0 * (t.a2 * t.b2 + 2.0 * e1 * e2 * t.ab * t.ab);
    (d2, d4)
}

/// `t2 tr D^2 + t4 tr D^4` from precomputed traces.
pub fn action_from_traces(t: &Traces, n: usize, sig: Signature, t2: f64, t4: f64) -> f64 {
    let (d2, d4) = dirac_traces(t, n, sig);
    t2 * d2 + t4 * d4
}

/// Full action of the signature's Dirac ensemble, written in traces of `A`
/// and `B` (all sign-dependent multi-trace terms included).
pub fn action_eval(a: &Matrix, b: &Matrix, sig: Signature, p: &CouplingPoint) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::Config(format!("matrix sizes differ: {} vs {}", a.n(), b.n())));
    }
    a.require_hermitian(HERMITICITY_TOL)?;
    b.require_hermitian(HERMITICITY_TOL)?;
    let t = traces(a, b, &Cache::new(a, b));
    Ok(action_from_traces(&t, a.n(), sig, p.t2_f64(), p.t4_f64()))
}

/// Dense Dirac operator on `C^2 (x) M_N(C)`, of size `2 N^2`:
/// `sigma_3 (x) X + sigma_1 (x) Y` with `X = {A, .}` or `[A, .]` according to
/// the signature, likewise `Y` for `B`. With row-major vectorization,
/// `M -> A M` is `A (x) I` and `M -> M A` is `I (x) A^T`.
pub fn dirac_matrix(a: &Matrix, b: &Matrix, sig: Signature) -> Matrix {
    let n = a.n();
    let id = Matrix::identity(n);
    let (e1, e2) = sig.eps();
    let side = |m: &Matrix, e: i32| {
        let mut out = m.kron(&id);
        out.add_scaled(&id.kron(&m.transpose()), e as f64);
        out
    };
    let x = side(a, e1);
    let y = side(b, e2);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let sigma3 = Matrix::from_rows(&[vec![one, zero], vec![zero, -one]]);
    let sigma1 = Matrix::from_rows(&[vec![zero, one], vec![one, zero]]);
    sigma3.kron(&x).add(&sigma1.kron(&y))
}

/// `tr D^ell` by repeated dense multiplication (`ell` even).
pub fn dirac_trace_power(d: &Matrix, ell: u32) -> f64 {
    assert!(ell % 2 == 0 && ell >= 2, "ell must be even and positive");
    let d2 = d.mul(d);
    match ell {
        2 => d2.trace().re,
        4 => d2.frobenius_sq(),
        _ => {
            let half = ell / 2;
            // tr D^ell = tr (D^{ell/2})^2 for Hermitian D.
            let mut p = d2.clone();
            let mut k = 2;
            while k < half {
                p = p.mul(d);
                k += 1;
            }
            p.frobenius_sq()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point(t2: i64, t4: i64) -> CouplingPoint {
        CouplingPoint::from_ints(t2, t4)
    }

    #[test]
    fn zero_matrices_have_zero_action() {
        let z = Matrix::zeros(3);
        for sig in Signature::ALL {
            assert_eq!(action_eval(&z, &z, sig, &point(1, 1)).unwrap(), 0.0);
        }
    }

    #[test]
    fn scalar_case() {
        let x = 0.7;
        let a = Matrix::from_real_diagonal(&[x]);
        let b = Matrix::zeros(1);
        let p = CouplingPoint::new(Q::new(3.into(), 2.into()), Q::new(5.into(), 4.into()));
        let s = action_eval(&a, &b, Signature::S20, &p).unwrap();
        let expected = 8.0 * 1.5 * x * x + 32.0 * 1.25 * x.powi(4);
        assert!((s - expected).abs() < 1e-12);
    }

    #[test]
    fn matches_dense_dirac_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for sig in Signature::ALL {
            for n in [1, 2, 3] {
                let a = Matrix::random_hermitian(n, &mut rng);
                let b = Matrix::random_hermitian(n, &mut rng);
                let d = dirac_matrix(&a, &b, sig);
                assert!(d.hermiticity_defect() < 1e-12);
                let dense = 1.3 * dirac_trace_power(&d, 2) + 0.7 * dirac_trace_power(&d, 4);
                let p = CouplingPoint::new(Q::new(13.into(), 10.into()), Q::new(7.into(), 10.into()));
                let s = action_eval(&a, &b, sig, &p).unwrap();
                assert!((s - dense).abs() < 1e-9 * dense.abs().max(1.0), "{sig} n={n}: {s} vs {dense}");
            }
        }
    }

    #[test]
    fn sixth_power_via_repeated_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Matrix::random_hermitian(2, &mut rng);
        let b = Matrix::random_hermitian(2, &mut rng);
        let d = dirac_matrix(&a, &b, Signature::S11);
        let d3 = d.mul(&d).mul(&d);
        let expected = d3.mul(&d3).trace().re;
        assert!((dirac_trace_power(&d, 6) - expected).abs() < 1e-9 * expected.abs());
    }

    #[test]
    fn symmetric_signatures_are_swap_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = Matrix::random_hermitian(4, &mut rng);
        let b = Matrix::random_hermitian(4, &mut rng);
        for sig in [Signature::S20, Signature::S02] {
            let x = action_eval(&a, &b, sig, &point(1, 1)).unwrap();
            let y = action_eval(&b, &a, sig, &point(1, 1)).unwrap();
            assert!((x - y).abs() < 1e-9 * x.abs());
        }
    }

    #[test]
    fn commutator_components_ignore_the_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Matrix::random_hermitian(3, &mut rng);
        let b = Matrix::random_hermitian(3, &mut rng);
        let mut shifted = b.clone();
        shifted.add_scaled(&Matrix::identity(3), 0.8);
        let x = action_eval(&a, &b, Signature::S11, &point(1, 1)).unwrap();
        let y = action_eval(&a, &shifted, Signature::S11, &point(1, 1)).unwrap();
        assert!((x - y).abs() < 1e-9 * x.abs());
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let mut a = Matrix::zeros(2);
        a.set(0, 1, Complex64::new(1.0, 0.0));
        let b = Matrix::zeros(2);
        assert!(matches!(action_eval(&a, &b, Signature::S20, &point(1, 1)), Err(Error::NotHermitian(_))));
    }
}
