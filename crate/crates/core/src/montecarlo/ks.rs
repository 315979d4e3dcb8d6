//! Reference distributions for the `N = 1` ensembles.
//!
//! At `N = 1` the (2,0) action reduces to `8 t2 r^2 + 32 t4 r^4` with
//! `r^2 = x^2 + y^2` in the scalars `x = A`, `y = B`. For a signature whose
//! second component enters through a commutator, `B` is traceless and hence
//! zero at `N = 1`, leaving the one-dimensional weight
//! `exp(-8 t2 x^2 - 32 t4 x^4)`.

/// Tabulated CDF of a symmetric density on a uniform grid.
pub struct MarginalCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    density: Vec<f64>,
}

fn energy(t2: f64, t4: f64, r2: f64) -> f64 {
    8.0 * t2 * r2 + 32.0 * t4 * r2 * r2
}

/// Radius beyond which the weight is below e^-60.
fn cutoff(t2: f64, t4: f64) -> f64 {
    let mut l = 1.0;
    while energy(t2, t4, l * l) < 60.0 {
        l *= 1.5;
    }
    l
}

impl MarginalCdf {
    /// `exp(-8 t2 x^2 - 32 t4 x^4)`.
    pub fn quartic(t2: f64, t4: f64) -> Self {
        Self::tabulate(cutoff(t2, t4), |x| (-energy(t2, t4, x * x)).exp())
    }

    /// The `x`-marginal of `exp(-8 t2 r^2 - 32 t4 r^4)`, `y` integrated out
    /// by Simpson's rule.
    pub fn two_scalar(t2: f64, t4: f64) -> Self {
        let l = cutoff(t2, t4);
        let ny = 2000;
        let hy = 2.0 * l / ny as f64;
        Self::tabulate(l, |x| {
            (0..=ny)
                .map(|j| {
                    let y = -l + j as f64 * hy;
                    let w = if j == 0 || j == ny { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                    w * (-energy(t2, t4, x * x + y * y)).exp()
                })
                .sum::<f64>()
                * hy
                / 3.0
        })
    }

    fn tabulate<F: Fn(f64) -> f64>(l: f64, f: F) -> Self {
        let m = 4001;
        let h = 2.0 * l / (m - 1) as f64;
        let xs: Vec<f64> = (0..m).map(|i| -l + i as f64 * h).collect();
        let density: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let mut cdf = vec![0.0; m];
        for i in 1..m {
            cdf[i] = cdf[i - 1] + 0.5 * h * (density[i] + density[i - 1]);
        }
        let total = cdf[m - 1];
        for c in &mut cdf {
            *c /= total;
        }
        let density = density.into_iter().map(|d| d / total).collect();
        MarginalCdf { xs, cdf, density }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = (self.xs[0], *self.xs.last().expect("nonempty"));
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let h = self.xs[1] - self.xs[0];
        let i = ((x - lo) / h) as usize;
        let f = (x - self.xs[i]) / h;
        // Integrate the linearly interpolated density inside the cell.
        let (d0, d1) = (self.density[i], self.density[i + 1]);
        (self.cdf[i] + h * f * (d0 + 0.5 * (d1 - d0) * f)).min(1.0)
    }
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
