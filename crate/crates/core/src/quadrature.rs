//! Composite Gauss-Legendre quadrature on equal panels.

use rayon::prelude::*;

use crate::phase::pairwise_sum;

/// Nodes per panel.
pub const PANEL_ORDER: usize = 10;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`, nodes found by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        s * half
    }

    /// Integral over `[a, b]` split into `panels` equal pieces. Panels run in
    /// parallel and are combined by pairwise summation in panel order.
    pub fn composite<F>(&self, a: f64, b: f64, panels: usize, f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let parts: Vec<f64> = (0..panels)
            .into_par_iter()
            .map(|i| {
                let lo = a + i as f64 * width;
                let hi = if i + 1 == panels { b } else { lo + width };
                self.integrate(lo, hi, &f)
            })
            .collect();
        pairwise_sum(&parts)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in 1..=20 {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(PANEL_ORDER);
        for deg in 0..(2 * PANEL_ORDER) as i32 {
            let got = g.integrate(0.0, 1.0, |x| x.powi(deg));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn composite_resolves_oscillation() {
        let g = GaussLegendre::new(PANEL_ORDER);
        let got = g.composite(0.0, 100.0, 400, |x| (7.0 * x).cos());
        let exact = (700.0f64).sin() / 7.0;
        assert!((got - exact).abs() < 1e-12);
    }
}
