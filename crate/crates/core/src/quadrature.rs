//! Gauss-Legendre quadrature on `[-1, 1]`, mapped to arbitrary intervals.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss-Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on `P_n`, starting from the
    /// Chebyshev-like initial guesses. Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                deriv = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            if dp != 0.0 {
                deriv = dp;
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs mapped onto `[a, b]`.
    pub fn points_on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.points_on(a, b).map(|(x, w)| w * f(x)).sum()
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
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 16, 32] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.points_on(0.0, 3.0).map(|(_, w)| w).sum();
            assert!((s - 3.0).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let g = GaussLegendre::new(16);
        for deg in 0..32 {
            let got = g.integrate(0.0, 1.0, |x| x.powi(deg));
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "deg {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn known_two_point_rule() {
        let g = GaussLegendre::new(2);
        let pts: Vec<_> = g.points_on(-1.0, 1.0).collect();
        let x = 1.0 / 3f64.sqrt();
        assert!((pts[0].0 + x).abs() < 1e-15 && (pts[1].0 - x).abs() < 1e-15);
        assert!((pts[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let g = GaussLegendre::new(5);
        let pts: Vec<_> = g.points_on(-1.0, 1.0).collect();
        assert!(pts[2].0.abs() < 1e-15);
        assert!((pts[2].1 - 128.0 / 225.0).abs() < 1e-14);
    }
}
