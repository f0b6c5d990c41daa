//! Nonperiodic (clamped) B-spline curves mapping a parameter `u` to a
//! `(radius, thickness)` pair.
//!
//! Indexing is 0-based throughout: control point `i` pairs with basis
//! function `N_{i,k}` and the knot vector has `n + k` entries. Reports that
//! want the conventional 1-based labels add one at the edge.
//!
//! Two evaluation routes exist. [`basis`] is the plain Cox-de Boor
//! recursion and is kept as the reference definition; curve evaluation goes
//! through [`ProfileCurve::active_basis`], the triangular-table scheme that
//! yields the `k` non-zero basis functions and their derivatives at once.

use crate::error::{FlywheelError, Result};

/// Knot vector of a nonperiodic B-spline with `n` control points and order `k`.
///
/// The first `k` knots are 0, interior knots step by one and the last `k`
/// knots equal `S = n - k + 1`.
pub fn knot_vector(n: usize, k: usize) -> Result<Vec<f64>> {
    if k < 2 || n < k {
        return Err(FlywheelError::Parameter(format!(
            "knot vector needs n >= k >= 2, got n = {n}, k = {k}"
        )));
    }
    Ok((0..n + k)
        .map(|i| {
            if i < k {
                0.0
            } else if i <= n {
                (i + 1 - k) as f64
            } else {
                (n + 1 - k) as f64
            }
        })
        .collect())
}

fn check_domain(knots: &[f64], u: f64) -> Result<()> {
    let lo = knots[0];
    let hi = knots[knots.len() - 1];
    if !(lo..=hi).contains(&u) {
        return Err(FlywheelError::Domain { u, lo, hi });
    }
    Ok(())
}

/// Value of `N_{i,k}(u)` by the Cox-de Boor recursion.
///
/// Terms with a zero-width denominator contribute 0. Order-1 functions are
/// indicators of half-open intervals `[v_i, v_{i+1})`, except the last
/// non-empty interval, which is closed so that `u = S` is covered.
pub fn basis(knots: &[f64], i: usize, k: usize, u: f64) -> Result<f64> {
    if k == 0 || i + k >= knots.len() {
        return Err(FlywheelError::Parameter(format!(
            "basis index {i} of order {k} needs knots up to index {}, have {}",
            i + k,
            knots.len()
        )));
    }
    check_domain(knots, u)?;
    Ok(cox_de_boor(knots, i, k, u))
}

fn cox_de_boor(knots: &[f64], i: usize, k: usize, u: f64) -> f64 {
    if k == 1 {
        let end = knots[knots.len() - 1];
        let (a, b) = (knots[i], knots[i + 1]);
        let inside = (a <= u && u < b) || (u == end && a < b && b == end);
        return if inside { 1.0 } else { 0.0 };
    }
    let mut value = 0.0;
    let left = knots[i + k - 1] - knots[i];
    if left != 0.0 {
        value += (u - knots[i]) / left * cox_de_boor(knots, i, k - 1, u);
    }
    let right = knots[i + k] - knots[i + 1];
    if right != 0.0 {
        value += (knots[i + k] - u) / right * cox_de_boor(knots, i + 1, k - 1, u);
    }
    value
}

/// The `k` basis functions that may be non-zero at a parameter, with their
/// derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveBasis {
    /// Index of the first active basis function.
    pub first: usize,
    /// `derivs[d][j]` is the `d`-th derivative of `N_{first + j, k}`.
    pub derivs: Vec<Vec<f64>>,
}

impl ActiveBasis {
    /// Order-`d` derivative of `Σ N_i c_i` for coefficients `c`.
    pub fn combine(&self, d: usize, coeffs: impl Fn(usize) -> f64) -> f64 {
        self.derivs[d]
            .iter()
            .enumerate()
            .map(|(j, w)| w * coeffs(self.first + j))
            .sum()
    }
}

/// First and second parametric derivatives of a profile curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveDerivatives {
    pub dr: f64,
    pub dt: f64,
    pub d2r: f64,
    pub d2t: f64,
}

/// Clamped B-spline over control points `(r_i, t_i)` with strictly
/// increasing radii.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    radii: Vec<f64>,
    thicknesses: Vec<f64>,
    order: usize,
    knots: Vec<f64>,
}

impl ProfileCurve {
    pub fn new(control_points: &[(f64, f64)], order: usize) -> Result<Self> {
        let (radii, thicknesses): (Vec<f64>, Vec<f64>) = control_points.iter().copied().unzip();
        Self::from_coordinates(radii, thicknesses, order)
    }

    pub fn from_coordinates(radii: Vec<f64>, thicknesses: Vec<f64>, order: usize) -> Result<Self> {
        if radii.len() != thicknesses.len() {
            return Err(FlywheelError::Parameter(format!(
                "{} radii but {} thicknesses",
                radii.len(),
                thicknesses.len()
            )));
        }
        let knots = knot_vector(radii.len(), order)?;
        if radii.iter().chain(&thicknesses).any(|v| !v.is_finite()) {
            return Err(FlywheelError::Parameter("control points must be finite".into()));
        }
        if let Some(w) = radii.windows(2).find(|w| w[1] <= w[0]) {
            return Err(FlywheelError::Geometry(format!(
                "control radii must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(Self {
            radii,
            thicknesses,
            order,
            knots,
        })
    }

    /// Cubic curve (order 4).
    pub fn cubic(radii: Vec<f64>, thicknesses: Vec<f64>) -> Result<Self> {
        Self::from_coordinates(radii, thicknesses, 4)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn thicknesses(&self) -> &[f64] {
        &self.thicknesses
    }

    /// Upper end `S` of the parameter domain.
    pub fn span(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Number of polynomial segments, `n - k + 1`.
    pub fn segment_count(&self) -> usize {
        self.len() + 1 - self.order
    }

    /// Index `s` with `v_s <= u < v_{s+1}`; `u = S` maps to the last
    /// non-empty interval.
    fn knot_interval(&self, u: f64) -> usize {
        let n = self.len();
        let last = n - 1;
        if u >= self.knots[n] {
            return last;
        }
        // knots[order-1..=n] are strictly increasing for a clamped vector
        let mut lo = self.order - 1;
        let mut hi = n;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if u < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Non-zero basis functions at `u` and their derivatives up to `max_deriv`.
    pub fn active_basis(&self, u: f64, max_deriv: usize) -> Result<ActiveBasis> {
        check_domain(&self.knots, u)?;
        let span = self.knot_interval(u);
        let p = self.order - 1;
        let knots = &self.knots;

        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = u - knots[span + 1 - j];
            right[j] = knots[span + j] - u;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut derivs = vec![vec![0.0; p + 1]; max_deriv + 1];
        for j in 0..=p {
            derivs[0][j] = ndu[j][p];
        }
        let nd = max_deriv.min(p);
        let mut a = [vec![0.0; p + 1], vec![0.0; p + 1]];
        for r in 0..=p {
            let (mut s1, mut s2) = (0, 1);
            a[0][0] = 1.0;
            for k in 1..=nd {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                derivs[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for (k, row) in derivs.iter_mut().enumerate().take(nd + 1).skip(1) {
            for v in row.iter_mut() {
                *v *= factor;
            }
            factor *= (p - k) as f64;
        }

        Ok(ActiveBasis {
            first: span + 1 - self.order,
            derivs,
        })
    }

    /// All `n` basis function values at `u`.
    pub fn basis_values(&self, u: f64) -> Result<Vec<f64>> {
        let active = self.active_basis(u, 0)?;
        let mut values = vec![0.0; self.len()];
        for (j, v) in active.derivs[0].iter().enumerate() {
            values[active.first + j] = *v;
        }
        Ok(values)
    }

    /// Point `(r(u), t(u))` on the curve.
    pub fn eval(&self, u: f64) -> Result<(f64, f64)> {
        let b = self.active_basis(u, 0)?;
        Ok((
            b.combine(0, |i| self.radii[i]),
            b.combine(0, |i| self.thicknesses[i]),
        ))
    }

    /// `count` evenly spaced samples `(u, r, t)` from `u = 0` to `u = S`.
    pub fn sample(&self, count: usize) -> Result<Vec<(f64, f64, f64)>> {
        if count < 2 {
            return Err(FlywheelError::Parameter(format!(
                "need at least two samples, got {count}"
            )));
        }
        let span = self.span();
        (0..count)
            .map(|i| {
                let u = if i == count - 1 {
                    span
                } else {
                    span * i as f64 / (count - 1) as f64
                };
                self.eval(u).map(|(r, t)| (u, r, t))
            })
            .collect()
    }

    pub fn eval_derivatives(&self, u: f64) -> Result<CurveDerivatives> {
        let b = self.active_basis(u, 2)?;
        Ok(CurveDerivatives {
            dr: b.combine(1, |i| self.radii[i]),
            dt: b.combine(1, |i| self.thicknesses[i]),
            d2r: b.combine(2, |i| self.radii[i]),
            d2t: b.combine(2, |i| self.thicknesses[i]),
        })
    }
}
