//! Finite-difference stress analysis of a rotating disk of variable
//! thickness.
//!
//! With the stress function `Z = t r σ_r`, equilibrium and compatibility
//! combine into a second-order ODE that, after changing the independent
//! variable from `r` to the curve parameter `u`, reads
//!
//! ```text
//! C(u) Z'' + D(u) Z' + E(u) Z = F(u),   Z(0) = Z(S) = 0
//! ```
//!
//! The equation is linear in `Z`; the coefficients depend only on the
//! geometry. Central differences on a uniform `u`-grid give a tridiagonal
//! system that is solved directly.

use serde::{Deserialize, Serialize};

use crate::bspline::ProfileCurve;
use crate::error::{FlywheelError, Result};
use crate::model::FlywheelSpec;

/// Parameter step used when none is configured.
pub const DEFAULT_STEP: f64 = 0.01;

/// Difference formula for `dZ/du` at the two boundary nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryStencil {
    /// Three-point one-sided differences, `O(h²)`.
    #[default]
    SecondOrder,
    /// Two-point forward/backward differences, `O(h)`.
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Grid spacing in `u`; must divide the parameter span evenly.
    pub step: f64,
    pub boundary_stencil: BoundaryStencil,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            boundary_stencil: BoundaryStencil::default(),
        }
    }
}

/// Coefficients of the parametric stress-function ODE at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCoefficients {
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

/// Geometry of the profile at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LocalGeometry {
    r: f64,
    dr: f64,
    d2r: f64,
    t: f64,
    dt: f64,
}

impl LocalGeometry {
    fn check(&self, u: f64) -> Result<()> {
        if !(self.dr > 0.0) {
            return Err(FlywheelError::Geometry(format!(
                "profile not monotone: dr/du = {} at u = {u}",
                self.dr
            )));
        }
        if !(self.t > 0.0) {
            return Err(FlywheelError::Geometry(format!(
                "thickness must be positive, got t = {} at u = {u}",
                self.t
            )));
        }
        Ok(())
    }

    fn coefficients(&self, spec: &FlywheelSpec) -> OdeCoefficients {
        let LocalGeometry { r, dr, d2r, t, dt } = *self;
        let nu = spec.poisson_ratio;
        let w2 = spec.angular_velocity * spec.angular_velocity;
        let dr2 = dr * dr;
        let dr3 = dr2 * dr;
        OdeCoefficients {
            c: r * r * dr,
            d: r * dr2 - r * r * d2r - r * r / t * dr * dt,
            e: nu * r / t * dt * dr2 - dr3,
            f: -(3.0 + nu) * spec.density * w2 * t * r * r * r * dr3,
        }
    }
}

/// ODE coefficients for `curve` at parameter `u`.
pub fn ode_coefficients(
    curve: &ProfileCurve,
    spec: &FlywheelSpec,
    u: f64,
) -> Result<OdeCoefficients> {
    let (r, t) = curve.eval(u)?;
    let d = curve.eval_derivatives(u)?;
    let geom = LocalGeometry {
        r,
        dr: d.dr,
        d2r: d.d2r,
        t,
        dt: d.dt,
    };
    geom.check(u)?;
    Ok(geom.coefficients(spec))
}

/// Nodal solution of the stress problem. Stresses are in Pa, `z` in N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressField {
    pub u: Vec<f64>,
    pub radius: Vec<f64>,
    pub thickness: Vec<f64>,
    pub z: Vec<f64>,
    pub sigma_r: Vec<f64>,
    pub sigma_theta: Vec<f64>,
    pub sigma_vm: Vec<f64>,
}

impl StressField {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn max_von_mises(&self) -> f64 {
        max_von_mises(self)
    }
}

/// Von Mises stress under plane biaxial stress.
pub fn von_mises(sigma_r: f64, sigma_theta: f64) -> f64 {
    (sigma_r * sigma_r + sigma_theta * sigma_theta - sigma_r * sigma_theta)
        .max(0.0)
        .sqrt()
}

/// Largest nodal Von Mises stress; 0 for an empty field.
pub fn max_von_mises(field: &StressField) -> f64 {
    field.sigma_vm.iter().copied().fold(0.0, f64::max)
}

/// Uniform grid over the parameter domain with the radius geometry and the
/// thickness basis weights precomputed at every node.
///
/// Radii are fixed, so one grid serves every thickness vector evaluated by
/// the optimizer.
#[derive(Debug, Clone)]
pub struct StressGrid {
    step: f64,
    u: Vec<f64>,
    r: Vec<f64>,
    dr: Vec<f64>,
    d2r: Vec<f64>,
    first: Vec<usize>,
    weights: Vec<Vec<f64>>,
    dweights: Vec<Vec<f64>>,
    n_control: usize,
}

impl StressGrid {
    pub fn new(radii: &[f64], order: usize, step: f64) -> Result<Self> {
        let curve = ProfileCurve::from_coordinates(radii.to_vec(), vec![0.0; radii.len()], order)?;
        let span = curve.span();
        if !(step > 0.0 && step.is_finite()) {
            return Err(FlywheelError::Parameter(format!("step must be positive, got {step}")));
        }
        let intervals = (span / step).round();
        if intervals < 2.0 || (intervals * step - span).abs() > 1e-9 * span {
            return Err(FlywheelError::Parameter(format!(
                "step {step} must divide the parameter span {span} into at least two equal intervals"
            )));
        }
        let intervals = intervals as usize;

        let nodes = intervals + 1;
        let mut grid = Self {
            step: span / intervals as f64,
            u: Vec::with_capacity(nodes),
            r: Vec::with_capacity(nodes),
            dr: Vec::with_capacity(nodes),
            d2r: Vec::with_capacity(nodes),
            first: Vec::with_capacity(nodes),
            weights: Vec::with_capacity(nodes),
            dweights: Vec::with_capacity(nodes),
            n_control: radii.len(),
        };
        for j in 0..nodes {
            let u = if j == intervals {
                span
            } else {
                span * j as f64 / intervals as f64
            };
            let basis = curve.active_basis(u, 2)?;
            let dr = basis.combine(1, |i| radii[i]);
            if !(dr > 0.0) {
                return Err(FlywheelError::Geometry(format!(
                    "profile not monotone: dr/du = {dr} at u = {u}"
                )));
            }
            grid.u.push(u);
            grid.r.push(basis.combine(0, |i| radii[i]));
            grid.dr.push(dr);
            grid.d2r.push(basis.combine(2, |i| radii[i]));
            grid.first.push(basis.first);
            let mut derivs = basis.derivs.into_iter();
            grid.weights.push(derivs.next().unwrap_or_default());
            grid.dweights.push(derivs.next().unwrap_or_default());
        }
        Ok(grid)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.u
    }

    fn thickness_at(&self, j: usize, x: &[f64]) -> (f64, f64) {
        let base = self.first[j];
        let t = self.weights[j].iter().enumerate().map(|(i, w)| w * x[base + i]).sum();
        let dt = self.dweights[j].iter().enumerate().map(|(i, w)| w * x[base + i]).sum();
        (t, dt)
    }

    /// Solves for the stress field of the profile with control thicknesses `x`.
    pub fn solve(
        &self,
        x: &[f64],
        spec: &FlywheelSpec,
        stencil: BoundaryStencil,
    ) -> Result<StressField> {
        if x.len() != self.n_control {
            return Err(FlywheelError::Parameter(format!(
                "{} thicknesses for {} control points",
                x.len(),
                self.n_control
            )));
        }
        let nodes = self.u.len();
        let last = nodes - 1;
        let h = self.step;

        let mut thickness = Vec::with_capacity(nodes);
        let mut lower = vec![0.0; nodes];
        let mut diag = vec![1.0; nodes];
        let mut upper = vec![0.0; nodes];
        let mut rhs = vec![0.0; nodes];
        for j in 0..nodes {
            let (t, dt) = self.thickness_at(j, x);
            let geom = LocalGeometry {
                r: self.r[j],
                dr: self.dr[j],
                d2r: self.d2r[j],
                t,
                dt,
            };
            geom.check(self.u[j])?;
            thickness.push(t);
            if j == 0 || j == last {
                // Z = 0: radial stress vanishes at both rims
                continue;
            }
            let k = geom.coefficients(spec);
            let second = k.c / (h * h);
            let first = k.d / (2.0 * h);
            lower[j] = second - first;
            diag[j] = -2.0 * second + k.e;
            upper[j] = second + first;
            rhs[j] = k.f;
        }
        let z = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;

        let w2 = spec.angular_velocity * spec.angular_velocity;
        let mut sigma_r = Vec::with_capacity(nodes);
        let mut sigma_theta = Vec::with_capacity(nodes);
        let mut sigma_vm = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let dz = match (j, stencil) {
                (0, BoundaryStencil::FirstOrder) => (z[1] - z[0]) / h,
                (0, BoundaryStencil::SecondOrder) => (-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * h),
                (j, BoundaryStencil::FirstOrder) if j == last => (z[last] - z[last - 1]) / h,
                (j, BoundaryStencil::SecondOrder) if j == last => {
                    (3.0 * z[last] - 4.0 * z[last - 1] + z[last - 2]) / (2.0 * h)
                }
                (j, _) => (z[j + 1] - z[j - 1]) / (2.0 * h),
            };
            let (r, t) = (self.r[j], thickness[j]);
            let sr = z[j] / (t * r);
            let st = (dz / self.dr[j] + spec.density * r * r * w2 * t) / t;
            sigma_r.push(sr);
            sigma_theta.push(st);
            sigma_vm.push(von_mises(sr, st));
        }
        if let Some(j) = sigma_vm.iter().position(|s| !s.is_finite()) {
            return Err(FlywheelError::Numerical(format!(
                "non-finite stress at node {j} (u = {})",
                self.u[j]
            )));
        }

        Ok(StressField {
            u: self.u.clone(),
            radius: self.r.clone(),
            thickness,
            z,
            sigma_r,
            sigma_theta,
            sigma_vm,
        })
    }
}

/// Builds a grid for `curve` and solves for its stress field.
pub fn assemble_and_solve(
    curve: &ProfileCurve,
    spec: &FlywheelSpec,
    settings: &SolverSettings,
) -> Result<StressField> {
    StressGrid::new(curve.radii(), curve.order(), settings.step)?.solve(
        curve.thicknesses(),
        spec,
        settings.boundary_stencil,
    )
}

/// Thomas algorithm for `lower[j] x[j-1] + diag[j] x[j] + upper[j] x[j+1] = rhs[j]`.
/// `lower[0]` and `upper[n-1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let scale = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let mut pivot = diag[0];
    for j in 0..n {
        if j > 0 {
            pivot = diag[j] - lower[j] * c[j - 1];
        }
        if !(pivot.abs() > 1e-14 * scale) {
            return Err(FlywheelError::Numerical(format!(
                "tridiagonal system singular at row {j} (pivot {pivot:e})"
            )));
        }
        c[j] = upper[j] / pivot;
        x[j] = (rhs[j] - if j > 0 { lower[j] * x[j - 1] } else { 0.0 }) / pivot;
    }
    for j in (0..n.saturating_sub(1)).rev() {
        x[j] -= c[j] * x[j + 1];
    }
    Ok(x)
}
