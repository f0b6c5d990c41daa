//! Flywheel geometry, mass and kinetic energy.
//!
//! Control radii are fixed by the spec, so `r(u)` does not depend on the
//! design. Mass and kinetic energy are then linear in the thickness vector
//! and reduce to dot products with coefficient vectors that are integrated
//! once per spec.

use std::f64::consts::PI;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::bspline::ProfileCurve;
use crate::error::{FlywheelError, Result};
use crate::quadrature::GaussLegendre;

/// B-spline order used for the flywheel profile (cubic).
pub const PROFILE_ORDER: usize = 4;

/// Gauss-Legendre points per segment; the integrands are polynomials of
/// degree at most 15 in `u`, so 16 points integrate them exactly.
pub const DEFAULT_QUADRATURE_POINTS: usize = 16;

/// Material, geometry, operating point and limits, all in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlywheelSpec {
    /// kg/m³
    pub density: f64,
    /// Pa
    pub elastic_modulus: f64,
    pub poisson_ratio: f64,
    /// m
    pub inner_radius: f64,
    /// m
    pub outer_radius: f64,
    /// rad/s
    pub angular_velocity: f64,
    /// kg
    pub max_mass: f64,
    /// Pa
    pub allowable_stress: f64,
    pub n_control_points: usize,
}

impl FlywheelSpec {
    /// Grey cast iron thresher flywheel: 8 control points between 0.06 m and
    /// 0.5 m at 65.45 rad/s, 115 kg and 6.4 N/mm² limits.
    pub fn thresher() -> Self {
        Self {
            density: 7250.0,
            elastic_modulus: 210e9,
            poisson_ratio: 0.3,
            inner_radius: 0.06,
            outer_radius: 0.5,
            angular_velocity: 65.45,
            max_mass: 115.0,
            allowable_stress: 6.4e6,
            n_control_points: 8,
        }
    }

    /// Checks the physical invariants. Zero density or speed are accepted so
    /// that degenerate cases can be analysed.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(FlywheelError::Parameter(msg));
        let finite = [
            self.density,
            self.elastic_modulus,
            self.poisson_ratio,
            self.inner_radius,
            self.outer_radius,
            self.angular_velocity,
            self.max_mass,
            self.allowable_stress,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("all spec values must be finite".into());
        }
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius) {
            return fail(format!(
                "radii must satisfy 0 < R1 < R2, got R1 = {}, R2 = {}",
                self.inner_radius, self.outer_radius
            ));
        }
        if self.density < 0.0 {
            return fail(format!("density must be non-negative, got {}", self.density));
        }
        if self.angular_velocity < 0.0 {
            return fail(format!(
                "angular velocity must be non-negative, got {}",
                self.angular_velocity
            ));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return fail(format!(
                "Poisson ratio must lie in [0, 0.5), got {}",
                self.poisson_ratio
            ));
        }
        if self.max_mass <= 0.0 || self.allowable_stress <= 0.0 {
            return fail("mass and stress limits must be positive".into());
        }
        if self.n_control_points < PROFILE_ORDER {
            return fail(format!(
                "need at least {PROFILE_ORDER} control points, got {}",
                self.n_control_points
            ));
        }
        Ok(())
    }
}

/// Equally spaced control radii from `R1` to `R2`.
pub fn control_radii(spec: &FlywheelSpec) -> Vec<f64> {
    let n = spec.n_control_points;
    if n < 2 {
        return vec![spec.inner_radius; n];
    }
    let width = spec.outer_radius - spec.inner_radius;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                spec.outer_radius
            } else {
                spec.inner_radius + width * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Thicknesses `[t_1, ..., t_n]` of the control points, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignVector(pub Vec<f64>);

impl DesignVector {
    pub fn uniform(n: usize, thickness: f64) -> Self {
        Self(vec![thickness; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for DesignVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for DesignVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// `factor * ∫ N_i(u) g(r(u)) r'(u) du` for each control point `i`.
fn linear_coefficients(
    spec: &FlywheelSpec,
    points_per_segment: usize,
    factor: f64,
    radial_weight: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if points_per_segment == 0 {
        return Err(FlywheelError::Parameter("quadrature needs at least one point".into()));
    }
    let n = spec.n_control_points;
    let curve = ProfileCurve::from_coordinates(control_radii(spec), vec![0.0; n], PROFILE_ORDER)?;
    let rule = GaussLegendre::new(points_per_segment);
    let mut breaks: Vec<f64> = curve.knots().to_vec();
    breaks.dedup();

    let mut coeffs = vec![0.0; n];
    for seg in breaks.windows(2) {
        for (u, w) in rule.points_on(seg[0], seg[1]) {
            let basis = curve.active_basis(u, 1)?;
            let r = basis.combine(0, |i| curve.radii()[i]);
            let dr = basis.combine(1, |i| curve.radii()[i]);
            let g = w * radial_weight(r) * dr;
            for (j, nij) in basis.derivs[0].iter().enumerate() {
                coeffs[basis.first + j] += nij * g;
            }
        }
    }
    for c in &mut coeffs {
        *c *= factor;
    }
    if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
        return Err(FlywheelError::Numerical(format!(
            "coefficient {} is not finite ({})",
            i + 1,
            coeffs[i]
        )));
    }
    Ok(coeffs)
}

/// Coefficients `a` with `M = Σ a_i t_i` (kg per meter of thickness).
pub fn mass_coefficients(spec: &FlywheelSpec, points_per_segment: usize) -> Result<Vec<f64>> {
    linear_coefficients(spec, points_per_segment, 2.0 * PI * spec.density, |r| r)
}

/// Coefficients `b` with `E_k = Σ b_i t_i` (J per meter of thickness).
pub fn energy_coefficients(spec: &FlywheelSpec, points_per_segment: usize) -> Result<Vec<f64>> {
    let w = spec.angular_velocity;
    linear_coefficients(spec, points_per_segment, PI * spec.density * w * w, |r| r * r * r)
}

/// Coefficients at the default resolution, cross-checked against a rule of
/// twice the size.
fn converged_coefficients(
    spec: &FlywheelSpec,
    f: fn(&FlywheelSpec, usize) -> Result<Vec<f64>>,
    what: &str,
) -> Result<Vec<f64>> {
    let coarse = f(spec, DEFAULT_QUADRATURE_POINTS)?;
    let fine = f(spec, 2 * DEFAULT_QUADRATURE_POINTS)?;
    let scale = fine.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (i, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        if (c - f).abs() > 1e-8 * scale.max(f64::MIN_POSITIVE) {
            return Err(FlywheelError::Numerical(format!(
                "{what} coefficient {} did not converge: {c} with {} points, {f} with {}",
                i + 1,
                DEFAULT_QUADRATURE_POINTS,
                2 * DEFAULT_QUADRATURE_POINTS
            )));
        }
    }
    Ok(coarse)
}

/// Spec together with its cached mass and energy coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FlywheelModel {
    spec: FlywheelSpec,
    radii: Vec<f64>,
    mass_coeffs: Vec<f64>,
    energy_coeffs: Vec<f64>,
}

impl FlywheelModel {
    pub fn new(spec: FlywheelSpec) -> Result<Self> {
        spec.validate()?;
        let mass_coeffs = converged_coefficients(&spec, mass_coefficients, "mass")?;
        let energy_coeffs = converged_coefficients(&spec, energy_coefficients, "energy")?;
        Ok(Self {
            radii: control_radii(&spec),
            spec,
            mass_coeffs,
            energy_coeffs,
        })
    }

    pub fn spec(&self) -> &FlywheelSpec {
        &self.spec
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn mass_coefficients(&self) -> &[f64] {
        &self.mass_coeffs
    }

    pub fn energy_coefficients(&self) -> &[f64] {
        &self.energy_coeffs
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.radii.len() {
            return Err(FlywheelError::Parameter(format!(
                "design vector has {} entries, expected {}",
                x.len(),
                self.radii.len()
            )));
        }
        Ok(())
    }

    /// Mass in kg.
    pub fn mass(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(dot(&self.mass_coeffs, x))
    }

    /// Kinetic energy in J.
    pub fn kinetic_energy(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(dot(&self.energy_coeffs, x))
    }

    /// Profile curve with the fixed control radii and the given thicknesses.
    pub fn profile(&self, x: &[f64]) -> Result<ProfileCurve> {
        self.check_len(x)?;
        ProfileCurve::from_coordinates(self.radii.clone(), x.to_vec(), PROFILE_ORDER)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_equally_spaced() {
        let r = control_radii(&FlywheelSpec::thresher());
        let want = [0.06, 0.12286, 0.18571, 0.24857, 0.31143, 0.37429, 0.43714, 0.5];
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 5e-6, "{a} vs {b}");
        }
        assert_eq!(r[0], 0.06);
        assert_eq!(r[7], 0.5);
    }

    #[test]
    fn two_radii_degenerate() {
        let spec = FlywheelSpec {
            n_control_points: 2,
            ..FlywheelSpec::thresher()
        };
        assert_eq!(control_radii(&spec), vec![0.06, 0.5]);
    }

    #[test]
    fn zero_density_and_speed() {
        let spec = FlywheelSpec {
            density: 0.0,
            ..FlywheelSpec::thresher()
        };
        assert!(mass_coefficients(&spec, 16).unwrap().iter().all(|&a| a == 0.0));
        let spec = FlywheelSpec {
            angular_velocity: 0.0,
            ..FlywheelSpec::thresher()
        };
        assert!(energy_coefficients(&spec, 16).unwrap().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn constant_thickness_totals() {
        let model = FlywheelModel::new(FlywheelSpec::thresher()).unwrap();
        let x = vec![0.02; 8];
        assert!((model.mass(&x).unwrap() - 112.24).abs() < 0.01);
        assert!((model.kinetic_energy(&x).unwrap() - 30483.66).abs() < 0.01);
        assert_eq!(model.mass(&[0.0; 8]).unwrap(), 0.0);
        assert_eq!(model.kinetic_energy(&[0.0; 8]).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch() {
        let model = FlywheelModel::new(FlywheelSpec::thresher()).unwrap();
        assert!(matches!(model.mass(&[0.02; 7]), Err(FlywheelError::Parameter(_))));
        assert!(model.kinetic_energy(&[]).is_err());
    }

    #[test]
    fn invalid_specs() {
        let base = FlywheelSpec::thresher();
        for bad in [
            FlywheelSpec { inner_radius: 0.6, ..base.clone() },
            FlywheelSpec { poisson_ratio: 0.5, ..base.clone() },
            FlywheelSpec { n_control_points: 3, ..base.clone() },
            FlywheelSpec { max_mass: 0.0, ..base.clone() },
            FlywheelSpec { density: f64::NAN, ..base.clone() },
        ] {
            assert!(FlywheelModel::new(bad).is_err());
        }
    }

    #[test]
    fn coefficients_positive() {
        let model = FlywheelModel::new(FlywheelSpec::thresher()).unwrap();
        assert!(model.mass_coefficients().iter().all(|&a| a > 0.0));
        assert!(model.energy_coefficients().iter().all(|&b| b > 0.0));
    }
}
