//! JSON run configuration.
//!
//! Every section and field is optional; omitted values fall back to the
//! grey cast iron thresher flywheel. Engineering units in the file (GPa,
//! N/mm²) are converted to SI on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FlywheelError, Result};
use crate::model::FlywheelSpec;
use crate::optimizer::{PenaltyMode, ProblemConfig, RandomMode, DEFAULT_RESTARTS};
use crate::stress::SolverSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialSection {
    pub name: String,
    pub density_kg_m3: f64,
    pub elastic_modulus_gpa: f64,
    pub poisson_ratio: f64,
}

impl Default for MaterialSection {
    fn default() -> Self {
        Self {
            name: "Grey cast iron".into(),
            density_kg_m3: 7250.0,
            elastic_modulus_gpa: 210.0,
            poisson_ratio: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSection {
    pub control_points: usize,
    pub inner_radius_m: f64,
    pub outer_radius_m: f64,
    pub angular_velocity_rad_s: f64,
    pub max_mass_kg: f64,
    pub allowable_stress_n_mm2: f64,
}

impl Default for DesignSection {
    fn default() -> Self {
        Self {
            control_points: 8,
            inner_radius_m: 0.06,
            outer_radius_m: 0.5,
            angular_velocity_rad_s: 65.45,
            max_mass_kg: 115.0,
            allowable_stress_n_mm2: 6.4,
        }
    }
}

/// A bound given either once for all variables or per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bounds {
    Uniform(f64),
    PerVariable(Vec<f64>),
}

impl Bounds {
    fn expand(&self, n: usize, field: &str) -> Result<Vec<f64>> {
        match self {
            Bounds::Uniform(v) => Ok(vec![*v; n]),
            Bounds::PerVariable(v) if v.len() == n => Ok(v.clone()),
            Bounds::PerVariable(v) => Err(FlywheelError::Config(format!(
                "optimizer.{field}: {} entries for {n} control points",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub lower_bound_m: Bounds,
    pub upper_bound_m: Bounds,
    pub penalty_constant: f64,
    pub penalty_mode: PenaltyMode,
    pub population_size: usize,
    pub max_iterations: usize,
    pub max_stall_generations: usize,
    pub function_tolerance: f64,
    pub random_seed: u64,
    pub random_mode: RandomMode,
    pub restarts: usize,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            lower_bound_m: Bounds::Uniform(0.01),
            upper_bound_m: Bounds::Uniform(0.06),
            penalty_constant: 1e8,
            penalty_mode: PenaltyMode::default(),
            population_size: 1000,
            max_iterations: 500,
            max_stall_generations: 50,
            function_tolerance: 1e-6,
            random_seed: 1,
            random_mode: RandomMode::default(),
            restarts: DEFAULT_RESTARTS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub material: MaterialSection,
    pub design: DesignSection,
    pub optimizer: OptimizerSection,
    pub solver: SolverSettings,
}

impl Config {
    /// Parses and validates a configuration document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: Config = serde_json::from_str(text).map_err(|e| {
            FlywheelError::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| FlywheelError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
            .map_err(|e| FlywheelError::Config(format!("{}: {}", path.display(), strip(e))))
    }

    /// Flywheel spec in SI units.
    pub fn spec(&self) -> FlywheelSpec {
        FlywheelSpec {
            density: self.material.density_kg_m3,
            elastic_modulus: self.material.elastic_modulus_gpa * 1e9,
            poisson_ratio: self.material.poisson_ratio,
            inner_radius: self.design.inner_radius_m,
            outer_radius: self.design.outer_radius_m,
            angular_velocity: self.design.angular_velocity_rad_s,
            max_mass: self.design.max_mass_kg,
            allowable_stress: self.design.allowable_stress_n_mm2 * 1e6,
            n_control_points: self.design.control_points,
        }
    }

    pub fn problem_config(&self) -> Result<ProblemConfig> {
        let n = self.design.control_points;
        let o = &self.optimizer;
        Ok(ProblemConfig {
            lower_bounds: o.lower_bound_m.expand(n, "lower_bound_m")?,
            upper_bounds: o.upper_bound_m.expand(n, "upper_bound_m")?,
            penalty_constant: o.penalty_constant,
            penalty_mode: o.penalty_mode,
            population_size: o.population_size,
            max_iterations: o.max_iterations,
            max_stall_generations: o.max_stall_generations,
            function_tolerance: o.function_tolerance,
            random_seed: o.random_seed,
            random_mode: o.random_mode,
            restarts: o.restarts,
            threads: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()
            .validate()
            .map_err(|e| FlywheelError::Config(format!("material/design: {}", strip(e))))?;
        let problem = self.problem_config()?;
        problem
            .validate()
            .map_err(|e| FlywheelError::Config(format!("optimizer: {}", strip(e))))?;
        if let Some(lo) = problem.lower_bounds.iter().find(|&&v| v <= 0.0) {
            return Err(FlywheelError::Config(format!(
                "optimizer.lower_bound_m: thickness bounds must be positive, got {lo}"
            )));
        }
        if !(self.solver.step > 0.0) {
            return Err(FlywheelError::Config(format!(
                "solver.step: must be positive, got {}",
                self.solver.step
            )));
        }
        Ok(())
    }
}

/// Message of an error without its variant prefix.
fn strip(e: FlywheelError) -> String {
    match e {
        FlywheelError::Parameter(m)
        | FlywheelError::Geometry(m)
        | FlywheelError::Numerical(m)
        | FlywheelError::Config(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_flywheel() {
        let c = Config::from_json_str("{}").unwrap();
        assert_eq!(c.spec(), FlywheelSpec::thresher());
        let p = c.problem_config().unwrap();
        assert_eq!(p.lower_bounds, vec![0.01; 8]);
        assert_eq!(p.upper_bounds, vec![0.06; 8]);
        assert_eq!(p.population_size, 1000);
        assert_eq!(p.max_stall_generations, 50);
        assert_eq!(p.function_tolerance, 1e-6);
        assert_eq!(p.penalty_constant, 1e8);
        assert_eq!(c.solver.step, 0.01);
    }

    #[test]
    fn stress_limit_converted_to_pascal() {
        let c = Config::from_json_str(r#"{"design": {"allowable_stress_n_mm2": 10}}"#).unwrap();
        assert_eq!(c.spec().allowable_stress, 10e6);
    }

    #[test]
    fn per_variable_bounds() {
        let c = Config::from_json_str(
            r#"{"design": {"control_points": 4},
                "optimizer": {"lower_bound_m": [0.01, 0.02, 0.01, 0.01], "upper_bound_m": 0.05}}"#,
        )
        .unwrap();
        let p = c.problem_config().unwrap();
        assert_eq!(p.lower_bounds, vec![0.01, 0.02, 0.01, 0.01]);
        assert_eq!(p.upper_bounds, vec![0.05; 4]);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = Config::from_json_str("{\n  \"design\": {\n    \"control_points\": ,\n  }\n}")
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = Config::from_json_str(r#"{"design": {"outer_radius": 0.5}}"#).unwrap_err();
        assert!(err.to_string().contains("outer_radius"), "{err}");
    }

    #[test]
    fn semantic_errors_name_the_section() {
        let err = Config::from_json_str(r#"{"design": {"inner_radius_m": 0.7}}"#).unwrap_err();
        assert!(err.to_string().contains("design"), "{err}");
        let err = Config::from_json_str(r#"{"optimizer": {"lower_bound_m": [0.01, 0.01]}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("lower_bound_m"), "{err}");
        let err = Config::from_json_str(r#"{"optimizer": {"lower_bound_m": 0.0}}"#).unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
    }
}
