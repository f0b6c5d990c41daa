//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! Every export works on the thresher flywheel with the default solver and
//! returns flat `Float64Array`s; the layouts are documented per function.

use flywheel_core::{FlywheelSpec, Problem, ProblemConfig, SolverSettings};
use wasm_bindgen::prelude::*;

/// Samples drawn along the profile for plotting.
pub const PROFILE_SAMPLES: usize = 201;

fn problem() -> Result<Problem, String> {
    Problem::new(FlywheelSpec::thresher(), &SolverSettings::default()).map_err(|e| e.to_string())
}

/// `[mass_kg, kinetic_energy_j, max_von_mises_pa, feasible (0 or 1), r_0, t_0, r_1, t_1, ...]`
pub fn evaluate_design(x: &[f64]) -> Result<Vec<f64>, String> {
    let p = problem()?;
    let eval = p.evaluate(x).map_err(|e| e.to_string())?;
    let samples = p
        .model()
        .profile(x)
        .and_then(|c| c.sample(PROFILE_SAMPLES))
        .map_err(|e| e.to_string())?;
    let mut out = vec![
        eval.mass,
        eval.kinetic_energy,
        eval.max_stress,
        if eval.feasible() { 1.0 } else { 0.0 },
    ];
    for (_, r, t) in samples {
        out.push(r);
        out.push(t);
    }
    Ok(out)
}

/// Four equal blocks: radius, sigma_r, sigma_theta, sigma_vm (m, Pa).
pub fn stress_profile(x: &[f64]) -> Result<Vec<f64>, String> {
    let field = problem()?.stress_field(x).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 * field.len());
    out.extend_from_slice(&field.radius);
    out.extend_from_slice(&field.sigma_r);
    out.extend_from_slice(&field.sigma_theta);
    out.extend_from_slice(&field.sigma_vm);
    Ok(out)
}

/// Best design followed by the convergence history:
/// `[t_1..t_8, best_f_0, best_f_1, ...]`.
pub fn run_optimizer(seed: u64, population: usize, iterations: usize) -> Result<Vec<f64>, String> {
    let p = problem()?;
    let config = ProblemConfig {
        population_size: population,
        max_iterations: iterations,
        restarts: 1,
        random_seed: seed,
        ..ProblemConfig::thresher(p.model().radii().len())
    };
    let result = flywheel_core::run(&p, &config).map_err(|e| e.to_string())?;
    let mut out = result.best_x.into_inner();
    out.extend(result.history);
    Ok(out)
}

#[wasm_bindgen]
pub fn evaluate(x: &[f64]) -> Result<Vec<f64>, JsError> {
    evaluate_design(x).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn stress(x: &[f64]) -> Result<Vec<f64>, JsError> {
    stress_profile(x).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn optimize(seed: u32, population: u32, iterations: u32) -> Result<Vec<f64>, JsError> {
    run_optimizer(seed as u64, population as usize, iterations as usize).map_err(|e| JsError::new(&e))
}
