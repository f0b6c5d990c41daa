//! CSV and JSON artifacts.

use std::fmt::Write as _;
use std::path::Path;

use flywheel_core::{Evaluation, StressField};
use serde::Serialize;

use crate::error::CliError;

pub const STRESS_HEADER: &str =
    "u,r_m,t_m,Z_N,sigma_r_Pa,sigma_theta_Pa,sigma_vm_Pa,sigma_vm_N_mm2";
pub const CONVERGENCE_HEADER: &str = "iteration,best_f";
pub const PROFILE_HEADER: &str = "u,r_m,t_m,t_mirror_m";

pub fn stress_csv(field: &StressField) -> String {
    let mut out = String::with_capacity(field.len() * 120);
    out.push_str(STRESS_HEADER);
    out.push('\n');
    for j in 0..field.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            field.u[j],
            field.radius[j],
            field.thickness[j],
            field.z[j],
            field.sigma_r[j],
            field.sigma_theta[j],
            field.sigma_vm[j],
            field.sigma_vm[j] * 1e-6
        );
    }
    out
}

pub fn convergence_csv(history: &[f64]) -> String {
    let mut out = String::from(CONVERGENCE_HEADER);
    out.push('\n');
    for (i, f) in history.iter().enumerate() {
        let _ = writeln!(out, "{i},{f}");
    }
    out
}

/// Rows of `(u, r, t)` samples with the mirrored lower half of the section.
pub fn profile_csv(samples: &[(f64, f64, f64)]) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for &(u, r, t) in samples {
        let _ = writeln!(out, "{u},{r},{t},{}", -t);
    }
    out
}

/// Numbers reported for one design; shared by `evaluate` and the
/// optimisation summary so the two can be compared exactly.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct DesignReport {
    pub x: Vec<f64>,
    pub mass_kg: f64,
    pub kinetic_energy_j: f64,
    pub max_von_mises_pa: f64,
    pub max_von_mises_n_mm2: f64,
    pub g1_kg: f64,
    pub g2_pa: f64,
    pub mass_ok: bool,
    pub stress_ok: bool,
    pub feasible: bool,
    pub objective: f64,
}

impl DesignReport {
    pub fn new(x: &[f64], e: &Evaluation, objective: f64) -> Self {
        Self {
            x: x.to_vec(),
            mass_kg: e.mass,
            kinetic_energy_j: e.kinetic_energy,
            max_von_mises_pa: e.max_stress,
            max_von_mises_n_mm2: e.max_stress * 1e-6,
            g1_kg: e.mass_violation,
            g2_pa: e.stress_violation,
            mass_ok: e.mass_ok(),
            stress_ok: e.stress_ok(),
            feasible: e.feasible(),
            objective,
        }
    }

    pub fn text(&self) -> String {
        let flag = |ok: bool| if ok { "ok" } else { "VIOLATED" };
        let x: Vec<String> = self.x.iter().map(|v| v.to_string()).collect();
        format!(
            "x                    {}\n\
             mass                 {:.4} kg\n\
             kinetic energy       {:.2} J\n\
             max Von Mises        {:.6e} Pa ({:.4} N/mm2)\n\
             mass constraint      {} (g1 = {:.4} kg)\n\
             stress constraint    {} (g2 = {:.6e} Pa)\n\
             feasible             {}\n\
             objective            {}\n",
            x.join(","),
            self.mass_kg,
            self.kinetic_energy_j,
            self.max_von_mises_pa,
            self.max_von_mises_n_mm2,
            flag(self.mass_ok),
            self.g1_kg,
            flag(self.stress_ok),
            self.g2_pa,
            if self.feasible { "yes" } else { "no" },
            self.objective
        )
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path.display().to_string(), e))
}
