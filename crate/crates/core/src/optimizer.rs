//! Constrained kinetic-energy maximisation with a static penalty and the
//! Jaya population update.
//!
//! Minimised objective: `f(x) = -E_k(x) + Σ_B C_B · penalty_B`, where `C_B`
//! is 1 when constraint `B` is violated. Each generation moves every
//! candidate towards the current best and away from the current worst, and
//! keeps the move only if it strictly improves `f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FlywheelError, Result};
use crate::model::{DesignVector, FlywheelModel, FlywheelSpec, PROFILE_ORDER};
use crate::stress::{BoundaryStencil, SolverSettings, StressField, StressGrid};

/// How the penalty grows with the constraint index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// `CP` for every violated constraint.
    #[default]
    PerConstraint,
    /// `CP^B` for violated constraint `B` (1-based), i.e. `CP` and `CP²`.
    Exponent,
}

/// Independent runs per optimisation. A single run from a random start
/// stalls short of the optimum, or never meets a feasible design, in
/// roughly one case out of seven on the thresher problem.
pub const DEFAULT_RESTARTS: usize = 4;

/// Granularity of the random coefficients `r1`, `r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomMode {
    /// One pair per variable per generation, shared by all candidates.
    Shared,
    /// A fresh pair per variable per candidate per generation.
    #[default]
    PerCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub lower_bounds: Vec<f64>,
    pub upper_bounds: Vec<f64>,
    pub penalty_constant: f64,
    pub penalty_mode: PenaltyMode,
    pub population_size: usize,
    pub max_iterations: usize,
    pub max_stall_generations: usize,
    pub function_tolerance: f64,
    pub random_seed: u64,
    pub random_mode: RandomMode,
    /// Independent Jaya runs from separate random streams; the best is kept.
    pub restarts: usize,
    /// Cap on worker threads for objective evaluation; `None` uses the
    /// global pool.
    pub threads: Option<usize>,
}

impl ProblemConfig {
    pub fn with_bounds(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            lower_bounds: lower,
            upper_bounds: upper,
            penalty_constant: 1e8,
            penalty_mode: PenaltyMode::default(),
            population_size: 1000,
            max_iterations: 500,
            max_stall_generations: 50,
            function_tolerance: 1e-6,
            random_seed: 0,
            random_mode: RandomMode::default(),
            restarts: DEFAULT_RESTARTS,
            threads: None,
        }
    }

    /// Defaults for `n` thickness variables in `[0.01, 0.06]` m.
    pub fn thresher(n: usize) -> Self {
        Self::with_bounds(vec![0.01; n], vec![0.06; n])
    }

    pub fn dimension(&self) -> usize {
        self.lower_bounds.len()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(FlywheelError::Parameter(msg));
        if self.lower_bounds.len() != self.upper_bounds.len() || self.lower_bounds.is_empty() {
            return fail(format!(
                "bounds must be non-empty and of equal length ({} lower, {} upper)",
                self.lower_bounds.len(),
                self.upper_bounds.len()
            ));
        }
        for (j, (lo, hi)) in self.lower_bounds.iter().zip(&self.upper_bounds).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return fail(format!("variable {}: bounds [{lo}, {hi}] are not ordered", j + 1));
            }
        }
        if self.population_size < 2 {
            return fail(format!(
                "population size must be at least 2, got {}",
                self.population_size
            ));
        }
        if !(self.function_tolerance > 0.0) {
            return fail(format!(
                "function tolerance must be positive, got {}",
                self.function_tolerance
            ));
        }
        if !(self.penalty_constant > 0.0 && self.penalty_constant.is_finite()) {
            return fail(format!(
                "penalty constant must be positive, got {}",
                self.penalty_constant
            ));
        }
        if self.restarts == 0 {
            return fail("restarts must be at least 1".into());
        }
        if self.threads == Some(0) {
            return fail("thread cap must be at least 1".into());
        }
        Ok(())
    }

    fn clamp(&self, j: usize, v: f64) -> f64 {
        v.max(self.lower_bounds[j]).min(self.upper_bounds[j])
    }
}

/// Mass, energy and stress of one design, with the constraint values
/// `g1 = M - M_max` and `g2 = max σ_vm - σ_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub mass: f64,
    pub kinetic_energy: f64,
    pub max_stress: f64,
    pub mass_violation: f64,
    pub stress_violation: f64,
}

impl Evaluation {
    pub fn mass_ok(&self) -> bool {
        self.mass_violation <= 0.0
    }

    pub fn stress_ok(&self) -> bool {
        self.stress_violation <= 0.0
    }

    pub fn feasible(&self) -> bool {
        self.mass_ok() && self.stress_ok()
    }

    /// Penalised objective for the given penalty settings.
    pub fn penalized(&self, penalty_constant: f64, mode: PenaltyMode) -> f64 {
        let mut f = -self.kinetic_energy;
        for (b, ok) in [(1, self.mass_ok()), (2, self.stress_ok())] {
            if !ok {
                f += match mode {
                    PenaltyMode::PerConstraint => penalty_constant,
                    PenaltyMode::Exponent => penalty_constant.powi(b),
                };
            }
        }
        f
    }
}

/// Everything needed to evaluate a thickness vector: cached energy and mass
/// coefficients plus the precomputed stress grid.
#[derive(Debug, Clone)]
pub struct Problem {
    model: FlywheelModel,
    grid: StressGrid,
    stencil: BoundaryStencil,
}

impl Problem {
    pub fn new(spec: FlywheelSpec, solver: &SolverSettings) -> Result<Self> {
        let model = FlywheelModel::new(spec)?;
        let grid = StressGrid::new(model.radii(), PROFILE_ORDER, solver.step)?;
        Ok(Self {
            model,
            grid,
            stencil: solver.boundary_stencil,
        })
    }

    pub fn model(&self) -> &FlywheelModel {
        &self.model
    }

    pub fn spec(&self) -> &FlywheelSpec {
        self.model.spec()
    }

    pub fn stress_field(&self, x: &[f64]) -> Result<StressField> {
        self.grid.solve(x, self.model.spec(), self.stencil)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let mass = self.model.mass(x)?;
        let kinetic_energy = self.model.kinetic_energy(x)?;
        let max_stress = self.stress_field(x)?.max_von_mises();
        let spec = self.model.spec();
        Ok(Evaluation {
            mass,
            kinetic_energy,
            max_stress,
            mass_violation: mass - spec.max_mass,
            stress_violation: max_stress - spec.allowable_stress,
        })
    }

    /// `(g1, g2)` in kg and Pa; the design is feasible when both are `<= 0`.
    pub fn evaluate_constraints(&self, x: &[f64]) -> Result<(f64, f64)> {
        let e = self.evaluate(x)?;
        Ok((e.mass_violation, e.stress_violation))
    }

    pub fn penalized_objective(&self, x: &[f64], config: &ProblemConfig) -> Result<f64> {
        Ok(self
            .evaluate(x)?
            .penalized(config.penalty_constant, config.penalty_mode))
    }
}

/// Random factors of one generation. Holds a single row in shared mode and
/// one row per candidate otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCoefficients {
    rows: Vec<(Vec<f64>, Vec<f64>)>,
}

impl StepCoefficients {
    pub fn shared(r1: Vec<f64>, r2: Vec<f64>) -> Self {
        Self { rows: vec![(r1, r2)] }
    }

    pub fn per_candidate(rows: Vec<(Vec<f64>, Vec<f64>)>) -> Self {
        Self { rows }
    }

    pub fn draw(rng: &mut impl Rng, mode: RandomMode, candidates: usize, vars: usize) -> Self {
        let rows = match mode {
            RandomMode::Shared => 1,
            RandomMode::PerCandidate => candidates,
        };
        let mut row = || {
            let r1 = (0..vars).map(|_| rng.gen::<f64>()).collect();
            let r2 = (0..vars).map(|_| rng.gen::<f64>()).collect();
            (r1, r2)
        };
        Self {
            rows: (0..rows).map(|_| row()).collect(),
        }
    }

    fn row(&self, k: usize) -> &(Vec<f64>, Vec<f64>) {
        &self.rows[k % self.rows.len()]
    }
}

/// Index of the best (lowest) and worst (highest) objective; ties go to
/// the lowest index.
pub fn best_and_worst(objectives: &[f64]) -> (usize, usize) {
    let mut best = 0;
    let mut worst = 0;
    for (k, &f) in objectives.iter().enumerate().skip(1) {
        if f < objectives[best] {
            best = k;
        }
        if f > objectives[worst] {
            worst = k;
        }
    }
    (best, worst)
}

/// Trial positions `x + r1 (x_best - |x|) - r2 (x_worst - |x|)`, clamped to
/// the bounds.
pub fn propose(
    population: &[Vec<f64>],
    best: usize,
    worst: usize,
    coeffs: &StepCoefficients,
    config: &ProblemConfig,
) -> Vec<Vec<f64>> {
    let xb = &population[best];
    let xw = &population[worst];
    population
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let (r1, r2) = coeffs.row(k);
            x.iter()
                .enumerate()
                .map(|(j, &v)| {
                    let moved = v + r1[j] * (xb[j] - v.abs()) - r2[j] * (xw[j] - v.abs());
                    config.clamp(j, moved)
                })
                .collect()
        })
        .collect()
}

fn evaluate_all<F>(objective: &F, candidates: &[Vec<f64>]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        candidates.par_iter().map(|x| objective(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        candidates.iter().map(|x| objective(x)).collect()
    }
}

/// One generation: propose trial positions from `coeffs`, evaluate them and
/// keep those that strictly improve. Returns the number of accepted moves.
pub fn jaya_step_with<F>(
    population: &mut [Vec<f64>],
    objectives: &mut [f64],
    coeffs: &StepCoefficients,
    config: &ProblemConfig,
    objective: &F,
) -> Result<usize>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let (best, worst) = best_and_worst(objectives);
    let trials = propose(population, best, worst, coeffs, config);
    let trial_f = evaluate_all(objective, &trials)?;
    let mut accepted = 0;
    for (k, (x, f)) in trials.into_iter().zip(trial_f).enumerate() {
        if f < objectives[k] {
            population[k] = x;
            objectives[k] = f;
            accepted += 1;
        }
    }
    Ok(accepted)
}

/// One generation with coefficients drawn from `rng`.
pub fn jaya_step<F, R>(
    population: &mut [Vec<f64>],
    objectives: &mut [f64],
    config: &ProblemConfig,
    rng: &mut R,
    objective: &F,
) -> Result<usize>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
    R: Rng,
{
    let coeffs = StepCoefficients::draw(
        rng,
        config.random_mode,
        population.len(),
        config.dimension(),
    );
    jaya_step_with(population, objectives, &coeffs, config, objective)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    Stalled,
}

/// Outcome of a generic Jaya minimisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Best objective after initialisation (entry 0) and after every
    /// generation of the winning restart.
    pub history: Vec<f64>,
    pub iterations_run: usize,
    pub stop_reason: StopReason,
    /// Final objective of every restart, in stream order.
    pub restart_objectives: Vec<f64>,
}

/// Minimises `objective` over the box in `config` with the Jaya algorithm,
/// keeping the best of `config.restarts` independent runs.
///
/// Each run stops once more than `max_stall_generations` consecutive generations
/// change the best objective by at most `function_tolerance` (relative to
/// `max(1, |f|)`), or after `max_iterations` generations.
pub fn minimize<F>(objective: F, config: &ProblemConfig) -> Result<Minimum>
where
    F: Fn(&[f64]) -> Result<f64> + Sync + Send,
{
    config.validate()?;
    #[cfg(feature = "parallel")]
    if let Some(threads) = config.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| FlywheelError::Parameter(format!("thread pool: {e}")))?;
        return pool.install(|| minimize_restarts(&objective, config));
    }
    minimize_restarts(&objective, config)
}

fn minimize_restarts<F>(objective: &F, config: &ProblemConfig) -> Result<Minimum>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let mut best: Option<Minimum> = None;
    let mut restart_objectives = Vec::with_capacity(config.restarts);
    for stream in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.random_seed);
        rng.set_stream(stream as u64);
        let found = minimize_single(objective, config, rng)?;
        restart_objectives.push(found.objective);
        if best.as_ref().is_none_or(|b| found.objective < b.objective) {
            best = Some(found);
        }
    }
    let mut best = best.expect("at least one restart");
    best.restart_objectives = restart_objectives;
    Ok(best)
}

fn minimize_single<F>(objective: &F, config: &ProblemConfig, mut rng: ChaCha8Rng) -> Result<Minimum>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let dim = config.dimension();
    let mut population: Vec<Vec<f64>> = (0..config.population_size)
        .map(|_| {
            (0..dim)
                .map(|j| {
                    let (lo, hi) = (config.lower_bounds[j], config.upper_bounds[j]);
                    config.clamp(j, lo + (hi - lo) * rng.gen::<f64>())
                })
                .collect()
        })
        .collect();
    let mut objectives = evaluate_all(objective, &population)?;

    let mut best_f = objectives[best_and_worst(&objectives).0];
    let mut history = vec![best_f];
    let mut stall = 0;
    let mut stop_reason = StopReason::MaxIterations;
    let mut iterations_run = 0;
    for _ in 0..config.max_iterations {
        jaya_step(&mut population, &mut objectives, config, &mut rng, objective)?;
        iterations_run += 1;
        let f = objectives[best_and_worst(&objectives).0];
        let change = (f - best_f).abs() / f.abs().max(1.0);
        if change <= config.function_tolerance {
            stall += 1;
        } else {
            stall = 0;
        }
        best_f = f;
        history.push(f);
        if stall > config.max_stall_generations {
            stop_reason = StopReason::Stalled;
            break;
        }
    }

    let best = best_and_worst(&objectives).0;
    Ok(Minimum {
        x: population.swap_remove(best),
        objective: objectives[best],
        history,
        iterations_run,
        stop_reason,
        restart_objectives: Vec::new(),
    })
}

/// Result of a flywheel shape optimisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_x: DesignVector,
    pub best_objective: f64,
    pub kinetic_energy: f64,
    pub mass: f64,
    pub max_stress: f64,
    pub feasible: bool,
    pub history: Vec<f64>,
    pub iterations_run: usize,
    pub stop_reason: StopReason,
    pub restart_objectives: Vec<f64>,
}

/// Maximises kinetic energy of `problem` under its mass and stress limits.
pub fn run(problem: &Problem, config: &ProblemConfig) -> Result<RunResult> {
    let n = problem.model().radii().len();
    if config.dimension() != n {
        return Err(FlywheelError::Parameter(format!(
            "bounds cover {} variables, the flywheel has {n} control points",
            config.dimension()
        )));
    }
    if let Some(lo) = config.lower_bounds.iter().find(|&&lo| lo <= 0.0) {
        return Err(FlywheelError::Parameter(format!(
            "thickness lower bounds must be positive, got {lo}"
        )));
    }
    let found = minimize(|x| problem.penalized_objective(x, config), config)?;
    let eval = problem.evaluate(&found.x)?;
    Ok(RunResult {
        best_x: DesignVector(found.x),
        best_objective: found.objective,
        kinetic_energy: eval.kinetic_energy,
        mass: eval.mass,
        max_stress: eval.max_stress,
        feasible: eval.feasible(),
        history: found.history,
        iterations_run: found.iterations_run,
        stop_reason: found.stop_reason,
        restart_objectives: found.restart_objectives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize) -> ProblemConfig {
        ProblemConfig {
            population_size: 4,
            ..ProblemConfig::thresher(n)
        }
    }

    #[test]
    fn zero_coefficients_keep_population() {
        let pop = vec![vec![0.02, 0.03], vec![0.05, 0.01], vec![0.04, 0.04]];
        let c = StepCoefficients::shared(vec![0.0; 2], vec![0.0; 2]);
        assert_eq!(propose(&pop, 0, 1, &c, &cfg(2)), pop);
    }

    #[test]
    fn identical_population_is_fixed_point() {
        let pop = vec![vec![0.02, 0.03]; 3];
        let c = StepCoefficients::shared(vec![0.7, 0.2], vec![0.4, 0.9]);
        assert_eq!(propose(&pop, 0, 2, &c, &cfg(2)), pop);
    }

    #[test]
    fn best_only_moves_away_from_worst() {
        let pop = vec![vec![0.02, 0.03], vec![0.05, 0.01]];
        let c = StepCoefficients::shared(vec![0.9, 0.9], vec![0.5, 0.5]);
        let wide = ProblemConfig::with_bounds(vec![0.0; 2], vec![1.0; 2]);
        let out = propose(&pop, 0, 1, &c, &wide);
        // x + 0 - 0.5 (x_w - x)
        assert!((out[0][0] - (0.02 - 0.5 * 0.03)).abs() < 1e-15);
        assert!((out[0][1] - (0.03 + 0.5 * 0.02)).abs() < 1e-15);
    }

    #[test]
    fn proposals_are_clamped() {
        let pop = vec![vec![0.011], vec![0.059]];
        let c = StepCoefficients::shared(vec![1.0], vec![1.0]);
        let out = propose(&pop, 1, 0, &c, &cfg(1));
        assert!(out.iter().flatten().all(|&v| (0.01..=0.06).contains(&v)));
    }

    #[test]
    fn ties_resolve_to_lowest_index() {
        assert_eq!(best_and_worst(&[3.0, 1.0, 1.0, 5.0, 5.0]), (1, 3));
        assert_eq!(best_and_worst(&[2.0, 2.0]), (0, 0));
    }

    #[test]
    fn penalty_modes() {
        let e = Evaluation {
            mass: 120.0,
            kinetic_energy: 4e4,
            max_stress: 7e6,
            mass_violation: 5.0,
            stress_violation: 0.6e6,
        };
        assert_eq!(e.penalized(1e8, PenaltyMode::PerConstraint), -4e4 + 2e8);
        assert_eq!(e.penalized(1e8, PenaltyMode::Exponent), -4e4 + 1e8 + 1e16);
        let ok = Evaluation {
            mass_violation: 0.0,
            stress_violation: -1.0,
            ..e
        };
        assert_eq!(ok.penalized(1e8, PenaltyMode::Exponent), -4e4);
        let mass_only = Evaluation {
            stress_violation: -1.0,
            ..e
        };
        assert_eq!(mass_only.penalized(1e8, PenaltyMode::PerConstraint), -4e4 + 1e8);
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(3);
        assert!(c.validate().is_ok());
        c.population_size = 1;
        assert!(c.validate().is_err());
        let mut c = cfg(3);
        c.upper_bounds[1] = 0.005;
        assert!(c.validate().is_err());
        let mut c = cfg(3);
        c.function_tolerance = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg(3);
        c.lower_bounds.pop();
        assert!(c.validate().is_err());
    }

    #[test]
    fn minimizes_sphere() {
        let config = ProblemConfig {
            population_size: 40,
            max_iterations: 300,
            random_mode: RandomMode::PerCandidate,
            random_seed: 3,
            ..ProblemConfig::with_bounds(vec![-5.0; 3], vec![5.0; 3])
        };
        let m = minimize(|x| Ok(x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum()), &config).unwrap();
        assert!(m.objective < 1e-6, "{m:?}");
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn objective_errors_propagate() {
        let config = cfg(2);
        let err = minimize(|_| Err(FlywheelError::Numerical("boom".into())), &config).unwrap_err();
        assert_eq!(err, FlywheelError::Numerical("boom".into()));
    }
}
