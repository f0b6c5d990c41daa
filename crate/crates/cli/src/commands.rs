use std::path::{Path, PathBuf};

use flywheel_core::{run, Config, Problem, StopReason};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::output::{self, DesignReport};
use crate::svg;

/// Samples written to the profile CSV.
const PROFILE_SAMPLES: usize = 201;

pub struct Loaded {
    pub config: Config,
    pub path: Option<PathBuf>,
    pub digest: String,
}

/// Reads the configuration file, or the built-in defaults when no path is
/// given. The digest covers the exact bytes that were parsed.
pub fn load(path: Option<&Path>) -> Result<Loaded, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => serde_json::to_string_pretty(&Config::default())
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let config = Config::from_json_str(&text).map_err(|e| match path {
        Some(p) => CliError::Config(format!("{}: {e}", p.display())),
        None => CliError::from(e),
    })?;
    Ok(Loaded {
        config,
        path: path.map(Path::to_path_buf),
        digest: digest(text.as_bytes()),
    })
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}

fn check_design(loaded: &Loaded, x: &[f64]) -> Result<(), CliError> {
    let n = loaded.config.design.control_points;
    if x.len() != n {
        return Err(CliError::Usage(format!(
            "--x needs {n} thicknesses, got {}",
            x.len()
        )));
    }
    let problem = loaded.config.problem_config()?;
    for (j, &t) in x.iter().enumerate() {
        let (lo, hi) = (problem.lower_bounds[j], problem.upper_bounds[j]);
        if t < lo || t > hi {
            eprintln!("warning: t_{} = {t} outside optimizer bounds [{lo}, {hi}]", j + 1);
        }
    }
    Ok(())
}

pub fn design_report(loaded: &Loaded, x: &[f64]) -> Result<DesignReport, CliError> {
    check_design(loaded, x)?;
    let problem = Problem::new(loaded.config.spec(), &loaded.config.solver)?;
    let pc = loaded.config.problem_config()?;
    let eval = problem.evaluate(x)?;
    Ok(DesignReport::new(
        x,
        &eval,
        eval.penalized(pc.penalty_constant, pc.penalty_mode),
    ))
}

pub fn evaluate(loaded: &Loaded, x: &[f64], json: bool) -> Result<(), CliError> {
    let report = design_report(loaded, x)?;
    if json {
        println!("{}", to_json(&report)?);
    } else {
        print!("{}", report.text());
    }
    Ok(())
}

pub fn analyze(
    loaded: &Loaded,
    x: &[f64],
    csv: Option<&Path>,
    svg_path: Option<&Path>,
) -> Result<(), CliError> {
    check_design(loaded, x)?;
    let problem = Problem::new(loaded.config.spec(), &loaded.config.solver)?;
    let field = problem.stress_field(x)?;
    let table = output::stress_csv(&field);
    match csv {
        Some(p) => output::write_file(p, &table)?,
        None => print!("{table}"),
    }
    if let Some(p) = svg_path {
        output::write_file(p, &svg::stress_plot(&field, "Stress distribution along the radius"))?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub restarts: usize,
    pub best_objective: f64,
    pub stop_reason: StopReason,
    pub iterations_run: usize,
    pub restart_objectives: Vec<f64>,
    pub design: DesignReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config_path: Option<String>,
    pub config_digest: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

pub struct OptimizeArgs<'a> {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub threads: Option<usize>,
    pub out: &'a Path,
}

pub fn optimize(loaded: &Loaded, args: OptimizeArgs<'_>) -> Result<(), CliError> {
    let started_at = chrono::Utc::now().to_rfc3339();
    let mut pc = loaded.config.problem_config()?;
    if let Some(seed) = args.seed {
        pc.random_seed = seed;
    }
    if let Some(restarts) = args.restarts {
        pc.restarts = restarts;
    }
    pc.threads = args.threads;
    let problem = Problem::new(loaded.config.spec(), &loaded.config.solver)?;
    let result = run(&problem, &pc)?;

    let x = result.best_x.to_vec();
    let eval = problem.evaluate(&x)?;
    let summary = Summary {
        seed: pc.random_seed,
        restarts: pc.restarts,
        best_objective: result.best_objective,
        stop_reason: result.stop_reason,
        iterations_run: result.iterations_run,
        restart_objectives: result.restart_objectives.clone(),
        design: DesignReport::new(&x, &eval, result.best_objective),
    };
    let field = problem.stress_field(&x)?;
    let profile = problem.model().profile(&x)?.sample(PROFILE_SAMPLES)?;

    std::fs::create_dir_all(args.out)
        .map_err(|e| CliError::io(args.out.display().to_string(), e))?;
    let files: [(&str, String); 5] = [
        ("summary.json", to_json(&summary)?),
        ("convergence.csv", output::convergence_csv(&result.history)),
        ("profile.csv", output::profile_csv(&profile)),
        ("stress.csv", output::stress_csv(&field)),
        (
            "stress.svg",
            svg::stress_plot(&field, "Stress distribution of the optimised flywheel"),
        ),
    ];
    let mut outputs = Vec::new();
    for (name, contents) in &files {
        output::write_file(&args.out.join(name), contents)?;
        outputs.push(name.to_string());
    }
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        tool: "flywheel".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: "optimize".into(),
        config_path: loaded.path.as_ref().map(|p| p.display().to_string()),
        config_digest: loaded.digest.clone(),
        seed: pc.random_seed,
        started_at,
        finished_at: chrono::Utc::now().to_rfc3339(),
        outputs,
    };
    output::write_file(&args.out.join("manifest.json"), &to_json(&manifest)?)?;

    print!("{}", summary.design.text());
    println!(
        "stop reason          {:?} after {} generations",
        summary.stop_reason, summary.iterations_run
    );
    println!("results written to   {}", args.out.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(
        flywheel_core::FlywheelError::Numerical(format!("serialising output: {e}")),
    ))
}
