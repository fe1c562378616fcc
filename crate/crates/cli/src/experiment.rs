//! Grid execution and artifact writing.

use std::fs;
use std::path::PathBuf;

use krr_core::analysis::semiconvergence_of;
use krr_core::linalg::{norm, SvdResult};
use krr_core::problems::{add_noise, NoisyData, ProblemInstance};
use krr_core::solvers::{tsvd_solve, KrylovSolver, SolveResult, StopReason, StoppingRule};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, GridPoint, Method, ProblemKind};
use crate::error::{io_error, Result};
use crate::output::{
    column_major_to_row_major, emit_pgm, line_chart_svg, records_to_csv, write_file, Series,
};

/// One row of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub problem: String,
    pub solver: String,
    pub shift: usize,
    pub noise_percent: f64,
    pub assumed_noise_percent: f64,
    pub seed: u64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub final_error: f64,
    /// `||b - A x|| / ||b_exact||`
    pub final_residual: f64,
    /// 1-based; 0 when no iterate was produced.
    pub min_error_iteration: usize,
    pub min_error: f64,
}

/// Full outcome of a grid point.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub point: GridPoint,
    pub record: ExperimentRecord,
    /// Relative residuals per iteration.
    pub residual_history: Vec<f64>,
    pub error_history: Vec<f64>,
    pub solution: Vec<f64>,
    /// `η ε` used by the stopping rule.
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub outcomes: Vec<RunOutcome>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutput {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        self.outcomes.iter().map(|o| o.record.clone()).collect()
    }
}

/// Stopping rule for a run: `ε` comes from the assumed noise level, which
/// may differ from the level actually added.
pub fn stopping_rule(
    problem: &ProblemInstance,
    assumed_percent: f64,
    eta: f64,
    max_iter: usize,
) -> Result<StoppingRule> {
    let epsilon = assumed_percent / 100.0 * norm(&problem.b_exact);
    Ok(StoppingRule::new(epsilon, eta, max_iter)?)
}

pub fn run_point(
    problem: &ProblemInstance,
    svd: Option<&SvdResult>,
    data: &NoisyData,
    point: &GridPoint,
    eta: f64,
    max_iter: usize,
) -> Result<RunOutcome> {
    let rule = stopping_rule(problem, point.assumed_noise_percent, eta, max_iter)?;
    let op = &*problem.operator;
    let x_true = Some(problem.x_true.as_slice());
    let result = match (point.method, svd) {
        (Method::Krylov(basis), _) => {
            KrylovSolver::new(basis, point.shift).solve(op, &data.b, &rule, x_true)?
        }
        (Method::Tsvd, Some(svd)) => tsvd_solve(op, svd, &data.b, &rule, x_true)?,
        (Method::Tsvd, None) => {
            let svd = op.svd()?;
            tsvd_solve(op, &svd, &data.b, &rule, x_true)?
        }
    };
    Ok(outcome(problem, data, point, result, rule.threshold()))
}

fn outcome(
    problem: &ProblemInstance,
    data: &NoisyData,
    point: &GridPoint,
    result: SolveResult,
    threshold: f64,
) -> RunOutcome {
    let b_norm = norm(&problem.b_exact);
    let residual_history: Vec<f64> = result.residual_history.iter().map(|r| r / b_norm).collect();
    let error_history = result.error_history.clone().unwrap_or_default();
    // Without any iterate the reported solution is x_0 = 0.
    let (final_error, final_residual, min_error_iteration, min_error) =
        match semiconvergence_of(&error_history) {
            Ok(s) => (
                s.final_error,
                *residual_history.last().expect("same length"),
                s.argmin,
                s.min_error,
            ),
            Err(_) => (1.0, norm(&data.b) / b_norm, 0, 1.0),
        };
    RunOutcome {
        record: ExperimentRecord {
            problem: problem.name.clone(),
            solver: point.label(),
            shift: point.shift,
            noise_percent: point.noise_percent,
            assumed_noise_percent: point.assumed_noise_percent,
            seed: point.seed,
            iterations: result.iterations,
            stop_reason: result.stop_reason,
            final_error,
            final_residual,
            min_error_iteration,
            min_error,
        },
        point: point.clone(),
        residual_history,
        error_history,
        solution: result.solution,
        threshold,
    }
}

/// Runs every grid point without touching the filesystem. Points execute in
/// parallel; the result order is the grid order.
pub fn run_grid(config: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    let grid = config.grid()?;
    let problem = config.problem.build()?;
    let svd = if grid.iter().any(|p| p.method == Method::Tsvd) {
        Some(problem.operator.svd()?)
    } else {
        None
    };

    let levels = &config.noise_levels_percent;
    let data: Vec<NoisyData> = levels
        .iter()
        .flat_map(|&v| config.seeds.iter().map(move |&s| (v, s)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(v, s)| add_noise(&problem, v, s))
        .collect::<krr_core::Result<_>>()?;
    let data_for = |p: &GridPoint| {
        let vi = levels
            .iter()
            .position(|&v| v == p.noise_percent)
            .expect("level from grid");
        let si = config
            .seeds
            .iter()
            .position(|&s| s == p.seed)
            .expect("seed from grid");
        &data[vi * config.seeds.len() + si]
    };

    grid.par_iter()
        .map(|p| {
            run_point(
                &problem,
                svd.as_ref(),
                data_for(p),
                p,
                config.eta,
                config.max_iter,
            )
        })
        .collect()
}

/// Runs the grid and writes `results.csv`, one `convergence_<id>.svg` per
/// run and, for image problems, `recon_<id>.pgm`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| io_error("create output directory", dir, e))?;
    let image_dims = match config.problem.kind()? {
        ProblemKind::Blur2d { .. } => Some((config.problem.n, config.problem.n)),
        _ => None,
    };
    let outcomes = run_grid(config)?;

    let mut files = Vec::new();
    let records: Vec<ExperimentRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
    let csv_path = dir.join("results.csv");
    write_file(&csv_path, &records_to_csv(&records)?)?;
    files.push(csv_path);

    for o in &outcomes {
        let id = o.point.id();
        let title = format!(
            "{} {} (shift {}), noise {}%, seed {}",
            o.record.problem, o.record.solver, o.point.shift, o.point.noise_percent, o.point.seed
        );
        let svg = line_chart_svg(
            &title,
            "iteration",
            &[
                Series {
                    name: "residual",
                    values: &o.residual_history,
                },
                Series {
                    name: "error",
                    values: &o.error_history,
                },
            ],
        );
        let svg_path = dir.join(format!("convergence_{id}.svg"));
        write_file(&svg_path, svg.as_bytes())?;
        files.push(svg_path);

        if let Some(dims) = image_dims {
            let pgm_path = dir.join(format!("recon_{id}.pgm"));
            emit_pgm(
                &column_major_to_row_major(&o.solution, dims),
                dims,
                &pgm_path,
            )?;
            files.push(pgm_path);
        }
    }
    Ok(ExperimentOutput { outcomes, files })
}
