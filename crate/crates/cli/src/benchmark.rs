//! Batch benchmark over complexes × score kinds × solvers.
//!
//! Output files (all in the output directory):
//!
//! * `runs.csv`: one row per grid cell, in grid order.
//! * `summary.csv`: mean β per solver over every complex and score kind.
//! * `table_<complex>.csv`: β with score kinds as rows and solvers as columns.
//! * `timings.csv`: wall times, only when `benchmark.timings = true`.
//!
//! Wall time is kept out of the other files so that they are byte-identical
//! across runs with the same configuration and seed.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use densfit::assembly::{self, AssemblyProblem, PlacementTable, ScoreKind};
use densfit::grid::{pdb, AtomRecord, DensityMap};
use densfit::quality;
use densfit::solvers::report::csv_field;
use densfit::solvers::{self, Method, SolveReport};
use log::{info, warn};
use rayon::prelude::*;

use crate::commands::complex_map;
use crate::config::ExperimentConfig;

pub const RUNS_HEADER: &str = "complex,score,solver,method,continuous_obj,binary_obj,beta,converged,assignment,status";
pub const SUMMARY_HEADER: &str = "solver,mean_beta,runs,failed";
pub const TIMINGS_HEADER: &str = "complex,score,solver,wall_time_s";

#[derive(Debug, Clone)]
pub struct Run {
    pub complex: String,
    pub score: ScoreKind,
    pub solver: Method,
    pub outcome: std::result::Result<(SolveReport, f64), String>,
}

impl Run {
    pub fn beta(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|(_, b)| *b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub solver: Method,
    pub mean_beta: Option<f64>,
    pub runs: usize,
    pub failed: usize,
}

#[derive(Debug)]
pub struct BenchmarkOutput {
    pub runs: Vec<Run>,
    pub summary: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

struct Complex {
    natives: Vec<Vec<AtomRecord>>,
    table: PlacementTable,
    map: DensityMap,
}

fn complex_names(paths: &[PathBuf]) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    paths
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| anyhow!("bad complex path {}", p.display()))?
                .to_string();
            if !seen.insert(name.clone()) {
                bail!("duplicate complex name {name:?}");
            }
            Ok(name)
        })
        .collect()
}

fn prepare(cfg: &ExperimentConfig, path: &PathBuf, seed: u64) -> Result<Complex> {
    let atoms = pdb::load(path).with_context(|| format!("reading {}", path.display()))?;
    if atoms.is_empty() {
        bail!("{} contains no atoms", path.display());
    }
    let natives = pdb::group_by_protein(&atoms);
    let table = assembly::generate_placements(&natives, &cfg.perturbation(seed), &cfg.map_params()?)?;
    let map = complex_map(cfg, &atoms)?;
    Ok(Complex { natives, table, map })
}

fn run_cell(
    cfg: &ExperimentConfig,
    complex: &Complex,
    problem: &AssemblyProblem,
    solver: Method,
) -> Result<(SolveReport, f64)> {
    let report = solvers::solve(problem, solver, &cfg.solver)?;
    let fit = quality::evaluate_fit(&report.assignment, &complex.table, &complex.natives, cfg.threshold)?;
    Ok((report, fit.beta))
}

/// Run every cell of the grid. Cells run in parallel; results come back in
/// grid order (complex, then score kind, then solver).
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Run>> {
    if cfg.complexes.is_empty() || cfg.scores.is_empty() || cfg.solvers.is_empty() {
        bail!("benchmark needs at least one complex, score kind and solver");
    }
    let names = complex_names(&cfg.complexes)?;
    let complexes: Vec<std::result::Result<Complex, String>> = cfg
        .complexes
        .par_iter()
        .enumerate()
        .map(|(i, path)| prepare(cfg, path, cfg.seed.wrapping_add(i as u64)).map_err(|e| format!("{e:#}")))
        .collect();

    let pairs: Vec<(usize, ScoreKind)> =
        (0..complexes.len()).flat_map(|c| cfg.scores.iter().map(move |&k| (c, k))).collect();
    let problems: Vec<std::result::Result<AssemblyProblem, String>> = pairs
        .par_iter()
        .map(|&(c, kind)| match &complexes[c] {
            Ok(cx) => assembly::build_problem(&cx.table, &cx.map, kind).map_err(|e| e.to_string()),
            Err(e) => Err(e.clone()),
        })
        .collect();

    let cells: Vec<(usize, Method)> = (0..pairs.len()).flat_map(|p| cfg.solvers.iter().map(move |&s| (p, s))).collect();
    let runs = cells
        .par_iter()
        .map(|&(p, solver)| {
            let (c, score) = pairs[p];
            let outcome = match (&complexes[c], &problems[p]) {
                (Ok(cx), Ok(problem)) => run_cell(cfg, cx, problem, solver).map_err(|e| format!("{e:#}")),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            if let Err(e) = &outcome {
                warn!("{} / {score} / {solver}: {e}", names[c]);
            }
            Run { complex: names[c].clone(), score, solver, outcome }
        })
        .collect();
    Ok(runs)
}

pub fn summarize(solvers: &[Method], runs: &[Run]) -> Vec<SummaryRow> {
    solvers
        .iter()
        .map(|&solver| {
            let betas: Vec<f64> = runs.iter().filter(|r| r.solver == solver).filter_map(Run::beta).collect();
            let total = runs.iter().filter(|r| r.solver == solver).count();
            let mean_beta = (!betas.is_empty()).then(|| betas.iter().sum::<f64>() / betas.len() as f64);
            SummaryRow { solver, mean_beta, runs: betas.len(), failed: total - betas.len() }
        })
        .collect()
}

fn status(run: &Run) -> String {
    match &run.outcome {
        Ok((r, _)) if r.converged => "ok".into(),
        Ok(_) => "not_converged".into(),
        Err(e) => csv_field(&format!("error: {e}")),
    }
}

pub fn runs_csv(runs: &[Run]) -> String {
    let mut out = format!("{RUNS_HEADER}\n");
    for run in runs {
        let _ = match &run.outcome {
            Ok((r, beta)) => {
                let choices: Vec<String> = r.assignment.choices().iter().map(|k| (k + 1).to_string()).collect();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    csv_field(&run.complex),
                    run.score,
                    run.solver,
                    csv_field(&r.method),
                    r.continuous_objective,
                    r.binary_objective,
                    beta,
                    r.converged,
                    csv_field(&choices.join(" ")),
                    status(run)
                )
            }
            Err(_) => writeln!(out, "{},{},{},,,,,,,{}", csv_field(&run.complex), run.score, run.solver, status(run)),
        };
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let mean = r.mean_beta.map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", r.solver, mean, r.runs, r.failed);
    }
    out
}

/// β for one complex: score kinds as rows, solvers as columns.
pub fn complex_table_csv(complex: &str, scores: &[ScoreKind], solvers: &[Method], runs: &[Run]) -> String {
    let mut out = String::from("score");
    for s in solvers {
        let _ = write!(out, ",{s}");
    }
    out.push('\n');
    for &kind in scores {
        out.push_str(kind.name());
        for &solver in solvers {
            let beta =
                runs.iter().find(|r| r.complex == complex && r.score == kind && r.solver == solver).and_then(Run::beta);
            let _ = write!(out, ",{}", beta.map(|b| b.to_string()).unwrap_or_default());
        }
        out.push('\n');
    }
    out
}

pub fn timings_csv(runs: &[Run]) -> String {
    let mut out = format!("{TIMINGS_HEADER}\n");
    for run in runs {
        let wall = run.outcome.as_ref().map(|(r, _)| r.wall_time.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", csv_field(&run.complex), run.score, run.solver, wall);
    }
    out
}

/// Run the grid and write every report file.
pub fn benchmark(cfg: &ExperimentConfig) -> Result<BenchmarkOutput> {
    let runs = run(cfg)?;
    let summary = summarize(&cfg.solvers, &runs);
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;

    let mut files = Vec::new();
    let mut emit = |name: String, body: String| -> Result<()> {
        let path = cfg.out_dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
        Ok(())
    };
    emit("runs.csv".into(), runs_csv(&runs))?;
    emit("summary.csv".into(), summary_csv(&summary))?;
    for name in complex_names(&cfg.complexes)? {
        emit(format!("table_{name}.csv"), complex_table_csv(&name, &cfg.scores, &cfg.solvers, &runs))?;
    }
    if cfg.timings {
        emit("timings.csv".into(), timings_csv(&runs))?;
    }
    info!("{} runs, {} failed", runs.len(), runs.iter().filter(|r| r.outcome.is_err()).count());
    Ok(BenchmarkOutput { runs, summary, files })
}
