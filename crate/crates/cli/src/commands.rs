//! The single-shot subcommands: `generate-map`, `build`, `solve`, `score`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use densfit::assembly::{self, plac, prob, AssemblyProblem, PlacementTable, ScoreKind};
use densfit::grid::{dmap, pdb, synthesize_map, AtomRecord, DensityMap, Resolution};
use densfit::quality::{self, FitQuality};
use densfit::solvers::{self, AssignmentVector, Method, SolveReport};
use log::info;

use crate::config::{ExperimentConfig, Metric};

pub const QUALITY_HEADER: &str = "protein_id,rmsd_A,correct";
pub const QUALITY_SUMMARY_HEADER: &str = "beta,mi,lap_score";

fn structure(cfg: &ExperimentConfig) -> Result<&Path> {
    cfg.structure.as_deref().ok_or_else(|| anyhow!("no structure file given (input.structure)"))
}

fn load_atoms(path: &Path) -> Result<Vec<AtomRecord>> {
    let atoms = pdb::load(path).with_context(|| format!("reading {}", path.display()))?;
    if atoms.is_empty() {
        bail!("{} contains no atoms", path.display());
    }
    Ok(atoms)
}

fn create_out_dir(cfg: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))
}

/// Density map of the whole complex.
pub fn complex_map(cfg: &ExperimentConfig, atoms: &[AtomRecord]) -> Result<DensityMap> {
    Ok(synthesize_map(atoms, cfg.voxel_size, Resolution::new(cfg.resolution)?, cfg.padding)?)
}

/// Synthesize the complex map for `input.structure` and write it as DMAP.
pub fn generate_map(cfg: &ExperimentConfig, output: &Path) -> Result<DensityMap> {
    let atoms = load_atoms(structure(cfg)?)?;
    let map = complex_map(cfg, &atoms)?;
    if let Some(dir) = output.parent() {
        fs::create_dir_all(dir)?;
    }
    dmap::save(&map, output).with_context(|| format!("writing {}", output.display()))?;
    Ok(map)
}

pub struct Built {
    pub problem: AssemblyProblem,
    pub table: PlacementTable,
    pub lambda_min: f64,
    pub problem_path: PathBuf,
    pub placements_path: PathBuf,
}

/// Candidate placements: from `input.placements` when given, otherwise
/// generated around the native structure.
pub fn placements(cfg: &ExperimentConfig, natives: &[Vec<AtomRecord>], seed: u64) -> Result<PlacementTable> {
    let params = cfg.map_params()?;
    match &cfg.placements {
        Some(path) => {
            let file = plac::load(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(file.into_table(&params)?)
        }
        None => Ok(assembly::generate_placements(natives, &cfg.perturbation(seed), &params)?),
    }
}

/// Build the quadratic model and write `placements.plac` and
/// `problem.prob` into the output directory.
pub fn build(cfg: &ExperimentConfig, kind: ScoreKind) -> Result<Built> {
    let atoms = load_atoms(structure(cfg)?)?;
    let natives = pdb::group_by_protein(&atoms);
    let table = placements(cfg, &natives, cfg.seed)?;
    let map = match &cfg.map {
        Some(path) => dmap::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => complex_map(cfg, &atoms)?,
    };
    let problem = assembly::build_problem(&table, &map, kind)?;
    let (_, lambda_min) = solvers::spectrum_shift(problem.q())?;
    info!("n = {} ({} x {}), lambda_min = {lambda_min:.6e}", problem.n(), problem.proteins(), problem.positions());

    create_out_dir(cfg)?;
    let placements_path = cfg.out_dir.join("placements.plac");
    let problem_path = cfg.out_dir.join("problem.prob");
    plac::save(&plac::PlacementFile::from_table(&table), &placements_path)?;
    prob::save(&problem, &problem_path)?;
    Ok(Built { problem, table, lambda_min, problem_path, placements_path })
}

pub fn solve(problem_path: &Path, method: Method, cfg: &ExperimentConfig) -> Result<SolveReport> {
    let problem = prob::load(problem_path).with_context(|| format!("reading {}", problem_path.display()))?;
    let report = solvers::solve(&problem, method, &cfg.solver)?;
    Ok(report)
}

/// Parse a 1-based, comma-separated position list such as `1,3,2`.
pub fn parse_assignment(text: &str, positions: usize) -> Result<AssignmentVector> {
    let choices = text
        .split(',')
        .map(|s| {
            let k: usize = s.trim().parse().map_err(|_| anyhow!("bad position {s:?} in assignment"))?;
            if k == 0 || k > positions {
                bail!("position {k} outside 1..={positions}");
            }
            Ok(k - 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AssignmentVector::from_choices(&choices, positions)?)
}

fn use_lap(metric: Metric, resolution: f64) -> bool {
    match metric {
        Metric::Lap | Metric::Both => true,
        Metric::Auto => resolution <= 10.0,
        Metric::Mi | Metric::None => false,
    }
}

fn use_mi(metric: Metric, resolution: f64) -> bool {
    match metric {
        Metric::Mi | Metric::Both => true,
        Metric::Auto => resolution > 10.0,
        Metric::Lap | Metric::None => false,
    }
}

/// RMSD/β of an assignment plus the configured map score.
pub fn evaluate(
    cfg: &ExperimentConfig,
    assignment: &AssignmentVector,
    table: &PlacementTable,
    natives: &[Vec<AtomRecord>],
    target: Option<&DensityMap>,
) -> Result<FitQuality> {
    let mut fit = quality::evaluate_fit(assignment, table, natives, cfg.threshold)?;
    let (lap, mi) = (use_lap(cfg.metric, cfg.resolution), use_mi(cfg.metric, cfg.resolution));
    if lap || mi {
        let target = target.ok_or_else(|| anyhow!("map score requested without a target map"))?;
        let probe = quality::probe_map(assignment, table, Resolution::new(cfg.resolution)?, target)?;
        if lap {
            fit.lap_score = Some(quality::lap_score(&probe, target)?);
        }
        if mi {
            fit.mi = Some(quality::mutual_information(&probe, target, cfg.mi_bins)?.value);
        }
    }
    Ok(fit)
}

/// Score an assignment for `input.placements` against `input.structure`
/// and write `quality.csv`.
pub fn score(cfg: &ExperimentConfig, assignment: &str) -> Result<FitQuality> {
    if cfg.placements.is_none() {
        bail!("no placement file given (input.placements)");
    }
    let atoms = load_atoms(structure(cfg)?)?;
    let natives = pdb::group_by_protein(&atoms);
    let table = placements(cfg, &natives, cfg.seed)?;
    let assignment = parse_assignment(assignment, table.positions())?;
    let target = match &cfg.map {
        Some(path) => dmap::load(path)?,
        None => complex_map(cfg, &atoms)?,
    };
    let fit = evaluate(cfg, &assignment, &table, &natives, Some(&target))?;
    create_out_dir(cfg)?;
    fs::write(cfg.out_dir.join("quality.csv"), quality_csv(&fit))?;
    Ok(fit)
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Per-protein rows followed by a summary block.
pub fn quality_csv(fit: &FitQuality) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{QUALITY_HEADER}");
    for (i, (r, c)) in fit.per_protein_rmsd.iter().zip(&fit.correct).enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, r, c);
    }
    let _ = writeln!(out, "{QUALITY_SUMMARY_HEADER}");
    let _ = writeln!(out, "{},{},{}", fit.beta, opt(fit.mi), opt(fit.lap_score));
    out
}
