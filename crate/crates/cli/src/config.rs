//! Experiment configuration: flat `key = value` text with dotted section
//! prefixes. Command-line flags are applied on top.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use densfit::assembly::{MapParams, Perturbation, ScoreKind};
use densfit::quality::{DEFAULT_MI_BINS, DEFAULT_RMSD_THRESHOLD};
use densfit::solvers::{Method, SolverConfig};

/// Map-only score reported by `score`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// LAP at resolutions of 10 Å or finer, MI otherwise.
    Auto,
    Lap,
    Mi,
    Both,
    None,
}

impl FromStr for Metric {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "auto" => Metric::Auto,
            "lap" => Metric::Lap,
            "mi" => Metric::Mi,
            "both" => Metric::Both,
            "none" => Metric::None,
            other => bail!("unknown metric {other:?} (expected auto|lap|mi|both|none)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub structure: Option<PathBuf>,
    pub placements: Option<PathBuf>,
    pub map: Option<PathBuf>,
    pub voxel_size: f64,
    pub resolution: f64,
    pub padding: Option<f64>,
    pub positions: usize,
    pub max_rotation: f64,
    pub max_translation: f64,
    pub scores: Vec<ScoreKind>,
    pub solvers: Vec<Method>,
    pub complexes: Vec<PathBuf>,
    pub timings: bool,
    pub threshold: f64,
    pub metric: Metric,
    pub mi_bins: usize,
    pub solver: SolverConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out_dir: PathBuf::from("."),
            structure: None,
            placements: None,
            map: None,
            voxel_size: 1.0,
            resolution: 10.0,
            padding: None,
            positions: 4,
            max_rotation: 30.0,
            max_translation: 6.0,
            scores: vec![ScoreKind::Contact],
            solvers: vec![Method::Sdp, Method::Shift, Method::Sqp, Method::Sa, Method::Linear],
            complexes: Vec::new(),
            timings: false,
            threshold: DEFAULT_RMSD_THRESHOLD,
            metric: Metric::Auto,
            mi_bins: DEFAULT_MI_BINS,
            solver: SolverConfig::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow!("{key}: cannot parse {value:?}: {e}"))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse(key, s)).collect()
}

impl ExperimentConfig {
    /// Apply one `key = value` setting. Relative paths are joined to `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = |v: &str| base.join(v);
        match key {
            "seed" => {
                self.seed = parse(key, value)?;
                self.solver.sa.seed = self.seed;
            }
            "output.dir" => self.out_dir = path(value),
            "input.structure" => self.structure = Some(path(value)),
            "input.placements" => self.placements = Some(path(value)),
            "input.map" => self.map = Some(path(value)),
            "map.voxel_size" => self.voxel_size = parse(key, value)?,
            "map.resolution" => self.resolution = parse(key, value)?,
            "map.padding" => self.padding = Some(parse(key, value)?),
            "placements.positions" => self.positions = parse(key, value)?,
            "placements.max_rotation" => self.max_rotation = parse(key, value)?,
            "placements.max_translation" => self.max_translation = parse(key, value)?,
            "scores" => self.scores = list(key, value)?,
            "solvers" => self.solvers = list(key, value)?,
            "benchmark.complexes" => {
                self.complexes = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(path).collect()
            }
            "benchmark.timings" => self.timings = parse(key, value)?,
            "quality.threshold" => self.threshold = parse(key, value)?,
            "quality.metric" => self.metric = parse(key, value)?,
            "quality.mi_bins" => self.mi_bins = parse(key, value)?,
            "solver.sa.t0" => self.solver.sa.initial_temperature = parse(key, value)?,
            "solver.sa.penalty_weight" => self.solver.sa.penalty_weight = parse(key, value)?,
            "solver.sa.cooling" => self.solver.sa.cooling_factor = parse(key, value)?,
            "solver.sa.iters" => self.solver.sa.max_iterations = parse(key, value)?,
            "solver.sa.raw_step" => self.solver.sa.raw_temperature_step = parse(key, value)?,
            "solver.sdp.max_size" => self.solver.sdp.max_size = parse(key, value)?,
            "solver.sdp.max_iterations" => self.solver.sdp.max_iterations = parse(key, value)?,
            "solver.sdp.tolerance" => self.solver.sdp.tolerance = parse(key, value)?,
            "solver.sqp.max_iterations" => self.solver.sqp.max_iterations = parse(key, value)?,
            "solver.sqp.inner_iterations" => self.solver.sqp.inner_iterations = parse(key, value)?,
            "solver.shift.max_iterations" => self.solver.shift.max_iterations = parse(key, value)?,
            "solver.brute.cap" => self.solver.brute_cap = parse(key, value)?,
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    pub fn parse_str(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            cfg.set(key.trim(), value.trim(), base).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse_str(&text, base).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0) {
            bail!("resolution must be > 0");
        }
        if !(self.voxel_size > 0.0) {
            bail!("voxel size must be > 0");
        }
        if self.positions == 0 {
            bail!("placements.positions must be >= 1");
        }
        if !(self.threshold > 0.0) {
            bail!("rmsd threshold must be > 0");
        }
        if self.mi_bins == 0 {
            bail!("quality.mi_bins must be >= 1");
        }
        self.solver.sa.validate()?;
        Ok(())
    }

    pub fn map_params(&self) -> Result<MapParams> {
        let mut p = MapParams::new(self.voxel_size, self.resolution)?;
        p.padding = self.padding;
        Ok(p)
    }

    pub fn perturbation(&self, seed: u64) -> Perturbation {
        Perturbation {
            positions: self.positions,
            max_rotation: self.max_rotation,
            max_translation: self.max_translation,
            seed,
        }
    }
}
