use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use densfit::assembly::ScoreKind;
use densfit::solvers::{report, Method};
use densfit_cli::benchmark;
use densfit_cli::commands;
use densfit_cli::{ExperimentConfig, Metric};

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_ERROR: u8 = 3;

/// Fit multi-body assemblies into density maps.
#[derive(Parser)]
#[command(name = "densfit", version)]
struct Cli {
    /// Key=value experiment config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapFlags {
    #[arg(long)]
    voxel_size: Option<f64>,
    #[arg(long)]
    resolution: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the density map of a complex and write it as DMAP.
    GenerateMap {
        structure: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        map: MapFlags,
    },
    /// Build the quadratic model for a complex.
    Build {
        structure: Option<PathBuf>,
        #[arg(long)]
        placements: Option<PathBuf>,
        #[arg(long)]
        map_file: Option<PathBuf>,
        #[arg(long, default_value = "contact")]
        score: ScoreKind,
        /// Candidate positions per protein when generating placements.
        #[arg(short = 'n', long)]
        positions: Option<usize>,
        #[command(flatten)]
        map: MapFlags,
    },
    /// Solve a PROB file.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        penalty_weight: Option<f64>,
        #[arg(long)]
        cooling: Option<f64>,
        #[arg(long)]
        iters: Option<usize>,
    },
    /// RMSD, beta and map score of an assignment.
    Score {
        /// 1-based positions, one per protein, e.g. `1,3`.
        assignment: String,
        #[arg(long)]
        structure: Option<PathBuf>,
        #[arg(long)]
        placements: Option<PathBuf>,
        #[arg(long)]
        map_file: Option<PathBuf>,
        #[arg(long)]
        metric: Option<Metric>,
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        map: MapFlags,
    },
    /// Run the complex x score x solver grid.
    Benchmark {
        complexes: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        scores: Option<Vec<ScoreKind>>,
        #[arg(long, value_delimiter = ',')]
        solvers: Option<Vec<Method>>,
        #[arg(long)]
        timings: bool,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_map(cfg: &mut ExperimentConfig, map: MapFlags) {
    set(&mut cfg.voxel_size, map.voxel_size);
    set(&mut cfg.resolution, map.resolution);
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        cfg.solver.sa.seed = seed;
    }
    set(&mut cfg.out_dir, cli.out_dir.clone());
    Ok(cfg)
}

fn run(cli: Cli) -> std::result::Result<u8, Failure> {
    let mut cfg = config(&cli).map_err(Failure::Usage)?;
    match cli.command {
        Command::GenerateMap { structure, output, map } => {
            set(&mut cfg.structure, structure.map(Some));
            apply_map(&mut cfg, map);
            cfg.validate().map_err(Failure::Usage)?;
            let output = output.unwrap_or_else(|| cfg.out_dir.join("map.dmap"));
            let m = commands::generate_map(&cfg, &output).map_err(Failure::Runtime)?;
            let [x, y, z] = m.dims();
            println!("dims={x}x{y}x{z}");
            println!("voxel_size={}", m.voxel_size());
            println!("mass={}", m.sum());
            println!("path={}", output.display());
        }
        Command::Build { structure, placements, map_file, score, positions, map } => {
            set(&mut cfg.structure, structure.map(Some));
            set(&mut cfg.placements, placements.map(Some));
            set(&mut cfg.map, map_file.map(Some));
            set(&mut cfg.positions, positions);
            apply_map(&mut cfg, map);
            cfg.validate().map_err(Failure::Usage)?;
            let built = commands::build(&cfg, score).map_err(Failure::Runtime)?;
            println!("proteins={}", built.problem.proteins());
            println!("positions={}", built.problem.positions());
            println!("n={}", built.problem.n());
            println!("lambda_min={}", built.lambda_min);
            println!("problem={}", built.problem_path.display());
            println!("placements={}", built.placements_path.display());
        }
        Command::Solve { problem, method, t0, penalty_weight, cooling, iters } => {
            let sa = &mut cfg.solver.sa;
            set(&mut sa.initial_temperature, t0);
            set(&mut sa.penalty_weight, penalty_weight);
            set(&mut sa.cooling_factor, cooling);
            set(&mut sa.max_iterations, iters);
            cfg.validate().map_err(Failure::Usage)?;
            let r = commands::solve(&problem, method, &cfg).map_err(Failure::Runtime)?;
            print!("{}", report::to_key_value(&r, None));
            println!("{}", report::CSV_HEADER);
            println!("{}", report::to_csv_row(&r, None));
            if !r.converged {
                return Ok(EXIT_NOT_CONVERGED);
            }
        }
        Command::Score { assignment, structure, placements, map_file, metric, threshold, map } => {
            set(&mut cfg.structure, structure.map(Some));
            set(&mut cfg.placements, placements.map(Some));
            set(&mut cfg.map, map_file.map(Some));
            set(&mut cfg.metric, metric);
            set(&mut cfg.threshold, threshold);
            apply_map(&mut cfg, map);
            cfg.validate().map_err(Failure::Usage)?;
            let fit = commands::score(&cfg, &assignment).map_err(Failure::Runtime)?;
            print!("{}", commands::quality_csv(&fit));
        }
        Command::Benchmark { complexes, scores, solvers, timings } => {
            if !complexes.is_empty() {
                cfg.complexes = complexes;
            }
            set(&mut cfg.scores, scores);
            set(&mut cfg.solvers, solvers);
            cfg.timings |= timings;
            cfg.validate().map_err(Failure::Usage)?;
            let out = benchmark::benchmark(&cfg).map_err(Failure::Runtime)?;
            print!("{}", benchmark::summary_csv(&out.summary));
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
