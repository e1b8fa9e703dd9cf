//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::{toy_complex, write_pdb};
use densfit::assembly::{self, prob, AssemblyProblem, MapParams, Perturbation, ScoreKind};
use densfit::grid::{self, dmap, gaussian_kernel_len, laplacian_filter, synthesize_map, DensityMap, Resolution};
use densfit::nalgebra::{DMatrix, DVector};
use densfit::quality;
use densfit::solvers::{
    acceptance_probability, solve_bruteforce, solve_linear, solve_sa, solve_sdp, solve_sqp, spectrum_shift, SaParams,
    SdpOptions, SqpOptions, DEFAULT_BRUTE_CAP,
};
use densfit_cli::{benchmark, ExperimentConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_instance(proteins: usize, positions: usize, rng: &mut ChaCha8Rng) -> AssemblyProblem {
    let n = proteins * positions;
    let mut q = DMatrix::zeros(n, n);
    for a in 0..n {
        for c in a + 1..n {
            if a / positions != c / positions {
                let v = rng.random_range(-1.0..1.0);
                q[(a, c)] = v;
                q[(c, a)] = v;
            }
        }
    }
    let b = DVector::from_fn(n, |_, _| rng.random_range(0.0..1.0));
    AssemblyProblem::new(proteins, positions, q, b, ScoreKind::Ccf).unwrap()
}

/// The 200-instance suite: m, N ∈ {2, 3}, 50 of each shape.
fn suite() -> Vec<AssemblyProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_101);
    (0..200).map(|i| random_instance(2 + i % 2, 2 + (i / 2) % 2, &mut rng)).collect()
}

/// Every one-hot assignment as position lists.
fn assignments(proteins: usize, positions: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..proteins {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..positions).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

/// `xᵀQx − bᵀx` for a one-hot assignment, by direct double loop.
fn loop_objective(q: &DMatrix<f64>, b: &DVector<f64>, positions: usize, choice: &[usize]) -> f64 {
    let idx: Vec<usize> = choice.iter().enumerate().map(|(i, k)| i * positions + k).collect();
    let mut f = 0.0;
    for &a in &idx {
        for &c in &idx {
            f += q[(a, c)];
        }
        f -= b[a];
    }
    f
}

fn argmin_set(values: &[f64]) -> Vec<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * (1.0 + min.abs());
    (0..values.len()).filter(|&i| values[i] <= min + tol).collect()
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure!(elapsed.as_secs_f64() < limit, "took {:.1} s, limit {limit} s", elapsed.as_secs_f64());
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    for (i, p) in suite().iter().enumerate() {
        let all = assignments(p.proteins(), p.positions());
        let (q_hat, _) = spectrum_shift(p.q()).map_err(|e| e.to_string())?;
        let f: Vec<f64> = all.iter().map(|x| loop_objective(p.q(), p.b(), p.positions(), x)).collect();
        let f_hat: Vec<f64> = all.iter().map(|x| loop_objective(&q_hat, p.b(), p.positions(), x)).collect();
        ensure!(argmin_set(&f) == argmin_set(&f_hat), "instance {i}: argmin sets differ under the shift");

        let opt = solve_bruteforce(p, DEFAULT_BRUTE_CAP).map_err(|e| e.to_string())?.binary_objective;
        let enumerated = f.iter().copied().fold(f64::INFINITY, f64::min);
        ensure!(
            (opt - enumerated).abs() <= 1e-12 * (1.0 + opt.abs()),
            "instance {i}: brute force {opt} vs {enumerated}"
        );

        let sdp = solve_sdp(p, &SdpOptions::default()).map_err(|e| e.to_string())?;
        let gap = sdp.continuous_objective - opt;
        worst_gap = worst_gap.max(gap / (1.0 + opt.abs()));
        ensure!(
            gap <= 1e-5 * (1.0 + opt.abs()),
            "instance {i}: SDP bound {} above optimum {opt}",
            sdp.continuous_objective
        );
    }
    within(started.elapsed(), 60.0)?;
    Ok(format!(
        "200 instances, argmin sets invariant, max (sdp - opt)/(1+|opt|) = {worst_gap:.2e}, {:.1} s",
        started.elapsed().as_secs_f64()
    ))
}

fn sa_effectiveness() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut instances = Vec::new();
    while instances.len() < 20 {
        let p = random_instance(2, 3, &mut rng);
        let mut f: Vec<f64> = assignments(2, 3).iter().map(|x| loop_objective(p.q(), p.b(), 3, x)).collect();
        f.sort_by(f64::total_cmp);
        if f[1] - f[0] > 1e-6 {
            instances.push(p);
        }
    }
    let mut found = 0;
    let mut run_hits = 0;
    for p in &instances {
        let opt = solve_bruteforce(p, DEFAULT_BRUTE_CAP).map_err(|e| e.to_string())?;
        let mut best = f64::INFINITY;
        let mut best_choice = Vec::new();
        for seed in 0..20 {
            let params = SaParams { seed, ..SaParams::default() };
            let r = solve_sa(p, &params).map_err(|e| e.to_string())?;
            if r.assignment == opt.assignment {
                run_hits += 1;
            }
            if r.binary_objective < best {
                best = r.binary_objective;
                best_choice = r.assignment.choices();
            }
        }
        if best_choice == opt.assignment.choices() {
            found += 1;
        }
    }
    within(started.elapsed(), 60.0)?;
    ensure!(found * 10 >= 9 * instances.len(), "SA(100,1) found {found}/20 optima");
    Ok(format!(
        "SA(100,1) with 20 restarts found {found}/20 optima ({run_hits}/400 single runs), {:.1} s",
        started.elapsed().as_secs_f64()
    ))
}

fn warm_start() -> Outcome {
    let mut flagged = 0;
    for (i, p) in suite().iter().enumerate() {
        let lin = solve_linear(p).binary_objective;
        let limit = lin + 1e-9 * lin.abs().max(f64::MIN_POSITIVE);
        let sqp = solve_sqp(p, &SqpOptions::default()).map_err(|e| e.to_string())?;
        let sa = solve_sa(p, &SaParams { seed: i as u64, ..SaParams::default() }).map_err(|e| e.to_string())?;
        for r in [&sqp, &sa] {
            ensure!(r.warm_start.as_deref() == Some("linear"), "instance {i}: {} not warm-started", r.method);
            if r.binary_objective > limit {
                ensure!(!r.converged, "instance {i}: {} {} worse than linear {lin}", r.method, r.binary_objective);
                flagged += 1;
            }
        }
    }
    Ok(format!("200 instances, SQP and SA never worse than linear ({flagged} flagged non-converged)"))
}

fn end_to_end() -> Outcome {
    let started = Instant::now();
    let atoms = toy_complex(20, 14.0);
    let natives = grid::pdb::group_by_protein(&atoms);
    let params = MapParams::new(1.0, 10.0).map_err(|e| e.to_string())?;
    let bounds = Perturbation { positions: 4, max_rotation: 30.0, max_translation: 6.0, seed: 11 };
    let table = assembly::generate_placements(&natives, &bounds, &params).map_err(|e| e.to_string())?;
    let map = synthesize_map(&atoms, 1.0, Resolution::new(10.0).unwrap(), None).map_err(|e| e.to_string())?;
    let problem = assembly::build_problem(&table, &map, ScoreKind::Contact).map_err(|e| e.to_string())?;
    let r = solve_bruteforce(&problem, DEFAULT_BRUTE_CAP).map_err(|e| e.to_string())?;
    ensure!(r.assignment.choices() == vec![0, 0], "brute force chose {:?}", r.assignment.choices());
    let fit = quality::evaluate_fit(&r.assignment, &table, &natives, quality::DEFAULT_RMSD_THRESHOLD)
        .map_err(|e| e.to_string())?;
    ensure!(fit.beta == 1.0, "beta = {}", fit.beta);
    ensure!(fit.per_protein_rmsd.iter().all(|&d| d <= 1e-9), "rmsd {:?}", fit.per_protein_rmsd);
    within(started.elapsed(), 30.0)?;
    Ok(format!(
        "2 x 20 atoms, N = 4, Contact: natives chosen, beta = 1, rmsd = {:?}, {:.1} s",
        fit.per_protein_rmsd,
        started.elapsed().as_secs_f64()
    ))
}

fn random_map(rng: &mut ChaCha8Rng, dims: [usize; 3], origin: [f64; 3]) -> DensityMap {
    let values = (0..dims.iter().product()).map(|_| rng.random_range(-1.0..1.0)).collect();
    DensityMap::new(dims, origin, 1.0, values).unwrap()
}

fn entropy(values: &[f64], bins: usize) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = if v == hi { bins - 1 } else { ((v - lo) / (hi - lo) * bins as f64) as usize };
        counts[k] += 1;
    }
    let n = values.len() as f64;
    counts.iter().filter(|&&c| c > 0).map(|&c| -(c as f64 / n) * (c as f64 / n).ln()).sum()
}

fn kernels() -> Outcome {
    let sigma_vox = Resolution::new(10.0).unwrap().sigma();
    ensure!(sigma_vox == 1.87, "sigma = {sigma_vox}");
    ensure!(gaussian_kernel_len(sigma_vox) == 9, "kernel length {}", gaussian_kernel_len(sigma_vox));

    let constant = DensityMap::filled([6, 7, 8], [0.0; 3], 1.0, 3.25).unwrap();
    let lap = laplacian_filter(&constant).map_err(|e| e.to_string())?;
    for z in 1..7 {
        for y in 1..6 {
            for x in 1..5 {
                ensure!(lap.get(x, y, z) == 0.0, "laplacian of constant at ({x},{y},{z}) = {}", lap.get(x, y, z));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let a = random_map(&mut rng, [4; 3], [0.0; 3]);
        let b = random_map(&mut rng, [4; 3], [1.0, -2.0, 0.0]);
        let ab = grid::cross_correlate(&a, &b).map_err(|e| e.to_string())?;
        let ba = grid::cross_correlate(&b, &a).map_err(|e| e.to_string())?;
        ensure!(ab == ba, "ccf asymmetric: {ab} vs {ba}");
        let alpha = rng.random_range(-3.0..3.0);
        let scaled = grid::cross_correlate(&a.scaled(alpha), &b).map_err(|e| e.to_string())?;
        ensure!(
            (scaled - alpha * ab).abs() <= 1e-12 * (alpha * ab).abs().max(f64::MIN_POSITIVE),
            "ccf not bilinear: {scaled} vs {}",
            alpha * ab
        );
    }

    let x = random_map(&mut rng, [10; 3], [0.0; 3]);
    let mi = quality::mutual_information(&x, &x, 20).map_err(|e| e.to_string())?.value;
    let h = entropy(x.values(), 20);
    ensure!((mi - h).abs() <= 1e-9, "MI(X,X) = {mi}, H(X) = {h}");

    for t in [1e-3, 1.0, 100.0] {
        ensure!(acceptance_probability(0.0, t) == 0.5, "acceptance at T = {t}");
    }
    Ok(format!(
        "kernel 9 taps, constant laplacian 0, ccf symmetric/bilinear, |MI-H| = {:.1e}, p(0) = 0.5",
        (mi - h).abs()
    ))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = write_pdb(dir.path(), "alpha.pdb", &toy_complex(12, 14.0));
    let b = write_pdb(dir.path(), "beta.pdb", &toy_complex(15, 11.0));
    let text = format!(
        "seed = 9\nplacements.positions = 3\nscores = contact,ccf,skin-core,core-skin\n\
         solvers = sdp,shift,sqp,sa,linear,brute\nsolver.sa.iters = 1000\nbenchmark.complexes = {}, {}\n",
        a.display(),
        b.display()
    );
    let mut outputs = Vec::new();
    for (run, threads) in [(1, 0), (2, 0), (3, 1)] {
        let mut cfg = ExperimentConfig::parse_str(&text, dir.path()).map_err(|e| e.to_string())?;
        cfg.out_dir = dir.path().join(format!("run{run}"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        pool.install(|| benchmark::benchmark(&cfg)).map_err(|e| format!("{e:#}"))?;
        outputs.push(csv_files(&cfg.out_dir));
    }
    ensure!(outputs[0].len() == 4, "expected 4 csv files, got {}", outputs[0].len());
    ensure!(outputs[0] == outputs[1], "two runs differ");
    ensure!(outputs[0] == outputs[2], "single-threaded run differs");
    let rows =
        String::from_utf8_lossy(&outputs[0].iter().find(|(n, _)| n == "runs.csv").unwrap().1).lines().count() - 1;
    Ok(format!("3 benchmark runs ({rows} cells, 4 CSV files) byte-identical, one single-threaded"))
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..20 {
        let dims = [rng.random_range(1..9), rng.random_range(1..9), rng.random_range(1..9)];
        let origin = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
        let vs = rng.random_range(0.3..3.0);
        let values = (0..dims.iter().product()).map(|_| rng.random_range(-1e3..1e3)).collect();
        let map = DensityMap::new(dims, origin, vs, values).unwrap();
        let bytes = dmap::to_bytes(&map);
        let back = dmap::read(&bytes[..]).map_err(|e| e.to_string())?;
        ensure!(dmap::to_bytes(&back) == bytes, "DMAP artifact {i} changed on round trip");

        let p = random_instance(rng.random_range(1..4), rng.random_range(1..4), &mut rng);
        let bytes = prob::to_bytes(&p);
        let back = prob::read(&bytes[..]).map_err(|e| e.to_string())?;
        ensure!(prob::to_bytes(&back) == bytes, "PROB artifact {i} changed on round trip");
    }
    Ok("20 DMAP and 20 PROB artifacts byte-identical after write-read-write".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 SA effectiveness", sa_effectiveness),
        ("3 warm-start pipeline", warm_start),
        ("4 end-to-end synthetic complex", end_to_end),
        ("5 numerical kernels", kernels),
        ("6 benchmark determinism", determinism),
        ("7 format round trips", round_trips),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(format!(
                "panicked: {:?}",
                e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            ))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
