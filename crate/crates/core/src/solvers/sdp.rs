//! Semidefinite relaxation solved by ADMM on the lifted matrix
//!
//! ```text
//! Z = [ 1  yᵀ ]
//!     [ y  Y  ]   ⪰ 0,   A y = 1,   diag(Y) = y
//! ```
//!
//! with objective `⟨C, Z⟩ = Tr(QY) − bᵀy`. Each iteration projects onto the
//! affine constraints (closed form) and onto the PSD cone (eigenvalue
//! clipping).

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{round_raw, ReportBuilder, SolveReport};
use crate::assembly::AssemblyProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SdpOptions {
    /// Largest accepted n = m·N; the lifted matrix is (n+1)×(n+1).
    pub max_size: usize,
    pub max_iterations: usize,
    /// Primal and dual residual target, in units of the normalized cost.
    pub tolerance: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { max_size: 64, max_iterations: 50_000, tolerance: 1e-7 }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub report: SolveReport,
    /// Final PSD iterate `[[1, yᵀ], [y, Y]]`.
    pub lifted: DMatrix<f64>,
}

fn cost_matrix(problem: &AssemblyProblem) -> DMatrix<f64> {
    let n = problem.n();
    let mut c = DMatrix::zeros(n + 1, n + 1);
    c.view_mut((1, 1), (n, n)).copy_from(problem.q());
    for a in 0..n {
        c[(0, a + 1)] = -0.5 * problem.b()[a];
        c[(a + 1, 0)] = -0.5 * problem.b()[a];
    }
    c
}

/// Frobenius projection of a symmetric matrix onto
/// `{Z₀₀ = 1, Σ_block Z₀ₖ = 1, Zₖₖ = Z₀ₖ}`.
///
/// Only row/column 0 and the diagonal are touched. For entry k the
/// off-diagonal pair carries weight 2 and the diagonal weight 1, so the
/// unconstrained fit of the shared value is `(2·Z₀ₖ + Zₖₖ)/3`; the block-sum
/// constraint then shifts a block's values equally.
fn project_affine(z: &mut DMatrix<f64>, positions: usize) {
    let n = z.nrows() - 1;
    z[(0, 0)] = 1.0;
    let mut fit: Vec<f64> = (1..=n).map(|k| (z[(0, k)] + z[(k, 0)] + z[(k, k)]) / 3.0).collect();
    for block in fit.chunks_mut(positions) {
        let corr = (1.0 - block.iter().sum::<f64>()) / block.len() as f64;
        block.iter_mut().for_each(|v| *v += corr);
    }
    for (k, v) in fit.into_iter().enumerate() {
        z[(0, k + 1)] = v;
        z[(k + 1, 0)] = v;
        z[(k + 1, k + 1)] = v;
    }
}

fn project_psd(z: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let eig = SymmetricEigen::new(z.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let v = &eig.eigenvectors;
    let mut out = v * DMatrix::from_diagonal(&clipped) * v.transpose();
    out = (&out + out.transpose()) * 0.5;
    (out, min)
}

fn min_eigenvalue(z: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(z.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Solve the SDP relaxation and keep the lifted matrix.
pub fn solve_sdp_detailed(problem: &AssemblyProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let started = Instant::now();
    let n = problem.n();
    if n > opts.max_size {
        return Err(Error::SizeCap { size: n as u128, cap: opts.max_size as u128 });
    }
    let per = problem.positions();
    let cost = cost_matrix(problem);
    let scale = cost.amax().max(f64::MIN_POSITIVE);
    let c = &cost / scale;

    // start from the barycentre lifted as Y = diag(y)
    let mut w = DMatrix::zeros(n + 1, n + 1);
    w[(0, 0)] = 1.0;
    for k in 1..=n {
        let y = 1.0 / per as f64;
        w[(0, k)] = y;
        w[(k, 0)] = y;
        w[(k, k)] = y;
    }
    let mut u = DMatrix::zeros(n + 1, n + 1);
    let mut rho = 1.0;
    let mut converged = false;
    let mut iterations = opts.max_iterations;
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    for it in 0..opts.max_iterations {
        let mut z = &w - &u - &c / rho;
        project_affine(&mut z, per);
        let (w_new, _) = project_psd(&(&z + &u));
        primal = (&z - &w_new).norm();
        dual = rho * (&w_new - &w).norm();
        u += &z - &w_new;
        w = w_new;
        if primal <= opts.tolerance && dual <= opts.tolerance {
            converged = true;
            iterations = it + 1;
            break;
        }
        if it % 25 != 24 {
            continue;
        }
        if primal > 10.0 * dual {
            rho *= 2.0;
            u /= 2.0;
        } else if dual > 10.0 * primal {
            rho /= 2.0;
            u *= 2.0;
        }
    }

    let objective =
        (0..=n).flat_map(|r| (0..=n).map(move |s| (r, s))).map(|(r, s)| cost[(r, s)] * w[(r, s)]).sum::<f64>();
    let y: Vec<f64> = (1..=n).map(|k| w[(0, k)]).collect();
    let diag_residual = (1..=n).map(|k| (w[(k, k)] - w[(0, k)]).abs()).fold(0.0, f64::max);
    let block_residual = y.chunks(per).map(|b| (b.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    let lifted_min = min_eigenvalue(&w);

    let x = round_raw(problem, &y);
    let builder = ReportBuilder { problem, method: "sdp".into(), started };
    let mut report = builder.finish(y.iter().map(|v| v.clamp(0.0, 1.0)).collect(), x, objective, iterations, converged);
    let d = &mut report.diagnostics;
    d.insert("primal_residual".into(), primal);
    d.insert("dual_residual".into(), dual);
    d.insert("diag_residual".into(), diag_residual);
    d.insert("block_residual".into(), block_residual);
    d.insert("corner_residual".into(), (w[(0, 0)] - 1.0).abs());
    d.insert("lifted_min_eigenvalue".into(), lifted_min);
    d.insert("rho".into(), rho);
    Ok(SdpSolution { report, lifted: w })
}

/// SDP relaxation lower bound `Tr(QY*) − bᵀy*`, rounded from `y*`.
pub fn solve_sdp(problem: &AssemblyProblem, opts: &SdpOptions) -> Result<SolveReport> {
    solve_sdp_detailed(problem, opts).map(|s| s.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::testing::random_problem;
    use crate::solvers::{solve_bruteforce, solve_linear, DEFAULT_BRUTE_CAP};

    #[test]
    fn affine_projection_satisfies_constraints() {
        let mut z = DMatrix::from_fn(5, 5, |r, c| ((r * 7 + c * 3) % 5) as f64 - 1.5);
        z = (&z + z.transpose()) * 0.5;
        project_affine(&mut z, 2);
        assert_eq!(z[(0, 0)], 1.0);
        for k in 1..5 {
            assert_eq!(z[(k, k)], z[(0, k)]);
            assert_eq!(z[(k, 0)], z[(0, k)]);
        }
        assert!((z[(0, 1)] + z[(0, 2)] - 1.0).abs() < 1e-15);
        assert!((z[(0, 3)] + z[(0, 4)] - 1.0).abs() < 1e-15);
        // idempotent
        let mut again = z.clone();
        project_affine(&mut again, 2);
        assert!((&again - &z).amax() < 1e-15);
    }

    #[test]
    fn single_protein_matches_linear_bound() {
        for seed in 0..5 {
            let p = random_problem(1, 4, seed);
            let r = solve_sdp(&p, &SdpOptions::default()).unwrap();
            let lin = solve_linear(&p);
            assert!((r.continuous_objective - lin.continuous_objective).abs() <= 1e-5, "seed {seed}");
        }
    }

    #[test]
    fn lower_bounds_the_optimum_and_stays_feasible() {
        for seed in 0..30 {
            let m = 2 + seed as usize % 2;
            let per = 2 + seed as usize / 2 % 2;
            let p = random_problem(m, per, 500 + seed);
            let sol = solve_sdp_detailed(&p, &SdpOptions::default()).unwrap();
            let opt = solve_bruteforce(&p, DEFAULT_BRUTE_CAP).unwrap().binary_objective;
            assert!(sol.report.continuous_objective <= opt + 1e-5 * (1.0 + opt.abs()), "seed {seed}");
            assert!(min_eigenvalue(&sol.lifted) >= -1e-6);
            assert!(
                sol.report.diagnostics["diag_residual"] <= 1e-5,
                "seed {seed} {:?} {}",
                sol.report.diagnostics,
                sol.report.iterations
            );
            assert!(sol.report.converged, "seed {seed}");
        }
    }

    #[test]
    fn size_cap() {
        let p = random_problem(3, 3, 0);
        let opts = SdpOptions { max_size: 8, ..SdpOptions::default() };
        assert!(matches!(solve_sdp(&p, &opts), Err(Error::SizeCap { size: 9, cap: 8 })));
    }
}
