use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};

use super::simplex::project_blocks;
use super::{barycenter, round_raw, ReportBuilder, SolveReport};
use crate::assembly::AssemblyProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOptions {
    pub max_iterations: usize,
    /// Stop when the projected-gradient norm falls below
    /// `gradient_tol · (1 + ‖b‖)`.
    pub gradient_tol: f64,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        Self { max_iterations: 20_000, gradient_tol: 1e-8 }
    }
}

fn check_symmetric(q: &DMatrix<f64>) -> Result<()> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch { expected: q.nrows(), got: q.ncols() });
    }
    let scale = q.amax();
    let asym = (0..q.nrows())
        .flat_map(|a| (a + 1..q.ncols()).map(move |b| (a, b)))
        .map(|(a, b)| (q[(a, b)] - q[(b, a)]).abs())
        .fold(0.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub(crate) fn eigen_extremes(q: &DMatrix<f64>) -> (f64, f64) {
    if q.nrows() == 0 {
        return (0.0, 0.0);
    }
    let eig = SymmetricEigen::new(q.clone());
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// `Q̂ = Q − λ_min I`, which is positive semidefinite.
pub fn spectrum_shift(q: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    check_symmetric(q)?;
    let (lambda_min, _) = eigen_extremes(q);
    let mut shifted = q.clone();
    for i in 0..q.nrows() {
        shifted[(i, i)] -= lambda_min;
    }
    Ok((shifted, lambda_min))
}

fn quad_objective(q: &DMatrix<f64>, b: &[f64], y: &[f64]) -> f64 {
    let qy = q * nalgebra::DVector::from_column_slice(y);
    let quad: f64 = y.iter().zip(qy.iter()).map(|(a, b)| a * b).sum();
    let lin: f64 = b.iter().zip(y).map(|(b, y)| b * y).sum();
    quad - lin
}

fn quad_gradient(q: &DMatrix<f64>, b: &[f64], y: &[f64]) -> Vec<f64> {
    let qy = q * nalgebra::DVector::from_column_slice(y);
    qy.iter().zip(b).map(|(v, b)| 2.0 * v - b).collect()
}

/// Projected gradient descent for a convex quadratic `yᵀHy − bᵀy` over the
/// product of simplices. Returns the final point, its objective, the
/// accepted-step objective history, the iteration count and whether the
/// projected-gradient test was met.
pub(crate) fn projected_descent(
    h: &DMatrix<f64>,
    lipschitz: f64,
    b: &[f64],
    start: Vec<f64>,
    block: usize,
    max_iterations: usize,
    tol: f64,
) -> (Vec<f64>, f64, Vec<f64>, usize, bool) {
    let b_inf = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // a vanishing quadratic term leaves a linear program; any step works
    let l_eff = lipschitz.max(1e-3 * b_inf).max(1e-12);
    let mut y = start;
    let mut f = quad_objective(h, b, &y);
    let mut history = vec![f];
    for it in 0..max_iterations {
        let g = quad_gradient(h, b, &y);
        let mut t = 1.0 / l_eff;
        let mut accepted = None;
        for _ in 0..60 {
            let mut cand: Vec<f64> = y.iter().zip(&g).map(|(y, g)| y - t * g).collect();
            project_blocks(&mut cand, block);
            let step: Vec<f64> = cand.iter().zip(&y).map(|(c, y)| c - y).collect();
            let step_sq: f64 = step.iter().map(|s| s * s).sum();
            let f_new = quad_objective(h, b, &cand);
            let model = f + g.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>() + step_sq / (2.0 * t);
            if f_new <= model + 1e-15 * (1.0 + f.abs()) {
                accepted = Some((cand, f_new, step_sq.sqrt() / t));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, f_new, pg_norm)) = accepted else {
            return (y, f, history, it, false);
        };
        if pg_norm <= tol {
            return (y, f, history, it + 1, true);
        }
        if f_new > f {
            // rounding noise only; keep the sequence monotone
            return (y, f, history, it + 1, true);
        }
        y = cand;
        f = f_new;
        history.push(f);
    }
    (y, f, history, max_iterations, false)
}

/// Convex relaxation after shifting the spectrum of `Q`: minimize
/// `yᵀQ̂y − bᵀy` over the product of simplices by projected gradient descent
/// (step 1/L, L = 2·λ_max(Q̂), with backtracking), then round.
///
/// On binary points the shifted objective differs from the original by the
/// constant `−λ_min·m`.
pub fn solve_shift(problem: &AssemblyProblem, opts: &ShiftOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let (q_hat, lambda_min) = spectrum_shift(problem.q())?;
    let (_, lambda_max_hat) = eigen_extremes(&q_hat);
    let b = problem.b().as_slice();
    let tol = opts.gradient_tol * (1.0 + problem.b().norm());
    let (y, f, history, iterations, converged) = projected_descent(
        &q_hat,
        2.0 * lambda_max_hat.max(0.0),
        b,
        barycenter(problem),
        problem.positions(),
        opts.max_iterations,
        tol,
    );
    let x = round_raw(problem, &y);
    let original = super::objective_raw(problem, &y);
    let builder = ReportBuilder { problem, method: "shift".into(), started };
    let mut report = builder.finish(y, x, f, iterations, converged);
    report.diagnostics.insert("lambda_min".into(), lambda_min);
    report.diagnostics.insert("lambda_max_shifted".into(), lambda_max_hat);
    report.diagnostics.insert("unshifted_objective".into(), original);
    report.history = history;
    Ok(report)
}
