use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};

use super::shift::{eigen_extremes, projected_descent};
use super::{gradient, objective_raw, round_raw, solve_linear, ReportBuilder, SolveReport};
use crate::assembly::AssemblyProblem;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SqpOptions {
    pub max_iterations: usize,
    /// Projected-gradient iterations per quadratic subproblem.
    pub inner_iterations: usize,
    pub step_tol: f64,
}

impl Default for SqpOptions {
    fn default() -> Self {
        Self { max_iterations: 500, inner_iterations: 200, step_tol: 1e-8 }
    }
}

/// `2Q` with negative eigenvalues zeroed, plus `εI` with `ε = 1e-8·‖Q‖`.
fn psd_hessian(q: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(2.0 * q);
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let v = &eig.eigenvectors;
    let mut h = v * DMatrix::from_diagonal(&clipped) * v.transpose();
    h = (&h + h.transpose()) * 0.5;
    let eps = 1e-8 * q.norm();
    for i in 0..h.nrows() {
        h[(i, i)] += eps;
    }
    h
}

/// Local SQP method warm-started at the linear solution.
///
/// Each iteration minimizes the convex model `gᵀΔ + ½ΔᵀHΔ` over steps that
/// keep `y + Δ` in the product of simplices (so `AΔ = 0` and the box hold),
/// then backtracks on the true objective. Every accepted iterate is rounded
/// and the best binary point seen is returned, so the answer is never worse
/// than the warm start.
pub fn solve_sqp(problem: &AssemblyProblem, opts: &SqpOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let warm = solve_linear(problem);
    let per = problem.positions();
    let h = psd_hessian(problem.q());
    let (_, h_max) = eigen_extremes(&h);
    // the subproblem is ½ΔᵀHΔ, i.e. (½H) in the yᵀMy form used by the inner solver
    let half_h = &h * 0.5;

    let mut y = warm.relaxed.clone();
    let mut f = objective_raw(problem, &y);
    let mut history = vec![f];
    let mut best_x = warm.assignment.clone();
    let mut best_binary = warm.binary_objective;
    let mut converged = false;
    let mut iterations = opts.max_iterations;

    for it in 0..opts.max_iterations {
        let g = gradient(problem, &y);
        // the model in z = y + Δ is zᵀ(½H)z − (Hy − g)ᵀz + const
        let hy = &h * nalgebra::DVector::from_column_slice(&y);
        let lin: Vec<f64> = hy.iter().zip(&g).map(|(hy, g)| hy - g).collect();
        let (z, _, _, _, _) =
            projected_descent(&half_h, h_max.max(0.0), &lin, y.clone(), per, opts.inner_iterations, 0.0);
        let step: Vec<f64> = z.iter().zip(&y).map(|(z, y)| z - y).collect();
        let step_norm = step.iter().map(|s| s * s).sum::<f64>().sqrt();
        if step_norm <= opts.step_tol {
            converged = true;
            iterations = it;
            break;
        }
        let slope: f64 = g.iter().zip(&step).map(|(g, s)| g * s).sum();
        let mut alpha = 1.0;
        let mut next = None;
        for _ in 0..50 {
            let cand: Vec<f64> = y.iter().zip(&step).map(|(y, s)| y + alpha * s).collect();
            let f_new = objective_raw(problem, &cand);
            if f_new <= f + 1e-4 * alpha * slope && f_new <= f {
                next = Some((cand, f_new));
                break;
            }
            alpha *= 0.5;
        }
        let Some((cand, f_new)) = next else {
            // no decrease at machine precision: stationary
            converged = true;
            iterations = it;
            break;
        };
        y = cand;
        f = f_new;
        history.push(f);
        let x = round_raw(problem, &y);
        let xb = objective_raw(problem, x.values());
        if xb < best_binary {
            best_binary = xb;
            best_x = x;
        }
        if alpha * step_norm <= opts.step_tol {
            converged = true;
            iterations = it + 1;
            break;
        }
    }

    let final_round = round_raw(problem, &y);
    let rounded_final = objective_raw(problem, final_round.values());
    let builder = ReportBuilder { problem, method: "sqp".into(), started };
    let mut report = builder.finish(y, best_x, f, iterations, converged);
    report.diagnostics.insert("rounded_final_objective".into(), rounded_final);
    report.diagnostics.insert("warm_start_objective".into(), warm.binary_objective);
    report.warm_start = Some("linear".into());
    report.history = history;
    Ok(report)
}
