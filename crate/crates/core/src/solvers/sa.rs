use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{objective_raw, round_raw, solve_linear, ReportBuilder, SolveReport};
use crate::assembly::AssemblyProblem;
use crate::error::{Error, Result};

/// Simulated annealing settings; the run is labelled `SA(T₀, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    pub initial_temperature: f64,
    pub penalty_weight: f64,
    pub cooling_factor: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Use the raw temperature as the step length instead of `min(T, 1)`.
    pub raw_temperature_step: bool,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            initial_temperature: 100.0,
            penalty_weight: 1.0,
            cooling_factor: 0.95,
            max_iterations: 5000,
            seed: 0,
            raw_temperature_step: false,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "initial temperature must be > 0, got {}",
                self.initial_temperature
            )));
        }
        if !(self.penalty_weight >= 0.0 && self.penalty_weight.is_finite()) {
            return Err(Error::InvalidParameter(format!("penalty weight must be >= 0, got {}", self.penalty_weight)));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling_factor
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("SA({},{})", self.initial_temperature, self.penalty_weight)
    }
}

/// Probability `1 / (1 + exp(Δ/T))` of accepting a move that changes the
/// objective by `delta` at temperature `t`.
pub fn acceptance_probability(delta: f64, t: f64) -> f64 {
    let r = delta / t;
    if r >= 0.0 {
        let e = (-r).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + r.exp())
    }
}

/// `yᵀQy − bᵀy + w·‖Ay − 1‖₁`.
pub fn penalized_objective(problem: &AssemblyProblem, y: &[f64], weight: f64) -> f64 {
    let violation: f64 = y.chunks(problem.positions()).map(|b| (b.iter().sum::<f64>() - 1.0).abs()).sum();
    let base = objective_raw(problem, y);
    if violation == 0.0 {
        base
    } else {
        base + weight * violation
    }
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Simulated annealing on the penalized box problem, warm-started at the
/// linear solution.
///
/// Each iteration proposes `clamp(y + s·u)` for a random unit direction `u`
/// and step `s = min(T, 1)`, accepts improvements outright and worse points
/// with [`acceptance_probability`], then cools `T ← cooling·T`. The
/// best-seen iterate is rounded at the end; every accepted iterate is also
/// rounded and the best binary point found is kept if it beats that.
pub fn solve_sa(problem: &AssemblyProblem, params: &SaParams) -> Result<SolveReport> {
    params.validate()?;
    let started = Instant::now();
    let n = problem.n();
    let w = params.penalty_weight;
    let warm = solve_linear(problem);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut y = warm.relaxed.clone();
    let mut f = penalized_objective(problem, &y, w);
    let (mut best_y, mut best_f) = (y.clone(), f);
    let mut incumbent = warm.assignment.clone();
    let mut incumbent_f = warm.binary_objective;
    let mut temperature = params.initial_temperature;
    let mut accepted = 0usize;

    for _ in 0..params.max_iterations {
        let step = if params.raw_temperature_step { temperature } else { temperature.min(1.0) };
        let u = random_direction(&mut rng, n);
        let cand: Vec<f64> = y.iter().zip(&u).map(|(y, u)| (y + step * u).clamp(0.0, 1.0)).collect();
        let f_new = penalized_objective(problem, &cand, w);
        let delta = f_new - f;
        let take = delta < 0.0 || rng.random::<f64>() < acceptance_probability(delta, temperature);
        if take {
            y = cand;
            f = f_new;
            accepted += 1;
            if f < best_f {
                best_f = f;
                best_y.clone_from(&y);
            }
            let x = round_raw(problem, &y);
            let xf = objective_raw(problem, x.values());
            if xf < incumbent_f {
                incumbent_f = xf;
                incumbent = x;
            }
        }
        temperature *= params.cooling_factor;
    }

    let rounded_best = round_raw(problem, &best_y);
    let rounded_best_f = objective_raw(problem, rounded_best.values());
    let assignment = if incumbent_f < rounded_best_f { incumbent } else { rounded_best };
    let converged = temperature.min(1.0) <= 1e-8;
    let builder = ReportBuilder { problem, method: params.label(), started };
    let mut report = builder.finish(best_y, assignment, best_f, params.max_iterations, converged);
    let d = &mut report.diagnostics;
    d.insert("accepted".into(), accepted as f64);
    d.insert("final_temperature".into(), temperature);
    d.insert("rounded_best_objective".into(), rounded_best_f);
    d.insert("warm_start_objective".into(), warm.binary_objective);
    report.warm_start = Some("linear".into());
    Ok(report)
}
