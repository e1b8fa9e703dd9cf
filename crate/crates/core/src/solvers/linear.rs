use std::time::Instant;

use super::{AssignmentVector, ReportBuilder, SolveReport};
use crate::assembly::AssemblyProblem;

/// Maximize `bᵀy` over the product of simplices, ignoring overlaps. The
/// optimum sits at a vertex: the largest relevance in each block (lowest
/// position on ties).
pub fn solve_linear(problem: &AssemblyProblem) -> SolveReport {
    let started = Instant::now();
    let per = problem.positions();
    let b = problem.b();
    let choices: Vec<usize> = (0..problem.proteins())
        .map(|i| {
            let block = &b.as_slice()[i * per..(i + 1) * per];
            let mut best = 0;
            for k in 1..per {
                if block[k] > block[best] {
                    best = k;
                }
            }
            best
        })
        .collect();
    let x = AssignmentVector::from_choices(&choices, per).expect("argmax in range");
    let relevance: f64 = b.iter().zip(x.values()).map(|(b, x)| b * x).sum();
    let builder = ReportBuilder { problem, method: "linear".into(), started };
    builder.finish(x.values().to_vec(), x, -relevance, 0, true)
}
