use std::time::Instant;

use super::{AssignmentVector, ReportBuilder, SolveReport};
use crate::assembly::AssemblyProblem;
use crate::error::{Error, Result};

pub const DEFAULT_BRUTE_CAP: u128 = 1_000_000;

fn choice_objective(problem: &AssemblyProblem, flat: &[usize]) -> f64 {
    let q = problem.q();
    let mut quad = 0.0;
    for &a in flat {
        let row: f64 = flat.iter().map(|&c| q[(a, c)]).sum();
        quad += row;
    }
    let lin: f64 = flat.iter().map(|&a| problem.b()[a]).sum();
    quad - lin
}

/// Exact minimizer by enumerating all `N^m` one-hot assignments in
/// lexicographic order of `(k_1, …, k_m)`; the first minimum wins.
pub fn solve_bruteforce(problem: &AssemblyProblem, cap: u128) -> Result<SolveReport> {
    let started = Instant::now();
    let (m, per) = (problem.proteins(), problem.positions());
    let states = (per as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if states > cap {
        return Err(Error::SizeCap { size: states, cap });
    }
    let mut choice = vec![0usize; m];
    let mut flat: Vec<usize> = (0..m).map(|i| i * per).collect();
    let mut best = choice.clone();
    let mut best_val = f64::INFINITY;
    loop {
        let val = choice_objective(problem, &flat);
        if val < best_val {
            best_val = val;
            best.clone_from(&choice);
        }
        // odometer with the last protein varying fastest
        let mut i = m;
        loop {
            if i == 0 {
                let x = AssignmentVector::from_choices(&best, per)?;
                let builder = ReportBuilder { problem, method: "brute".into(), started };
                let mut report = builder.finish(x.values().to_vec(), x, best_val, states as usize, true);
                report.diagnostics.insert("states".into(), states as f64);
                return Ok(report);
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < per {
                flat[i] = i * per + choice[i];
                break;
            }
            choice[i] = 0;
            flat[i] = i * per;
        }
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, DVector};

    use super::*;
    use crate::assembly::ScoreKind;
    use crate::solvers::testing::random_problem;
    use crate::solvers::{objective, solve_linear};

    #[test]
    fn single_protein_equals_linear() {
        for seed in 0..10 {
            let p = random_problem(1, 5, seed);
            let brute = solve_bruteforce(&p, DEFAULT_BRUTE_CAP).unwrap();
            assert_eq!(brute.assignment, solve_linear(&p).assignment);
        }
    }

    #[test]
    fn hand_enumerated_pairing() {
        // cross block [[0,1],[1,0]]: (0,0) and (1,1) cost nothing, the
        // mixed pairings cost 2
        let q = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        );
        let p = AssemblyProblem::new(2, 2, q, DVector::zeros(4), ScoreKind::Ccf).unwrap();
        let r = solve_bruteforce(&p, DEFAULT_BRUTE_CAP).unwrap();
        // (0,0) and (1,1) tie at 0; lexicographic order keeps (0,0)
        assert_eq!(r.assignment.choices(), vec![0, 0]);
        assert_eq!(r.binary_objective, 0.0);
        let mixed = AssignmentVector::from_choices(&[0, 1], 2).unwrap();
        assert_eq!(objective(&p, &mixed).unwrap(), 2.0);
    }

    #[test]
    fn beats_every_alternative() {
        for seed in 0..20 {
            let p = random_problem(3, 3, seed);
            let r = solve_bruteforce(&p, DEFAULT_BRUTE_CAP).unwrap();
            assert_eq!(r.binary_objective, objective(&p, &r.assignment).unwrap());
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        let x = AssignmentVector::from_choices(&[a, b, c], 3).unwrap();
                        assert!(r.binary_objective <= objective(&p, &x).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let p = random_problem(4, 4, 0);
        assert!(matches!(solve_bruteforce(&p, 255), Err(Error::SizeCap { size: 256, cap: 255 })));
        assert!(solve_bruteforce(&p, 256).is_ok());
    }
}
