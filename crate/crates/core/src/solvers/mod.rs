//! Solution strategies for the one-hot binary quadratic program, plus the
//! shared assignment, rounding and reporting types.

mod brute;
mod linear;
pub mod report;
mod sa;
mod sdp;
mod shift;
pub mod simplex;
mod sqp;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use brute::{solve_bruteforce, DEFAULT_BRUTE_CAP};
pub use linear::solve_linear;
pub use sa::{acceptance_probability, penalized_objective, solve_sa, SaParams};
pub use sdp::{solve_sdp, solve_sdp_detailed, SdpOptions, SdpSolution};
pub use shift::{solve_shift, spectrum_shift, ShiftOptions};
pub use sqp::{solve_sqp, SqpOptions};

use crate::assembly::AssemblyProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Binary,
    Continuous,
}

/// Length-`m·N` vector split into `m` blocks of `N` positions.
///
/// Binary vectors are one-hot per block; continuous vectors have entries in
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentVector {
    values: Vec<f64>,
    mode: Mode,
    proteins: usize,
    positions: usize,
}

impl AssignmentVector {
    /// One-hot vector from a chosen position per protein.
    pub fn from_choices(choices: &[usize], positions: usize) -> Result<Self> {
        if positions == 0 {
            return Err(Error::NoPositions);
        }
        let mut values = vec![0.0; choices.len() * positions];
        for (i, &k) in choices.iter().enumerate() {
            if k >= positions {
                return Err(Error::Infeasible(format!("protein {i} choice {k} >= {positions}")));
            }
            values[i * positions + k] = 1.0;
        }
        Ok(Self { values, mode: Mode::Binary, proteins: choices.len(), positions })
    }

    pub fn binary(values: Vec<f64>, proteins: usize, positions: usize) -> Result<Self> {
        let v = Self::shaped(values, Mode::Binary, proteins, positions)?;
        for (i, block) in v.values.chunks(positions).enumerate() {
            let ones = block.iter().filter(|&&x| x == 1.0).count();
            let zeros = block.iter().filter(|&&x| x == 0.0).count();
            if ones != 1 || ones + zeros != positions {
                return Err(Error::Infeasible(format!("block {i} is not one-hot")));
            }
        }
        Ok(v)
    }

    pub fn continuous(values: Vec<f64>, proteins: usize, positions: usize) -> Result<Self> {
        let v = Self::shaped(values, Mode::Continuous, proteins, positions)?;
        if let Some(bad) = v.values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("entry {bad} outside [0, 1]")));
        }
        Ok(v)
    }

    fn shaped(values: Vec<f64>, mode: Mode, proteins: usize, positions: usize) -> Result<Self> {
        if positions == 0 {
            return Err(Error::NoPositions);
        }
        if values.len() != proteins * positions {
            return Err(Error::DimensionMismatch { expected: proteins * positions, got: values.len() });
        }
        Ok(Self { values, mode, proteins, positions })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn proteins(&self) -> usize {
        self.proteins
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block(&self, protein: usize) -> &[f64] {
        &self.values[protein * self.positions..(protein + 1) * self.positions]
    }

    /// Chosen position per protein (largest entry, lowest index on ties).
    pub fn choices(&self) -> Vec<usize> {
        self.values.chunks(self.positions).map(argmax_lowest).collect()
    }

    /// `A·x`: the sum of each block.
    pub fn block_sums(&self) -> Vec<f64> {
        self.values.chunks(self.positions).map(|b| b.iter().sum()).collect()
    }
}

fn argmax_lowest(block: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in block.iter().enumerate().skip(1) {
        if v > block[best] {
            best = k;
        }
    }
    best
}

/// `xᵀQx − bᵀx` on a raw vector; the caller guarantees the length.
pub(crate) fn objective_raw(problem: &AssemblyProblem, x: &[f64]) -> f64 {
    let q = problem.q();
    let mut quad = 0.0;
    for (a, &xa) in x.iter().enumerate() {
        if xa == 0.0 {
            continue;
        }
        let row: f64 = q.column(a).iter().zip(x).map(|(qab, xb)| qab * xb).sum();
        quad += xa * row;
    }
    let lin: f64 = problem.b().iter().zip(x).map(|(b, x)| b * x).sum();
    quad - lin
}

/// Gradient `2Qx − b`.
pub(crate) fn gradient(problem: &AssemblyProblem, x: &[f64]) -> Vec<f64> {
    let q = problem.q();
    (0..x.len())
        .map(|a| 2.0 * q.column(a).iter().zip(x).map(|(qab, xb)| qab * xb).sum::<f64>() - problem.b()[a])
        .collect()
}

/// `xᵀQx − bᵀx`.
pub fn objective(problem: &AssemblyProblem, x: &AssignmentVector) -> Result<f64> {
    if x.len() != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), got: x.len() });
    }
    Ok(objective_raw(problem, x.values()))
}

/// Set the largest entry of each block to 1 and the rest to 0, lowest
/// position winning ties.
pub fn round_assignment(y: &AssignmentVector) -> AssignmentVector {
    AssignmentVector::from_choices(&y.choices(), y.positions).expect("argmax is always in range")
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: String,
    /// Objective of the solver's own continuous model at its final iterate.
    pub continuous_objective: f64,
    /// `objective(assignment)`.
    pub binary_objective: f64,
    pub assignment: AssignmentVector,
    /// Continuous iterate that was rounded.
    pub relaxed: Vec<f64>,
    pub iterations: usize,
    pub wall_time: f64,
    pub converged: bool,
    pub diagnostics: BTreeMap<String, f64>,
    pub warm_start: Option<String>,
    /// Objective after each accepted step, for descent methods.
    pub history: Vec<f64>,
}

impl SolveReport {
    /// Everything except wall time, for reproducibility checks.
    pub fn same_outcome(&self, other: &SolveReport) -> bool {
        let strip = |r: &SolveReport| SolveReport { wall_time: 0.0, ..r.clone() };
        strip(self) == strip(other)
    }
}

/// Assemble a report, rounding `relaxed` unless `assignment` is given.
pub(crate) struct ReportBuilder<'a> {
    pub problem: &'a AssemblyProblem,
    pub method: String,
    pub started: Instant,
}

impl ReportBuilder<'_> {
    pub fn finish(
        self,
        relaxed: Vec<f64>,
        assignment: AssignmentVector,
        continuous_objective: f64,
        iterations: usize,
        converged: bool,
    ) -> SolveReport {
        let binary_objective = objective_raw(self.problem, assignment.values());
        SolveReport {
            method: self.method,
            continuous_objective,
            binary_objective,
            assignment,
            relaxed,
            iterations,
            wall_time: self.started.elapsed().as_secs_f64(),
            converged,
            diagnostics: BTreeMap::new(),
            warm_start: None,
            history: Vec::new(),
        }
    }
}

/// Round a raw continuous iterate (entries clamped into `[0, 1]`).
pub(crate) fn round_raw(problem: &AssemblyProblem, y: &[f64]) -> AssignmentVector {
    let clamped = y.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let cont = AssignmentVector::continuous(clamped, problem.proteins(), problem.positions())
        .expect("clamped values have the right shape");
    round_assignment(&cont)
}

/// Uniform point `1/N` in every block.
pub(crate) fn barycenter(problem: &AssemblyProblem) -> Vec<f64> {
    vec![1.0 / problem.positions() as f64; problem.n()]
}

/// Solver selection as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Linear,
    Shift,
    Sdp,
    Sqp,
    Sa,
    Brute,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Sdp, Method::Shift, Method::Sqp, Method::Sa, Method::Linear, Method::Brute];

    pub fn name(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Shift => "shift",
            Method::Sdp => "sdp",
            Method::Sqp => "sqp",
            Method::Sa => "sa",
            Method::Brute => "brute",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Method::Linear),
            "shift" => Ok(Method::Shift),
            "sdp" => Ok(Method::Sdp),
            "sqp" => Ok(Method::Sqp),
            "sa" => Ok(Method::Sa),
            "brute" => Ok(Method::Brute),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected linear|shift|sdp|sqp|sa|brute)"
            ))),
        }
    }
}

/// Per-solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub shift: ShiftOptions,
    pub sdp: SdpOptions,
    pub sqp: SqpOptions,
    pub sa: SaParams,
    pub brute_cap: u128,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            shift: ShiftOptions::default(),
            sdp: SdpOptions::default(),
            sqp: SqpOptions::default(),
            sa: SaParams::default(),
            brute_cap: DEFAULT_BRUTE_CAP,
        }
    }
}

pub fn solve(problem: &AssemblyProblem, method: Method, config: &SolverConfig) -> Result<SolveReport> {
    match method {
        Method::Linear => Ok(solve_linear(problem)),
        Method::Shift => solve_shift(problem, &config.shift),
        Method::Sdp => solve_sdp(problem, &config.sdp),
        Method::Sqp => solve_sqp(problem, &config.sqp),
        Method::Sa => solve_sa(problem, &config.sa),
        Method::Brute => solve_bruteforce(problem, config.brute_cap),
    }
}
