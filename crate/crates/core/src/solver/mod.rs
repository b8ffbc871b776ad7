//! Static CARP meta-heuristics behind one budgeted interface.
//!
//! Solvers only see a [`StaticView`]; they need no knowledge of outside
//! vehicles. Budgets are wall-clock (through the [`Clock`] trait, which the
//! std companion implements) with an optional evaluation cap that makes runs
//! reproducible.

mod descent;
mod local;
mod memetic;
mod moves;

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::TaskRef;
use crate::solution::{check_feasibility, Solution};
use crate::split::{flatten, split_with_cost};
use crate::virtual_task::StaticView;

pub use descent::descent_solve;
pub use local::local_search;
pub use memetic::memetic_solve;

/// Monotonic time source in seconds.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// A clock that never advances; only the evaluation cap ends a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverBudget {
    pub time_limit_secs: f64,
    /// Stops the run after this many evaluations, whichever limit hits first.
    pub max_evaluations: Option<u64>,
    pub seed: u64,
    pub population: usize,
    pub local_search_prob: f64,
    pub tournament: usize,
    pub tabu_tenure: usize,
    /// Non-improving iterations before the descent solver restarts.
    pub stagnation: usize,
}

impl SolverBudget {
    pub fn new(time_limit_secs: f64, seed: u64) -> Self {
        SolverBudget {
            time_limit_secs,
            max_evaluations: None,
            seed,
            population: 30,
            local_search_prob: 0.2,
            tournament: 2,
            tabu_tenure: 10,
            stagnation: 50,
        }
    }

    pub fn with_max_evaluations(mut self, n: u64) -> Self {
        self.max_evaluations = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_limit_secs > 0.0) {
            return Err(Error::InvalidConfig("time limit must be positive".into()));
        }
        if self.population == 0 || self.tournament == 0 {
            return Err(Error::InvalidConfig("population and tournament size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.local_search_prob) {
            return Err(Error::InvalidConfig("local-search probability must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    /// Best solution over the view (depot routes, virtual tasks included).
    pub solution: Solution,
    /// Its adjusted cost.
    pub cost: Cost,
    pub evaluations: u64,
    pub elapsed_secs: f64,
    /// Incumbent adjusted cost after every generation or iteration.
    pub trace: Vec<Cost>,
}

/// Evaluation counter plus the stopping rule.
pub(crate) struct Meter<'c> {
    clock: &'c dyn Clock,
    start: f64,
    limit: f64,
    max_evaluations: Option<u64>,
    pub evaluations: u64,
}

impl<'c> Meter<'c> {
    pub fn new(budget: &SolverBudget, clock: &'c dyn Clock) -> Self {
        Meter {
            clock,
            start: clock.elapsed_secs(),
            limit: budget.time_limit_secs,
            max_evaluations: budget.max_evaluations,
            evaluations: 0,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.max_evaluations.is_some_and(|m| self.evaluations >= m) || self.elapsed() >= self.limit
    }

    pub fn elapsed(&self) -> f64 {
        self.clock.elapsed_secs() - self.start
    }

    #[inline]
    pub fn count(&mut self, n: u64) {
        self.evaluations += n;
    }
}

/// A random task order (with random directions) split into routes.
pub(crate) fn random_split<R: Rng + ?Sized>(view: &StaticView<'_>, rng: &mut R) -> Result<(Solution, Cost)> {
    let mut seq = view.task_refs();
    seq.shuffle(rng);
    for t in &mut seq {
        if let Some(r) = t.reversed() {
            if rng.gen_bool(0.5) {
                *t = r;
            }
        }
    }
    split_with_cost(&seq, view)
}

/// Feasible solutions pass through; otherwise the flattened order is
/// re-split, which repairs capacity violations.
pub(crate) fn repair(solution: &Solution, view: &StaticView<'_>) -> Result<(Solution, Cost)> {
    if check_feasibility(solution, view).is_empty() {
        let raw = crate::solution::total_cost(solution, view)?;
        return Ok((solution.clone(), raw));
    }
    let seq: Vec<TaskRef> = flatten(solution);
    let (s, c) = split_with_cost(&seq, view)?;
    if !check_feasibility(&s, view).is_empty() {
        return Err(Error::Infeasible("solution does not serve every task exactly once".into()));
    }
    Ok((s, c))
}
