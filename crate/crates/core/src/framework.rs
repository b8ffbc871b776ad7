//! One optimisation step on a frozen instance: virtual tasks, strategy seed,
//! static solve, conversion back to vehicle routes.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::DcarpInstance;
use crate::solution::{check_feasibility, total_cost, Solution};
use crate::solver::{descent_solve, memetic_solve, Clock, SolverBudget};
use crate::strategy::{restart_init, return_first, sequence_transfer};
use crate::virtual_task::{build_static_view, normalize_virtual_routes, to_executable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Restart,
    Transfer,
    ReturnFirst,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Restart => "restart",
            Strategy::Transfer => "transfer",
            Strategy::ReturnFirst => "return_first",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restart" => Ok(Strategy::Restart),
            "transfer" => Ok(Strategy::Transfer),
            "return_first" => Ok(Strategy::ReturnFirst),
            _ => Err(Error::InvalidConfig(format!("unknown strategy `{s}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Population-based memetic search.
    Memetic,
    /// Single-solution tabu descent.
    Descent,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Memetic => "memetic",
            SolverKind::Descent => "descent",
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "memetic" => Ok(SolverKind::Memetic),
            "descent" => Ok(SolverKind::Descent),
            _ => Err(Error::InvalidConfig(format!("unknown solver `{s}`"))),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome {
    /// Executable routes: outside vehicles first, in vehicle order.
    pub solution: Solution,
    /// Total cost of `solution` on the instance.
    pub cost: Cost,
    pub evaluations: u64,
    pub elapsed_secs: f64,
}

/// Solves one instance end to end.
///
/// `previous` is the best executable solution of the preceding instance and
/// is only read by [`Strategy::Transfer`]; without it the transfer strategy
/// falls back to a restart. Return-first always uses the memetic solver for
/// its static part.
pub fn gofvt_solve(
    instance: &DcarpInstance,
    strategy: Strategy,
    solver: SolverKind,
    previous: Option<&Solution>,
    budget: &SolverBudget,
    clock: &dyn Clock,
) -> Result<StrategyOutcome> {
    budget.validate()?;
    if strategy == Strategy::ReturnFirst {
        let rf = return_first(instance, budget, clock)?;
        return finish(instance, rf.solution, rf.cost, 0, 0.0);
    }
    let view = build_static_view(instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0x9e37_79b9_7f4a_7c15);
    let transferred = match (strategy, previous) {
        (Strategy::Transfer, Some(prev)) => Some(sequence_transfer(prev, &view)?),
        _ => None,
    };
    let out = match solver {
        SolverKind::Memetic => {
            let mut init: Vec<Solution> = Vec::new();
            let fill = match &transferred {
                Some(t) => {
                    init.push(t.clone());
                    budget.population.saturating_sub(1)
                }
                None => budget.population,
            };
            if fill > 0 {
                init.extend(restart_init(&view, fill, &mut rng)?);
            }
            memetic_solve(&view, &init, budget, clock)?
        }
        SolverKind::Descent => {
            let start = match transferred {
                Some(t) => t,
                None => {
                    let pop = restart_init(&view, budget.population, &mut rng)?;
                    let mut best: Option<(Cost, Solution)> = None;
                    for s in pop {
                        let c = total_cost(&s, &view)?;
                        if best.as_ref().is_none_or(|(b, _)| c < *b) {
                            best = Some((c, s));
                        }
                    }
                    best.ok_or(Error::EmptyPopulation)?.1
                }
            };
            descent_solve(&view, &start, budget, clock)?
        }
    };
    let executable = to_executable(&normalize_virtual_routes(&out.solution), instance)?;
    finish(instance, executable, out.cost, out.evaluations, out.elapsed_secs)
}

fn finish(instance: &DcarpInstance, solution: Solution, claimed: Cost, evaluations: u64, elapsed_secs: f64) -> Result<StrategyOutcome> {
    let violations = check_feasibility(&solution, instance);
    if let Some(v) = violations.first() {
        return Err(Error::Infeasible(format!("{v:?}")));
    }
    let cost = total_cost(&solution, instance)?;
    if cost != claimed {
        return Err(Error::Infeasible(format!("executable cost {cost} differs from solver cost {claimed}")));
    }
    Ok(StrategyOutcome { solution, cost, evaluations, elapsed_secs })
}
