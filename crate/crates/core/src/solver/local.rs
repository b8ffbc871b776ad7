use crate::error::Result;
use crate::instance::ServiceModel;
use crate::solution::Solution;
use crate::virtual_task::StaticView;

use super::moves::{best_move, Plan};
use super::{repair, Clock, Meter, SolverBudget};

/// Best-improvement descent over the full move set until no move improves or
/// the budget runs out. Output is feasible and never costlier than the input.
pub fn local_search(
    solution: &Solution,
    view: &StaticView<'_>,
    budget: &SolverBudget,
    clock: &dyn Clock,
) -> Result<Solution> {
    let (start, _) = repair(solution, view)?;
    let mut meter = Meter::new(budget, clock);
    let mut plan = Plan::new(&start, view);
    improve(&mut plan, view, &mut meter);
    Ok(plan.to_solution(view.depot()))
}

pub(crate) fn improve<M: ServiceModel + ?Sized>(plan: &mut Plan, model: &M, meter: &mut Meter<'_>) {
    while !meter.exhausted() {
        match best_move(plan, model, meter, &mut |_, delta| delta < 0) {
            Some((mv, delta)) => {
                let before = plan.total();
                plan.apply(&mv, model);
                debug_assert_eq!(plan.total() as i64 - before as i64, delta);
            }
            None => break,
        }
    }
}
