use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::instance::{ServiceModel, TaskKey};
use crate::solution::Solution;
use crate::split::{flatten, split_with_cost};
use crate::virtual_task::{adjusted_cost, StaticView};

use super::moves::{best_move, Plan};
use super::{repair, Clock, Meter, SolveOutcome, SolverBudget};

/// Tabu-guided steepest descent. Every iteration applies the best admissible
/// move, worsening ones included; moves touching recently moved tasks are
/// tabu unless they reach a new incumbent. After `stagnation` iterations
/// without improvement the incumbent is perturbed and re-split.
pub fn descent_solve(
    view: &StaticView<'_>,
    init: &Solution,
    budget: &SolverBudget,
    clock: &dyn Clock,
) -> Result<SolveOutcome> {
    budget.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut meter = Meter::new(budget, clock);
    let (start, _) = repair(init, view)?;
    meter.count(1);
    let mut plan = Plan::new(&start, view);
    let mut best = plan.clone();
    let mut best_cost = plan.total();
    let mut tabu: BTreeMap<TaskKey, usize> = BTreeMap::new();
    let mut trace = alloc::vec![best_cost];
    let mut iteration = 0usize;
    let mut stagnant = 0usize;

    while !meter.exhausted() {
        iteration += 1;
        let current = plan.total() as i64;
        let found = {
            let plan_ref = &plan;
            let tabu_ref = &tabu;
            best_move(plan_ref, view, &mut meter, &mut |mv, delta| {
                let blocked = mv.touched(plan_ref).iter().flatten().any(|k| tabu_ref.get(k).is_some_and(|&until| until >= iteration));
                !blocked || current + delta < best_cost as i64
            })
        };
        match found {
            Some((mv, _)) => {
                let touched = mv.touched(&plan);
                plan.apply(&mv, view);
                for k in touched.into_iter().flatten() {
                    tabu.insert(k, iteration + budget.tabu_tenure);
                }
                if plan.total() < best_cost {
                    best = plan.clone();
                    best_cost = plan.total();
                    stagnant = 0;
                } else {
                    stagnant += 1;
                }
            }
            None => stagnant = budget.stagnation,
        }
        if stagnant >= budget.stagnation && !meter.exhausted() {
            plan = perturb(&best, view, &mut rng)?;
            meter.count(1);
            tabu.clear();
            stagnant = 0;
            if plan.total() < best_cost {
                best = plan.clone();
                best_cost = plan.total();
            }
        }
        trace.push(best_cost);
    }

    let solution = best.to_solution(view.depot());
    let adjustment = view.adjustment();
    Ok(SolveOutcome {
        cost: adjusted_cost(&solution, view)?,
        solution,
        evaluations: meter.evaluations,
        elapsed_secs: meter.elapsed(),
        trace: trace.into_iter().map(|c| c.saturating_sub(adjustment)).collect(),
    })
}

/// Random relocations and direction flips on the flattened incumbent.
fn perturb<R: Rng + ?Sized>(best: &Plan, view: &StaticView<'_>, rng: &mut R) -> Result<Plan> {
    let mut seq: Vec<_> = flatten(&best.to_solution(view.depot()));
    let n = seq.len();
    if n > 1 {
        for _ in 0..(n / 10).max(2) {
            let from = rng.gen_range(0..n);
            let t = seq.remove(from);
            let t = match t.reversed() {
                Some(r) if rng.gen_bool(0.5) => r,
                _ => t,
            };
            seq.insert(rng.gen_range(0..n), t);
        }
    }
    let (s, _) = split_with_cost(&seq, view)?;
    Ok(Plan::new(&s, view))
}
