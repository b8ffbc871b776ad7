use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{ServiceModel, TaskKey, TaskRef};
use crate::solution::{Route, Solution};
use crate::split::{flatten, split_with_cost};
use crate::virtual_task::{adjusted_cost, StaticView};

use super::local::improve;
use super::moves::Plan;
use super::{random_split, repair, Clock, Meter, SolveOutcome, SolverBudget};

#[derive(Debug, Clone)]
struct Member {
    solution: Solution,
    cost: Cost,
    canonical: Vec<Route>,
}

impl Member {
    fn new(solution: Solution, cost: Cost) -> Self {
        let canonical = solution.canonical_routes();
        Member { solution, cost, canonical }
    }

    fn same_as(&self, other: &Member) -> bool {
        self.cost == other.cost && self.canonical == other.canonical
    }
}

/// Steady (mu + lambda) memetic search: binary tournament, order crossover on
/// the flattened task sequence, split decoding and probabilistic local search.
///
/// The population is seeded from `init` and topped up with random split
/// solutions. The returned cost is adjusted (outside-vehicle correction
/// removed) and `trace` holds the incumbent after every generation.
pub fn memetic_solve(
    view: &StaticView<'_>,
    init: &[Solution],
    budget: &SolverBudget,
    clock: &dyn Clock,
) -> Result<SolveOutcome> {
    budget.validate()?;
    if init.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut meter = Meter::new(budget, clock);
    let mut pop: Vec<Member> = Vec::with_capacity(budget.population * 2);
    for s in init {
        let (s, c) = repair(s, view)?;
        meter.count(1);
        admit(&mut pop, Member::new(s, c));
    }
    let mut attempts = 0;
    while pop.len() < budget.population && attempts < budget.population * 10 && !meter.exhausted() {
        let (s, c) = random_split(view, &mut rng)?;
        meter.count(1);
        admit(&mut pop, Member::new(s, c));
        attempts += 1;
    }
    rank(&mut pop);
    pop.truncate(budget.population);

    let mut trace = alloc::vec![pop[0].cost];
    while !meter.exhausted() {
        let mut offspring: Vec<Member> = Vec::with_capacity(budget.population);
        for _ in 0..budget.population {
            if meter.exhausted() {
                break;
            }
            let a = tournament(&pop, budget.tournament, &mut rng);
            let b = tournament(&pop, budget.tournament, &mut rng);
            let child_seq = order_crossover(&flatten(&pop[a].solution), &flatten(&pop[b].solution), &mut rng);
            let (mut child, mut cost) = split_with_cost(&child_seq, view)?;
            meter.count(1);
            if rng.gen_bool(budget.local_search_prob) {
                let mut plan = Plan::new(&child, view);
                improve(&mut plan, view, &mut meter);
                if plan.total() < cost {
                    child = plan.to_solution(view.depot());
                    cost = plan.total();
                }
                let (resplit, rc) = split_with_cost(&flatten(&child), view)?;
                meter.count(1);
                if rc < cost {
                    child = resplit;
                    cost = rc;
                }
            }
            let m = Member::new(child, cost);
            if !pop.iter().any(|p| p.same_as(&m)) {
                admit(&mut offspring, m);
            }
        }
        pop.extend(offspring);
        rank(&mut pop);
        pop.truncate(budget.population);
        debug_assert!(pop[0].cost <= *trace.last().unwrap());
        trace.push(pop[0].cost);
    }

    let best = pop.swap_remove(0);
    let adjustment = view.adjustment();
    let trace = trace.into_iter().map(|c| c.saturating_sub(adjustment)).collect();
    Ok(SolveOutcome {
        cost: adjusted_cost(&best.solution, view)?,
        solution: best.solution,
        evaluations: meter.evaluations,
        elapsed_secs: meter.elapsed(),
        trace,
    })
}

fn admit(pop: &mut Vec<Member>, m: Member) {
    if !pop.iter().any(|p| p.same_as(&m)) {
        pop.push(m);
    }
}

/// Stable sort by cost so earlier members win ties.
fn rank(pop: &mut [Member]) {
    pop.sort_by_key(|m| m.cost);
}

fn tournament<R: Rng + ?Sized>(pop: &[Member], size: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..pop.len());
    for _ in 1..size {
        let c = rng.gen_range(0..pop.len());
        if pop[c].cost < pop[best].cost {
            best = c;
        }
    }
    best
}

/// OX: copy a random slice of `first`, fill the other positions with the
/// tasks of `second` in their cyclic order after the slice.
pub(crate) fn order_crossover<R: Rng + ?Sized>(first: &[TaskRef], second: &[TaskRef], rng: &mut R) -> Vec<TaskRef> {
    let n = first.len();
    if n < 2 {
        return first.to_vec();
    }
    let mut i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n);
    if i > j {
        core::mem::swap(&mut i, &mut j);
    }
    let kept: BTreeSet<TaskKey> = first[i..=j].iter().map(|t| t.key()).collect();
    let mut fill = (0..second.len()).map(|k| second[(j + 1 + k) % second.len()]).filter(|t| !kept.contains(&t.key()));
    let mut child: Vec<Option<TaskRef>> = alloc::vec![None; n];
    for p in i..=j {
        child[p] = Some(first[p]);
    }
    for k in 0..n - (j - i + 1) {
        let p = (j + 1 + k) % n;
        child[p] = fill.next();
    }
    child.into_iter().map(|t| t.expect("parents serve the same task set")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DcarpInstance;
    use crate::network::{Edge, RoadNetwork};
    use crate::scanning::{path_scanning, ScanRule};
    use crate::solution::{check_feasibility, total_cost};
    use crate::solver::NoClock;
    use crate::virtual_task::build_static_view;
    use alloc::vec;

    fn grid() -> DcarpInstance {
        // 3x3 grid, every edge a task.
        let mut edges = vec::Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                let v = r * 3 + c;
                if c < 2 {
                    edges.push(Edge::new(v, v + 1, 2 + (v as u64 % 3), 4, 1 + (v as u64 % 2)));
                }
                if r < 2 {
                    edges.push(Edge::new(v, v + 3, 1 + (v as u64 % 4), 4, 2));
                }
            }
        }
        DcarpInstance::new(RoadNetwork::new(9, 4, 3, 7, edges).unwrap(), vec![], 0).unwrap()
    }

    #[test]
    fn crossover_is_a_permutation() {
        let a: vec::Vec<_> = (0..8).map(|e| TaskRef::Arc(2 * e)).collect();
        let b: vec::Vec<_> = (0..8).rev().map(|e| TaskRef::Arc(2 * e + 1)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let c = order_crossover(&a, &b, &mut rng);
            let keys: BTreeSet<_> = c.iter().map(|t| t.key()).collect();
            assert_eq!(c.len(), 8);
            assert_eq!(keys.len(), 8);
        }
    }

    #[test]
    fn improves_on_its_seed_and_is_deterministic() {
        let inst = grid();
        let view = build_static_view(&inst).unwrap();
        let seed = path_scanning(&view, ScanRule::MaxReturn).unwrap();
        let seed_cost = total_cost(&seed, &view).unwrap();
        let budget = SolverBudget::new(60.0, 11).with_max_evaluations(3_000);
        let a = memetic_solve(&view, core::slice::from_ref(&seed), &budget, &NoClock).unwrap();
        let b = memetic_solve(&view, &[seed], &budget, &NoClock).unwrap();
        assert_eq!(a, SolveOutcome { elapsed_secs: a.elapsed_secs, ..b });
        assert!(check_feasibility(&a.solution, &view).is_empty());
        assert!(a.cost <= seed_cost);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*a.trace.last().unwrap(), a.cost);
    }

    #[test]
    fn empty_init_is_an_error() {
        let inst = grid();
        let view = build_static_view(&inst).unwrap();
        let budget = SolverBudget::new(1.0, 1).with_max_evaluations(10);
        assert_eq!(memetic_solve(&view, &[], &budget, &NoClock), Err(Error::EmptyPopulation));
    }
}
