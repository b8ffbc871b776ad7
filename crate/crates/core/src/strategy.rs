//! How each new instance's search is seeded: from scratch, from the previous
//! instance's best sequence, or by the return-first baseline.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{self, Cost};
use crate::error::{Error, Result};
use crate::instance::{DcarpInstance, ServiceModel, TaskKey, TaskRef};
use crate::scanning::{path_scanning, ScanRule};
use crate::solution::{Route, Solution};
use crate::solver::{memetic_solve, random_split, Clock, SolverBudget};
use crate::split::ulusoy_split;
use crate::virtual_task::{build_static_view, StaticView};

/// `count` starting solutions: path scanning under each rule (as many as fit)
/// and random permutations split into routes for the rest.
pub fn restart_init<R: Rng + ?Sized>(view: &StaticView<'_>, count: usize, rng: &mut R) -> Result<Vec<Solution>> {
    if count == 0 {
        return Err(Error::InvalidConfig("population size must be positive".into()));
    }
    let scanned = if count < 6 { count - 1 } else { ScanRule::ALL.len() };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count - scanned {
        out.push(random_split(view, rng)?.0);
    }
    for &rule in &ScanRule::ALL[..scanned] {
        out.push(path_scanning(view, rule)?);
    }
    Ok(out)
}

/// Reuses the previous instance's best executable solution.
///
/// Its flattened order is kept minus tasks that no longer carry demand. The
/// virtual task of each outside vehicle goes directly before the first
/// remaining task of the route that vehicle was executing (or at that route's
/// slot when nothing of it remains). Tasks not present before are inserted one
/// at a time, in ascending edge order, where the grand tour grows least. The
/// result is re-split.
pub fn sequence_transfer(prev: &Solution, view: &StaticView<'_>) -> Result<Solution> {
    let required: BTreeSet<TaskKey> = view.required().into_iter().collect();
    let mut by_route: Vec<Vec<TaskRef>> = prev
        .routes
        .iter()
        .map(|r| r.tasks.iter().copied().filter(|t| !t.is_virtual() && required.contains(&t.key())).collect())
        .collect();
    let mut loose = Vec::new();
    for (k, ov) in view.instance().outside().iter().enumerate() {
        match ov.source_route {
            Some(r) if r < by_route.len() => {
                let slot = by_route[r].iter().take_while(|t| t.is_virtual()).count();
                by_route[r].insert(slot, TaskRef::Virtual(k));
            }
            _ => loose.push(TaskRef::Virtual(k)),
        }
    }
    let mut seq: Vec<TaskRef> = by_route.into_iter().flatten().collect();
    let present: BTreeSet<TaskKey> = seq.iter().map(|t| t.key()).collect();
    let mut fresh: Vec<TaskRef> = view
        .task_refs()
        .into_iter()
        .filter(|t| !t.is_virtual() && !present.contains(&t.key()))
        .collect();
    fresh.extend(loose);
    for t in fresh {
        let (pos, dir) = cheapest_insertion(&seq, t, view)?;
        seq.insert(pos, dir);
    }
    ulusoy_split(&seq, view)
}

/// Position and direction of least grand-tour growth; the depot closes the
/// tour at both ends. Ties go to the earliest position, then to the
/// low-to-high direction.
pub fn cheapest_insertion<M: ServiceModel + ?Sized>(seq: &[TaskRef], task: TaskRef, model: &M) -> Result<(usize, TaskRef)> {
    let depot = model.depot();
    let service = |t: TaskRef| model.service(t).ok_or_else(|| Error::UnknownTask(alloc::format!("{t:?}")));
    let mut exits = Vec::with_capacity(seq.len() + 1);
    let mut entries = Vec::with_capacity(seq.len() + 1);
    exits.push(depot);
    for &t in seq {
        let s = service(t)?;
        entries.push(s.entry);
        exits.push(s.exit);
    }
    entries.push(depot);
    let mut dirs = alloc::vec![task];
    dirs.extend(task.reversed());
    dirs.sort();
    let mut best: Option<(Cost, usize, TaskRef)> = None;
    for p in 0..=seq.len() {
        let (before, after) = (exits[p], entries[p]);
        for &d in &dirs {
            let s = service(d)?;
            let grown = cost::add(cost::add(model.mdc(before, s.entry), s.sc), model.mdc(s.exit, after));
            let delta = grown.saturating_sub(model.mdc(before, after));
            if !cost::is_reachable(grown) {
                continue;
            }
            if best.is_none_or(|(c, _, _)| delta < c) {
                best = Some((delta, p, d));
            }
        }
    }
    best.map(|(_, p, d)| (p, d)).ok_or(Error::UnreachableLeg { from: depot, to: depot })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnFirstOutcome {
    /// Executable: outside vehicles drive straight back (empty routes first),
    /// then the depot routes of the static solve.
    pub solution: Solution,
    /// `return_cost + static_cost`; equals the solution's total cost.
    pub cost: Cost,
    pub return_cost: Cost,
    pub static_cost: Cost,
}

/// The return-first baseline: every outside vehicle heads back to the depot,
/// then all remaining tasks are solved as a plain static problem.
pub fn return_first(instance: &DcarpInstance, budget: &SolverBudget, clock: &dyn Clock) -> Result<ReturnFirstOutcome> {
    let depot = instance.depot();
    let mut return_cost: Cost = 0;
    for (k, ov) in instance.outside().iter().enumerate() {
        let leg = instance.mdc(ov.stop, depot);
        if !cost::is_reachable(leg) {
            return Err(Error::UnreachableStop { vehicle: k, stop: ov.stop });
        }
        return_cost = cost::add(return_cost, leg);
    }
    let inner = instance.without_outside_vehicles();
    let view = build_static_view(&inner)?;
    let mut routes: Vec<Route> = instance.outside().iter().map(|ov| Route::new(ov.stop, Vec::new())).collect();
    let static_cost = if view.task_count() == 0 {
        0
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let init = restart_init(&view, budget.population, &mut rng)?;
        let out = memetic_solve(&view, &init, budget, clock)?;
        routes.extend(out.solution.routes);
        out.cost
    };
    Ok(ReturnFirstOutcome { solution: Solution::new(routes), cost: cost::add(return_cost, static_cost), return_cost, static_cost })
}
