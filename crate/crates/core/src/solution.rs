//! Routes, solutions, route cost, total cost and feasibility.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::cost::{self, Cost, Demand};
use crate::error::{Error, Result};
use crate::instance::{ServiceModel, TaskKey, TaskRef};
use crate::network::VertexId;

/// `start`, then the tasks in service order, then back to the depot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Route {
    pub start: VertexId,
    pub tasks: Vec<TaskRef>,
}

impl Route {
    pub fn new(start: VertexId, tasks: Vec<TaskRef>) -> Self {
        Route { start, tasks }
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn demand<M: ServiceModel + ?Sized>(&self, model: &M) -> Demand {
        self.tasks.iter().filter_map(|&t| model.service(t)).map(|s| s.dm).sum()
    }
}

/// Ordered routes. When evaluated against a [`crate::DcarpInstance`], the
/// first `N_ov` routes belong to the outside vehicles in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Solution {
    pub routes: Vec<Route>,
}

impl Solution {
    pub fn new(routes: Vec<Route>) -> Self {
        Solution { routes }
    }

    pub fn task_count(&self) -> usize {
        self.routes.iter().map(Route::len).sum()
    }

    /// Routes sorted, for phenotype comparisons that ignore route order.
    pub fn canonical_routes(&self) -> Vec<Route> {
        let mut r = self.routes.clone();
        r.sort();
        r
    }
}

/// Route cost: the approach leg, serving costs, the deadheading legs between
/// consecutive tasks and the return leg to the depot.
pub fn route_cost<M: ServiceModel + ?Sized>(route: &Route, model: &M) -> Result<Cost> {
    let mut total: Cost = 0;
    let mut at = route.start;
    let depot = model.depot();
    for &t in &route.tasks {
        let s = model.service(t).ok_or_else(|| Error::UnknownTask(format!("{t:?}")))?;
        let leg = model.mdc(at, s.entry);
        if !cost::is_reachable(leg) {
            return Err(Error::UnreachableLeg { from: at, to: s.entry });
        }
        total = cost::add(total, cost::add(leg, s.sc));
        at = s.exit;
    }
    let back = model.mdc(at, depot);
    if !cost::is_reachable(back) {
        return Err(Error::UnreachableLeg { from: at, to: depot });
    }
    Ok(cost::add(total, back))
}

pub fn total_cost<M: ServiceModel + ?Sized>(solution: &Solution, model: &M) -> Result<Cost> {
    solution.routes.iter().try_fold(0, |acc, r| Ok(cost::add(acc, route_cost(r, model)?)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingTask(TaskKey),
    DuplicateTask(TaskKey),
    /// A task reference that is not an open obligation of the instance.
    UnexpectedTask { route: usize, task: TaskRef },
    CapacityExceeded { route: usize, outside_vehicle: Option<usize>, load: Demand, capacity: Demand },
    WrongStart { route: usize, expected: VertexId, found: VertexId },
    MissingOutsideRoute(usize),
    UnreachableLeg { route: usize, from: VertexId, to: VertexId },
}

/// Lists every constraint violation; an empty list means feasible.
pub fn check_feasibility<M: ServiceModel + ?Sized>(solution: &Solution, model: &M) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: BTreeMap<TaskKey, usize> = model.required().into_iter().map(|k| (k, 0)).collect();
    let bound = model.bound_routes();
    for k in solution.routes.len()..bound {
        out.push(Violation::MissingOutsideRoute(k));
    }
    for (i, route) in solution.routes.iter().enumerate() {
        let expected = model.route_start(i);
        if route.start != expected {
            out.push(Violation::WrongStart { route: i, expected, found: route.start });
        }
        let mut load: Demand = 0;
        for &t in &route.tasks {
            match seen.get_mut(&t.key()) {
                Some(count) if model.service(t).is_some() => {
                    *count += 1;
                    if *count == 2 {
                        out.push(Violation::DuplicateTask(t.key()));
                    }
                    load += model.service(t).map_or(0, |s| s.dm);
                }
                _ => out.push(Violation::UnexpectedTask { route: i, task: t }),
            }
        }
        let capacity = model.route_capacity(i);
        if load > capacity {
            out.push(Violation::CapacityExceeded {
                route: i,
                outside_vehicle: (i < bound).then_some(i),
                load,
                capacity,
            });
        }
        if let Err(Error::UnreachableLeg { from, to }) = route_cost(route, model) {
            out.push(Violation::UnreachableLeg { route: i, from, to });
        }
    }
    for (key, count) in seen {
        if count == 0 {
            out.push(Violation::MissingTask(key));
        }
    }
    out
}
