//! Path-scanning construction with the classic five tie-breaking rules.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cost::{self, Demand};
use crate::error::{Error, Result};
use crate::instance::{Service, ServiceModel, TaskRef};
use crate::solution::{Route, Solution};
use crate::virtual_task::StaticView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanRule {
    /// Prefer the task whose exit is farthest from the depot.
    MaxReturn,
    /// Prefer the task whose exit is closest to the depot.
    MinReturn,
    /// Prefer the largest demand per unit of serving cost.
    MaxRatio,
    /// Prefer the smallest demand per unit of serving cost.
    MinRatio,
    /// `MaxReturn` while the vehicle is less than half full, then `MinReturn`.
    Mixed,
}

impl ScanRule {
    pub const ALL: [ScanRule; 5] =
        [ScanRule::MaxReturn, ScanRule::MinReturn, ScanRule::MaxRatio, ScanRule::MinRatio, ScanRule::Mixed];

    /// `Less` means `a` is preferred.
    fn prefer<M: ServiceModel + ?Sized>(self, model: &M, a: &Service, b: &Service, load: Demand) -> Ordering {
        let depot = model.depot();
        let ret = |s: &Service| model.mdc(s.exit, depot);
        // dm/sc compared by cross multiplication; sc = 0 acts as an infinite ratio.
        let ratio = |x: &Service, y: &Service| (x.dm as u128 * y.sc as u128).cmp(&(y.dm as u128 * x.sc as u128));
        match self {
            ScanRule::MaxReturn => ret(b).cmp(&ret(a)),
            ScanRule::MinReturn => ret(a).cmp(&ret(b)),
            ScanRule::MaxRatio => ratio(b, a),
            ScanRule::MinRatio => ratio(a, b),
            ScanRule::Mixed => {
                if 2 * load < model.capacity() {
                    ScanRule::MaxReturn.prefer(model, a, b, load)
                } else {
                    ScanRule::MinReturn.prefer(model, a, b, load)
                }
            }
        }
    }
}

/// Greedy nearest-task construction. Each task is oriented to minimise the
/// approach leg (ties to the lower entry vertex); ties between tasks go to
/// `rule`, then to the lowest task reference. A route closes when no remaining
/// task fits.
pub fn path_scanning(view: &StaticView<'_>, rule: ScanRule) -> Result<Solution> {
    scan(view, &view.task_refs(), rule)
}

pub(crate) fn scan<M: ServiceModel + ?Sized>(model: &M, tasks: &[TaskRef], rule: ScanRule) -> Result<Solution> {
    let depot = model.depot();
    let q = model.capacity();
    for &t in tasks {
        let s = model.service(t).ok_or_else(|| Error::UnknownTask(alloc::format!("{t:?}")))?;
        if s.dm > q {
            return Err(Error::DemandExceedsCapacity { demand: s.dm, capacity: q });
        }
        let reachable = orientations(t).any(|d| {
            model.service(d).is_some_and(|s| {
                cost::is_reachable(model.mdc(depot, s.entry)) && cost::is_reachable(model.mdc(s.exit, depot))
            })
        });
        if !reachable {
            return Err(Error::UnreachableLeg { from: depot, to: s.entry });
        }
    }
    let mut unserved: Vec<TaskRef> = tasks.to_vec();
    let mut routes = Vec::new();
    while !unserved.is_empty() {
        let mut at = depot;
        let mut load: Demand = 0;
        let mut route = Vec::new();
        loop {
            let mut best: Option<(usize, TaskRef, Service, u64)> = None;
            for (idx, &t) in unserved.iter().enumerate() {
                let Some((d, s)) = orient(model, t, at) else { continue };
                if load + s.dm > q {
                    continue;
                }
                let dist = model.mdc(at, s.entry);
                if !cost::is_reachable(dist) {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((_, bd, bs, bdist)) => dist
                        .cmp(bdist)
                        .then_with(|| rule.prefer(model, &s, bs, load))
                        .then_with(|| d.cmp(bd))
                        .is_lt(),
                };
                if better {
                    best = Some((idx, d, s, dist));
                }
            }
            let Some((idx, d, s, _)) = best else { break };
            unserved.swap_remove(idx);
            route.push(d);
            load += s.dm;
            at = s.exit;
        }
        if route.is_empty() {
            return Err(Error::Infeasible("no remaining task can be reached from the depot".into()));
        }
        routes.push(Route::new(depot, route));
    }
    Ok(Solution::new(routes))
}

fn orientations(t: TaskRef) -> impl Iterator<Item = TaskRef> {
    core::iter::once(t).chain(t.reversed())
}

/// Direction with the cheaper approach from `at`; ties to the lower entry vertex.
fn orient<M: ServiceModel + ?Sized>(model: &M, t: TaskRef, at: usize) -> Option<(TaskRef, Service)> {
    orientations(t)
        .filter_map(|d| model.service(d).map(|s| (d, s)))
        .min_by(|(_, a), (_, b)| model.mdc(at, a.entry).cmp(&model.mdc(at, b.entry)).then(a.entry.cmp(&b.entry)))
}
