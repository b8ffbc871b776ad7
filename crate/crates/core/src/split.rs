//! Ulusoy's split: optimal partition of a grand tour into depot routes.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{self, Cost, UNREACHABLE};
use crate::error::{Error, Result};
use crate::instance::{ServiceModel, TaskRef};
use crate::solution::{Route, Solution};

/// An ordered task list without route boundaries.
pub type TaskSequence = Vec<TaskRef>;

/// Route boundaries dropped, order and directions kept.
pub fn flatten(solution: &Solution) -> TaskSequence {
    solution.routes.iter().flat_map(|r| r.tasks.iter().copied()).collect()
}

/// Shortest path over the auxiliary DAG on positions `0..=n`, where arc
/// `(i, j)` is the depot route serving `sequence[i..j]` and exists only when
/// that block fits in one vehicle. Task directions are taken as given.
pub fn ulusoy_split<M: ServiceModel + ?Sized>(sequence: &[TaskRef], model: &M) -> Result<Solution> {
    split_with_cost(sequence, model).map(|(s, _)| s)
}

pub(crate) fn split_with_cost<M: ServiceModel + ?Sized>(
    sequence: &[TaskRef],
    model: &M,
) -> Result<(Solution, Cost)> {
    let n = sequence.len();
    let depot = model.depot();
    let q = model.capacity();
    let mut services = Vec::with_capacity(n);
    for &t in sequence {
        let s = model.service(t).ok_or_else(|| Error::UnknownTask(alloc::format!("{t:?}")))?;
        if s.dm > q {
            return Err(Error::DemandExceedsCapacity { demand: s.dm, capacity: q });
        }
        services.push(s);
    }
    let mut best = vec![UNREACHABLE; n + 1];
    let mut pred = vec![0usize; n + 1];
    best[0] = 0;
    for i in 0..n {
        if best[i] == UNREACHABLE {
            continue;
        }
        let mut load = 0;
        let mut body: Cost = 0;
        for j in i..n {
            let s = &services[j];
            load += s.dm;
            if load > q {
                break;
            }
            let approach = if j == i { model.mdc(depot, s.entry) } else { model.mdc(services[j - 1].exit, s.entry) };
            body = cost::add(body, cost::add(approach, s.sc));
            let route = cost::add(body, model.mdc(s.exit, depot));
            let candidate = cost::add(best[i], route);
            if candidate < best[j + 1] {
                best[j + 1] = candidate;
                pred[j + 1] = i;
            }
        }
    }
    if best[n] == UNREACHABLE {
        return Err(Error::Infeasible("no split of the sequence has only open legs".into()));
    }
    let mut bounds = Vec::new();
    let mut j = n;
    while j > 0 {
        bounds.push((pred[j], j));
        j = pred[j];
    }
    let routes = bounds
        .into_iter()
        .rev()
        .map(|(i, j)| Route::new(depot, sequence[i..j].to_vec()))
        .collect();
    Ok((Solution::new(routes), best[n]))
}
