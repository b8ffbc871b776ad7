use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::cost::{self, Cost};
use crate::error::{Error, Result};
use crate::instance::{DcarpInstance, ServiceModel, TaskRef};
use crate::network::{ArcId, EdgeId, RoadNetwork, VertexId};
use crate::solution::{check_feasibility, Solution};

use super::{ExecutionState, VehicleState, VehicleStatus};

#[derive(Debug, Clone, Copy)]
struct Step {
    arc: ArcId,
    duration: Cost,
    serves: Option<EdgeId>,
}

struct Itinerary {
    start: VertexId,
    steps: Vec<Step>,
    length: Cost,
}

fn itinerary(instance: &DcarpInstance, start: VertexId, tasks: &[TaskRef]) -> Result<Itinerary> {
    let net = instance.network();
    let matrix = instance.matrix();
    let mut steps = Vec::new();
    let drive = |steps: &mut Vec<Step>, from: VertexId, to: VertexId| -> Result<()> {
        let path = matrix.path(from, to).ok_or(Error::UnreachableLeg { from, to })?;
        for a in path {
            let dc = net.arc(a).dc.ok_or(Error::UnreachableLeg { from, to })?;
            steps.push(Step { arc: a, duration: dc, serves: None });
        }
        Ok(())
    };
    let mut at = start;
    for &t in tasks {
        let TaskRef::Arc(a) = t else {
            return Err(Error::Infeasible(format!("virtual task {t:?} in an executable solution")));
        };
        let arc = net.arc(a);
        drive(&mut steps, at, arc.entry)?;
        steps.push(Step { arc: a, duration: arc.sc, serves: Some(RoadNetwork::edge_of(a)) });
        at = arc.exit;
    }
    drive(&mut steps, at, net.depot())?;
    let length = steps.iter().fold(0, |acc, s| cost::add(acc, s.duration));
    Ok(Itinerary { start, steps, length })
}

struct Schedule {
    itineraries: Vec<Itinerary>,
    /// Dispatch time per route; `None` for empty depot routes.
    dispatch: Vec<Option<Cost>>,
    makespan: Cost,
}

/// Outside routes run from time 0. Depot routes queue cheapest first (ties
/// by index) and each takes the vehicle that frees up earliest.
fn schedule(solution: &Solution, instance: &DcarpInstance) -> Result<Schedule> {
    let violations = check_feasibility(solution, instance);
    if let Some(v) = violations.first() {
        return Err(Error::Infeasible(format!("{v:?}")));
    }
    let fleet = instance.network().vehicles();
    let bound = instance.bound_routes();
    let itineraries = solution
        .routes
        .iter()
        .map(|r| itinerary(instance, r.start, &r.tasks))
        .collect::<Result<Vec<_>>>()?;
    let mut dispatch = alloc::vec![None; itineraries.len()];
    let mut free_at: Vec<Cost> = alloc::vec![0; fleet.max(bound)];
    for r in 0..bound {
        dispatch[r] = Some(0);
        free_at[r] = itineraries[r].length;
    }
    let mut queue: Vec<usize> = (bound..solution.routes.len()).filter(|&r| !solution.routes[r].is_empty()).collect();
    queue.sort_by_key(|&r| (itineraries[r].length, r));
    if !queue.is_empty() && free_at.is_empty() {
        return Err(Error::InvalidInstance("the fleet has no vehicles".into()));
    }
    for r in queue {
        let (slot, &t) = free_at.iter().enumerate().min_by_key(|&(i, &t)| (t, i)).expect("fleet is not empty");
        dispatch[r] = Some(t);
        free_at[slot] = cost::add(t, itineraries[r].length);
    }
    let makespan = free_at.iter().copied().max().unwrap_or(0);
    Ok(Schedule { itineraries, dispatch, makespan })
}

/// Time at which the last vehicle is back at the depot.
pub fn makespan(solution: &Solution, instance: &DcarpInstance) -> Result<Cost> {
    schedule(solution, instance).map(|s| s.makespan)
}

/// Runs `solution` at unit speed up to `stop_time` (clamped to the makespan).
///
/// Every step already under way at the stop time is completed, so a vehicle
/// halts at the end of its current arc and a service that has started counts
/// as served. Vehicles whose final step has started are treated as returned.
pub fn execute_until(solution: &Solution, instance: &DcarpInstance, stop_time: f64) -> Result<ExecutionState> {
    let sched = schedule(solution, instance)?;
    let stop = if stop_time.is_nan() { 0.0 } else { stop_time.clamp(0.0, sched.makespan as f64) };
    let finished = stop >= sched.makespan as f64;
    let started = |t: Cost| finished || (t as f64) < stop;
    let net = instance.network();
    let depot = net.depot();
    let mut vehicles = Vec::new();
    let mut queued = Vec::new();
    let mut served = BTreeSet::new();
    for (r, it) in sched.itineraries.iter().enumerate() {
        let Some(at) = sched.dispatch[r] else { continue };
        let bound = r < instance.bound_routes();
        if !bound && !started(at) {
            queued.push(r);
            continue;
        }
        let capacity = instance.route_capacity(r);
        let mut time = at;
        let mut position = it.start;
        let mut last_arc = None;
        let mut served_demand = 0;
        let mut done = 0;
        for step in &it.steps {
            if !started(time) {
                break;
            }
            if let Some(e) = step.serves {
                served_demand += net.edge(e).dm();
                served.insert(e);
            }
            time = cost::add(time, step.duration);
            position = net.arc(step.arc).exit;
            last_arc = Some(step.arc);
            done += 1;
        }
        let status = if done == it.steps.len() && position == depot {
            VehicleStatus::Returned
        } else {
            VehicleStatus::Halted
        };
        vehicles.push(VehicleState {
            route: r,
            dispatched_at: at,
            status,
            position,
            last_arc,
            capacity,
            served_demand,
            remaining: capacity - served_demand,
            elapsed: time - at,
        });
    }
    Ok(ExecutionState { vehicles, served: served.into_iter().collect(), stop_time: stop, makespan: sched.makespan, queued })
}

/// Uniform on the open interval `(0, makespan)`.
pub fn sample_stop_time<R: Rng + ?Sized>(makespan: Cost, rng: &mut R) -> Result<f64> {
    if makespan == 0 {
        return Err(Error::ZeroMakespan);
    }
    let m = makespan as f64;
    loop {
        let t = rng.gen_range(0.0..m);
        if t > 0.0 {
            return Ok(t);
        }
    }
}
