//! Virtual tasks: an outside vehicle is modelled as a depot vehicle that must
//! first serve a task running from the depot to its stop vertex, carrying the
//! load it already collected. A static CARP solver can then treat every
//! vehicle as starting at the depot with full capacity `Q`.
//!
//! Virtual tasks exist only in the task set, never in the road network, so no
//! deadheading path can use them. Each carries `sc = mdc(depot, v_k)`; the sum
//! of those serving costs is deducted once as the adjustment constant.

use alloc::vec::Vec;

use crate::cost::{Cost, Demand};
use crate::error::{Error, Result};
use crate::instance::{DcarpInstance, Service, ServiceModel, TaskKey, TaskRef};
use crate::network::VertexId;
use crate::solution::{total_cost, Route, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirtualTask {
    /// Outside-vehicle index `k`.
    pub owner: usize,
    /// Always the depot.
    pub entry: VertexId,
    /// The owner's stop vertex.
    pub exit: VertexId,
    /// `Q - q_k`: the load already on board.
    pub dm: Demand,
    /// `mdc(depot, v_k)`.
    pub sc: Cost,
}

/// The augmented "static" instance handed to CARP solvers.
#[derive(Debug, Clone)]
pub struct StaticView<'a> {
    instance: &'a DcarpInstance,
    virtual_tasks: Vec<VirtualTask>,
    adjustment: Cost,
    /// Services of all arcs, then of all virtual tasks.
    table: Vec<Service>,
    required: Vec<TaskKey>,
}

impl<'a> StaticView<'a> {
    pub fn instance(&self) -> &'a DcarpInstance {
        self.instance
    }

    pub fn virtual_tasks(&self) -> &[VirtualTask] {
        &self.virtual_tasks
    }

    /// `A`, the summed serving cost of the virtual tasks.
    pub fn adjustment(&self) -> Cost {
        self.adjustment
    }

    /// One reference per obligation: real tasks in their low-to-high
    /// direction, then virtual tasks.
    pub fn task_refs(&self) -> Vec<TaskRef> {
        self.required
            .iter()
            .map(|k| match *k {
                TaskKey::Edge(e) => TaskRef::Arc(2 * e),
                TaskKey::Virtual(v) => TaskRef::Virtual(v),
            })
            .collect()
    }

    pub fn task_count(&self) -> usize {
        self.required.len()
    }
}

impl ServiceModel for StaticView<'_> {
    fn depot(&self) -> VertexId {
        self.instance.network().depot()
    }

    fn capacity(&self) -> Demand {
        self.instance.network().capacity()
    }

    #[inline]
    fn mdc(&self, from: VertexId, to: VertexId) -> Cost {
        self.instance.matrix().get(from, to)
    }

    #[inline]
    fn service(&self, task: TaskRef) -> Option<Service> {
        let arcs = self.instance.network().arc_count();
        match task {
            TaskRef::Arc(a) if a < arcs => Some(self.table[a]),
            TaskRef::Virtual(k) => self.table.get(arcs + k).copied(),
            _ => None,
        }
    }

    fn required(&self) -> Vec<TaskKey> {
        self.required.clone()
    }
}

pub fn build_static_view(instance: &DcarpInstance) -> Result<StaticView<'_>> {
    let net = instance.network();
    let depot = net.depot();
    let q = net.capacity();
    let mut virtual_tasks = Vec::with_capacity(instance.outside().len());
    for (k, ov) in instance.outside().iter().enumerate() {
        let sc = instance.mdc(depot, ov.stop);
        if !crate::cost::is_reachable(sc) {
            return Err(Error::UnreachableStop { vehicle: k, stop: ov.stop });
        }
        virtual_tasks.push(VirtualTask { owner: k, entry: depot, exit: ov.stop, dm: q - ov.remaining, sc });
    }
    let adjustment = virtual_tasks.iter().map(|v| v.sc).sum();
    let mut table: Vec<Service> = net
        .arcs()
        .map(|a| Service { entry: a.entry, exit: a.exit, sc: a.sc, dm: a.dm })
        .collect();
    table.extend(virtual_tasks.iter().map(|v| Service { entry: v.entry, exit: v.exit, sc: v.sc, dm: v.dm }));
    let mut required = instance.required();
    required.extend((0..virtual_tasks.len()).map(TaskKey::Virtual));
    Ok(StaticView { instance, virtual_tasks, adjustment, table, required })
}

/// Total route cost minus the adjustment constant. Every virtual task must be
/// served exactly once.
pub fn adjusted_cost(solution: &Solution, view: &StaticView<'_>) -> Result<Cost> {
    let mut count = alloc::vec![0usize; view.virtual_tasks.len()];
    for t in solution.routes.iter().flat_map(|r| &r.tasks) {
        if let TaskRef::Virtual(k) = *t {
            match count.get_mut(k) {
                Some(c) => *c += 1,
                None => return Err(Error::UnknownTask(alloc::format!("{t:?}"))),
            }
        }
    }
    if let Some(k) = count.iter().position(|&c| c == 0) {
        return Err(Error::MissingVirtualTask(k));
    }
    if let Some(k) = count.iter().position(|&c| c > 1) {
        return Err(Error::DuplicateVirtualTask(k));
    }
    Ok(total_cost(solution, view)? - view.adjustment)
}

/// Splits every route immediately before each virtual task that is not its
/// first task. The virtual task's entry is the depot, so costs are unchanged.
pub fn normalize_virtual_routes(solution: &Solution) -> Solution {
    let mut routes = Vec::with_capacity(solution.routes.len());
    for route in &solution.routes {
        let mut current = Vec::new();
        for &t in &route.tasks {
            if t.is_virtual() && !current.is_empty() {
                routes.push(Route::new(route.start, core::mem::take(&mut current)));
            }
            current.push(t);
        }
        routes.push(Route::new(route.start, current));
    }
    Solution::new(routes)
}

/// Turns a normalized view solution into an executable one: each virtual-task
/// route is handed to its outside vehicle (starting at the stop vertex, with
/// the virtual task removed). Outside-vehicle routes come first, in vehicle
/// order; depot routes follow in their original order.
pub fn to_executable(solution: &Solution, instance: &DcarpInstance) -> Result<Solution> {
    let outside = instance.outside();
    let mut owned: Vec<Option<Route>> = alloc::vec![None; outside.len()];
    let mut depot_routes = Vec::new();
    for route in &solution.routes {
        if let Some(pos) = route.tasks.iter().skip(1).position(|t| t.is_virtual()) {
            return Err(Error::Infeasible(alloc::format!(
                "virtual task at position {} is not leading its route; normalize first",
                pos + 1
            )));
        }
        match route.tasks.first() {
            Some(&TaskRef::Virtual(k)) => {
                let slot = owned.get_mut(k).ok_or_else(|| Error::UnknownTask(alloc::format!("v{k}")))?;
                if slot.is_some() {
                    return Err(Error::DuplicateVirtualTask(k));
                }
                *slot = Some(Route::new(outside[k].stop, route.tasks[1..].to_vec()));
            }
            _ => depot_routes.push(Route::new(instance.network().depot(), route.tasks.clone())),
        }
    }
    let mut routes = Vec::with_capacity(owned.len() + depot_routes.len());
    for (k, r) in owned.into_iter().enumerate() {
        routes.push(r.ok_or(Error::MissingVirtualTask(k))?);
    }
    routes.extend(depot_routes);
    Ok(Solution::new(routes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::OutsideVehicle;
    use crate::network::{Edge, RoadNetwork};
    use crate::solution::check_feasibility;
    use alloc::vec;

    fn g4(outside: Vec<OutsideVehicle>) -> DcarpInstance {
        let net = RoadNetwork::new(
            4,
            0,
            3,
            10,
            vec![
                Edge::new(0, 1, 2, 2, 0),
                Edge::new(1, 2, 3, 4, 0),
                Edge::new(2, 3, 1, 3, 4),
                Edge::new(3, 0, 4, 4, 0),
                Edge::new(0, 2, 6, 6, 0),
            ],
        )
        .unwrap();
        DcarpInstance::new(net, outside, 1).unwrap()
    }

    #[test]
    fn no_outside_vehicles_is_identity() {
        let inst = g4(vec![]);
        let view = build_static_view(&inst).unwrap();
        assert_eq!(view.adjustment(), 0);
        assert!(view.virtual_tasks().is_empty());
        assert_eq!(view.required(), inst.required());
    }

    #[test]
    fn g4_virtual_task() {
        let inst = g4(vec![OutsideVehicle { stop: 2, remaining: 6, source_route: None }]);
        let view = build_static_view(&inst).unwrap();
        assert_eq!(
            view.virtual_tasks(),
            &[VirtualTask { owner: 0, entry: 0, exit: 2, dm: 4, sc: 5 }]
        );
        assert_eq!(view.adjustment(), 5);

        let t23 = TaskRef::Arc(inst.network().arc_between(2, 3).unwrap());
        let s = Solution::new(vec![Route::new(0, vec![TaskRef::Virtual(0), t23])]);
        assert!(check_feasibility(&s, &view).is_empty());
        assert_eq!(total_cost(&s, &view), Ok(12));
        assert_eq!(adjusted_cost(&s, &view), Ok(7));
        let exec = to_executable(&normalize_virtual_routes(&s), &inst).unwrap();
        assert_eq!(exec.routes, vec![Route::new(2, vec![t23])]);
        assert_eq!(total_cost(&exec, &inst), Ok(7));
        assert!(check_feasibility(&exec, &inst).is_empty());
    }

    #[test]
    fn parked_at_depot_with_full_capacity() {
        let inst = g4(vec![OutsideVehicle { stop: 0, remaining: 10, source_route: None }]);
        let view = build_static_view(&inst).unwrap();
        assert_eq!((view.virtual_tasks()[0].dm, view.virtual_tasks()[0].sc), (0, 0));
    }

    #[test]
    fn missing_virtual_task_is_infeasible() {
        let inst = g4(vec![OutsideVehicle { stop: 2, remaining: 6, source_route: None }]);
        let view = build_static_view(&inst).unwrap();
        let t23 = TaskRef::Arc(inst.network().arc_between(2, 3).unwrap());
        let s = Solution::new(vec![Route::new(0, vec![t23])]);
        assert_eq!(adjusted_cost(&s, &view), Err(Error::MissingVirtualTask(0)));
        assert_eq!(to_executable(&s, &inst), Err(Error::MissingVirtualTask(0)));
    }

    #[test]
    fn worked_normalization_example() {
        // (v0, vt1, t2, v0), (v0, t3, t4, vt2, t5, v0)
        let (vt1, vt2) = (TaskRef::Virtual(0), TaskRef::Virtual(1));
        let (t2, t3, t4, t5) = (TaskRef::Arc(2), TaskRef::Arc(4), TaskRef::Arc(6), TaskRef::Arc(8));
        let s = Solution::new(vec![Route::new(0, vec![vt1, t2]), Route::new(0, vec![t3, t4, vt2, t5])]);
        let n = normalize_virtual_routes(&s);
        assert_eq!(
            n.routes,
            vec![Route::new(0, vec![vt1, t2]), Route::new(0, vec![t3, t4]), Route::new(0, vec![vt2, t5])]
        );
        assert_eq!(normalize_virtual_routes(&n), n);
    }

    #[test]
    fn two_interior_virtual_tasks_make_three_routes() {
        let s = Solution::new(vec![Route::new(
            0,
            vec![TaskRef::Arc(0), TaskRef::Virtual(0), TaskRef::Arc(2), TaskRef::Virtual(1)],
        )]);
        assert_eq!(normalize_virtual_routes(&s).routes.len(), 3);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let inst = g4(vec![OutsideVehicle { stop: 2, remaining: 6, source_route: None }]);
        let s = Solution::new(vec![Route::new(0, vec![TaskRef::Arc(8), TaskRef::Virtual(0)])]);
        assert!(matches!(to_executable(&s, &inst), Err(Error::Infeasible(_))));
    }
}
