//! A frozen DCARP problem state and the task vocabulary shared by solutions,
//! solvers and the simulator.

use alloc::format;
use alloc::vec::Vec;

use crate::cost::{self, Cost, Demand};
use crate::error::{Error, Result};
use crate::network::{ArcId, EdgeId, RoadNetwork, VertexId};
use crate::paths::{shortest_deadhead_matrix, CostMatrix};

/// A directed service inside a route: a real arc (its direction is part of
/// the reference) or the virtual task of outside vehicle `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskRef {
    Arc(ArcId),
    Virtual(usize),
}

/// Service obligation identity: both arcs of an edge are one task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKey {
    Edge(EdgeId),
    Virtual(usize),
}

impl TaskRef {
    pub fn key(self) -> TaskKey {
        match self {
            TaskRef::Arc(a) => TaskKey::Edge(RoadNetwork::edge_of(a)),
            TaskRef::Virtual(k) => TaskKey::Virtual(k),
        }
    }

    /// The opposite direction. Virtual tasks have none.
    pub fn reversed(self) -> Option<TaskRef> {
        match self {
            TaskRef::Arc(a) => Some(TaskRef::Arc(RoadNetwork::twin(a))),
            TaskRef::Virtual(_) => None,
        }
    }

    pub fn is_virtual(self) -> bool {
        matches!(self, TaskRef::Virtual(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Service {
    pub entry: VertexId,
    pub exit: VertexId,
    pub sc: Cost,
    pub dm: Demand,
}

/// What a cost evaluator needs to know about an instance.
pub trait ServiceModel {
    fn depot(&self) -> VertexId;
    fn capacity(&self) -> Demand;
    fn mdc(&self, from: VertexId, to: VertexId) -> Cost;
    fn service(&self, task: TaskRef) -> Option<Service>;
    /// Every task that a feasible solution must serve exactly once.
    fn required(&self) -> Vec<TaskKey>;
    /// Number of leading routes bound to specific (outside) vehicles.
    fn bound_routes(&self) -> usize {
        0
    }
    fn route_start(&self, _route: usize) -> VertexId {
        self.depot()
    }
    fn route_capacity(&self, _route: usize) -> Demand {
        self.capacity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutsideVehicle {
    /// Where the vehicle halted.
    pub stop: VertexId,
    /// Remaining capacity `q_k`.
    pub remaining: Demand,
    /// Index of the route it was executing in the previous solution, if known.
    pub source_route: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcarpInstance {
    network: RoadNetwork,
    matrix: CostMatrix,
    outside: Vec<OutsideVehicle>,
    index: usize,
}

impl DcarpInstance {
    pub fn new(network: RoadNetwork, outside: Vec<OutsideVehicle>, index: usize) -> Result<Self> {
        let matrix = shortest_deadhead_matrix(&network);
        Self::with_matrix(network, matrix, outside, index)
    }

    /// Like [`DcarpInstance::new`] with a matrix already current for `network`.
    pub fn with_matrix(
        network: RoadNetwork,
        matrix: CostMatrix,
        outside: Vec<OutsideVehicle>,
        index: usize,
    ) -> Result<Self> {
        debug_assert!(matrix.is_current_for(&network));
        let q = network.capacity();
        if outside.len() > network.vehicles() {
            return Err(Error::InvalidInstance(format!(
                "{} outside vehicles exceed the fleet size {}",
                outside.len(),
                network.vehicles()
            )));
        }
        let depot = network.depot();
        for (k, ov) in outside.iter().enumerate() {
            if ov.stop >= network.vertex_count() {
                return Err(Error::InvalidInstance(format!(
                    "outside vehicle {k} stops at unknown vertex {}",
                    ov.stop
                )));
            }
            if ov.remaining > q {
                return Err(Error::InvalidInstance(format!(
                    "outside vehicle {k}: remaining capacity {} exceeds Q = {q}",
                    ov.remaining
                )));
            }
            if !cost::is_reachable(matrix.get(depot, ov.stop))
                || !cost::is_reachable(matrix.get(ov.stop, depot))
            {
                return Err(Error::UnreachableStop { vehicle: k, stop: ov.stop });
            }
        }
        for e in network.task_edges() {
            let (a, b) = network.edge(e).endpoints();
            for v in [a, b] {
                if !cost::is_reachable(matrix.get(depot, v)) || !cost::is_reachable(matrix.get(v, depot)) {
                    return Err(Error::InvalidInstance(format!(
                        "task endpoint {v} is unreachable from the depot"
                    )));
                }
            }
        }
        Ok(DcarpInstance { network, matrix, outside, index })
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.network
    }

    pub fn matrix(&self) -> &CostMatrix {
        &self.matrix
    }

    pub fn outside(&self) -> &[OutsideVehicle] {
        &self.outside
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn tasks(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.network.task_edges()
    }

    pub fn task_count(&self) -> usize {
        self.network.task_count()
    }

    /// The same state with every outside vehicle taken off the road.
    pub fn without_outside_vehicles(&self) -> DcarpInstance {
        DcarpInstance {
            network: self.network.clone(),
            matrix: self.matrix.clone(),
            outside: Vec::new(),
            index: self.index,
        }
    }

}

impl ServiceModel for DcarpInstance {
    fn depot(&self) -> VertexId {
        self.network.depot()
    }

    fn capacity(&self) -> Demand {
        self.network.capacity()
    }

    #[inline]
    fn mdc(&self, from: VertexId, to: VertexId) -> Cost {
        self.matrix.get(from, to)
    }

    fn service(&self, task: TaskRef) -> Option<Service> {
        match task {
            TaskRef::Arc(a) if a < self.network.arc_count() => {
                let arc = self.network.arc(a);
                Some(Service { entry: arc.entry, exit: arc.exit, sc: arc.sc, dm: arc.dm })
            }
            _ => None,
        }
    }

    fn required(&self) -> Vec<TaskKey> {
        self.tasks().map(TaskKey::Edge).collect()
    }

    fn bound_routes(&self) -> usize {
        self.outside.len()
    }

    /// `v_k` for the first `N_ov` routes, the depot otherwise.
    fn route_start(&self, route: usize) -> VertexId {
        self.outside.get(route).map_or(self.network.depot(), |ov| ov.stop)
    }

    /// `q_k` for the first `N_ov` routes, `Q` otherwise.
    fn route_capacity(&self, route: usize) -> Demand {
        self.outside.get(route).map_or(self.network.capacity(), |ov| ov.remaining)
    }
}
