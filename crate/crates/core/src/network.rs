//! Road network: vertices, undirected edges stored as twin arc pairs, and the
//! traffic state of every edge.
//!
//! Edges are kept in canonical order (sorted by their `(low, high)` endpoint
//! pair) so that edge ids stay stable when attributes change. Edge `e` owns
//! arcs `2e` (low to high) and `2e + 1` (high to low); the two arcs always
//! share cost, demand and state.

use alloc::format;
use alloc::vec::Vec;

use crate::cost::{Cost, Demand};
use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrafficState {
    Normal,
    Closed,
    Congested,
}

impl TrafficState {
    pub fn as_str(self) -> &'static str {
        match self {
            TrafficState::Normal => "normal",
            TrafficState::Closed => "closed",
            TrafficState::Congested => "congested",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    low: VertexId,
    high: VertexId,
    base_dc: Cost,
    base_sc: Cost,
    dc: Cost,
    dm: Demand,
    state: TrafficState,
}

impl Edge {
    /// A normal-state edge. Endpoints may be given in either order.
    pub fn new(a: VertexId, b: VertexId, dc: Cost, sc: Cost, dm: Demand) -> Self {
        Edge {
            low: a.min(b),
            high: a.max(b),
            base_dc: dc,
            base_sc: sc,
            dc,
            dm,
            state: TrafficState::Normal,
        }
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.low, self.high)
    }

    pub fn base_dc(&self) -> Cost {
        self.base_dc
    }

    pub fn base_sc(&self) -> Cost {
        self.base_sc
    }

    /// Current deadheading cost, `None` while closed.
    pub fn dc(&self) -> Option<Cost> {
        match self.state {
            TrafficState::Closed => None,
            _ => Some(self.dc),
        }
    }

    /// Congested deadheading cost, or the base cost when not congested.
    pub fn raw_dc(&self) -> Cost {
        self.dc
    }

    /// Serving includes traversal, so congestion surcharges apply to it too.
    /// Closure only blocks deadheading.
    pub fn sc(&self) -> Cost {
        match self.state {
            TrafficState::Congested => self.base_sc + (self.dc - self.base_dc),
            _ => self.base_sc,
        }
    }

    pub fn dm(&self) -> Demand {
        self.dm
    }

    pub fn state(&self) -> TrafficState {
        self.state
    }

    pub fn is_task(&self) -> bool {
        self.dm > 0
    }

    pub fn close(&mut self) {
        self.state = TrafficState::Closed;
        self.dc = self.base_dc;
    }

    /// Back to the un-congested expected cost.
    pub fn restore(&mut self) {
        self.state = TrafficState::Normal;
        self.dc = self.base_dc;
    }

    /// Sets a congested cost. A cost at (or below) the base cost is a full
    /// recovery.
    pub fn set_congested(&mut self, dc: Cost) {
        if dc <= self.base_dc {
            self.restore();
        } else {
            self.state = TrafficState::Congested;
            self.dc = dc;
        }
    }

    pub fn set_demand(&mut self, dm: Demand) {
        self.dm = dm;
    }
}

/// Directed view of one arc of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcView {
    pub id: ArcId,
    pub edge: EdgeId,
    /// Where service (or traversal) begins.
    pub entry: VertexId,
    /// Where service (or traversal) ends.
    pub exit: VertexId,
    pub dc: Option<Cost>,
    pub sc: Cost,
    pub dm: Demand,
    pub state: TrafficState,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoadNetwork {
    vertex_count: usize,
    depot: VertexId,
    vehicles: usize,
    capacity: Demand,
    edges: Vec<Edge>,
}

impl RoadNetwork {
    pub fn new(
        vertex_count: usize,
        depot: VertexId,
        vehicles: usize,
        capacity: Demand,
        mut edges: Vec<Edge>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidNetwork("network has no vertices".into()));
        }
        if depot >= vertex_count {
            return Err(Error::InvalidNetwork(format!("depot {depot} is not a vertex")));
        }
        if capacity == 0 {
            return Err(Error::InvalidNetwork("vehicle capacity must be positive".into()));
        }
        if vehicles == 0 {
            return Err(Error::InvalidNetwork("fleet must have at least one vehicle".into()));
        }
        for e in &edges {
            if e.high >= vertex_count {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({}, {}) references a vertex outside 0..{vertex_count}",
                    e.low, e.high
                )));
            }
            if e.base_sc < e.base_dc {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({}, {}) has serving cost {} below deadheading cost {}",
                    e.low, e.high, e.base_sc, e.base_dc
                )));
            }
        }
        edges.sort_by_key(|e| (e.low, e.high));
        if let Some(w) = edges.windows(2).find(|w| w[0].endpoints() == w[1].endpoints()) {
            return Err(Error::InvalidNetwork(format!(
                "duplicate edge ({}, {})",
                w[0].low, w[0].high
            )));
        }
        Ok(RoadNetwork { vertex_count, depot, vehicles, capacity, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn depot(&self) -> VertexId {
        self.depot
    }

    pub fn vehicles(&self) -> usize {
        self.vehicles
    }

    pub fn capacity(&self) -> Demand {
        self.capacity
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_mut(&mut self, e: EdgeId) -> &mut Edge {
        &mut self.edges[e]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn arc_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn twin(arc: ArcId) -> ArcId {
        arc ^ 1
    }

    pub fn edge_of(arc: ArcId) -> EdgeId {
        arc / 2
    }

    pub fn arc(&self, id: ArcId) -> ArcView {
        let edge = &self.edges[id / 2];
        let (entry, exit) = if id % 2 == 0 { (edge.low, edge.high) } else { (edge.high, edge.low) };
        ArcView {
            id,
            edge: id / 2,
            entry,
            exit,
            dc: edge.dc(),
            sc: edge.sc(),
            dm: edge.dm,
            state: edge.state,
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcView> + '_ {
        (0..self.arc_count()).map(move |a| self.arc(a))
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search_by_key(&key, |e| (e.low, e.high)).ok()
    }

    /// The arc whose service runs from `entry` to `exit`.
    pub fn arc_between(&self, entry: VertexId, exit: VertexId) -> Option<ArcId> {
        let e = self.edge_between(entry, exit)?;
        Some(if entry <= exit { 2 * e } else { 2 * e + 1 })
    }

    /// Edges with positive demand, in id order.
    pub fn task_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_task()).map(|(i, _)| i)
    }

    pub fn task_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_task()).count()
    }

    /// Open-edge adjacency, as `(neighbor, edge)` pairs per vertex.
    pub fn open_adjacency(&self) -> Vec<Vec<(VertexId, EdgeId)>> {
        let mut adj = alloc::vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            if e.state != TrafficState::Closed {
                adj[e.low].push((e.high, i));
                adj[e.high].push((e.low, i));
            }
        }
        adj
    }

    /// Vertices reachable from `from` over open edges, optionally pretending
    /// `skip` is closed.
    pub fn reachable_from(&self, from: VertexId, skip: Option<EdgeId>) -> Vec<bool> {
        let adj = self.open_adjacency();
        let mut seen = alloc::vec![false; self.vertex_count];
        let mut stack = alloc::vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &(w, e) in &adj[v] {
                if Some(e) != skip && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}
