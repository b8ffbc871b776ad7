//! All-pairs minimal deadheading costs (`mdc`) with next-hop arcs for path
//! reconstruction.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{self, Cost, UNREACHABLE};
use crate::network::{ArcId, RoadNetwork, VertexId};

const NO_ARC: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    dist: Vec<Cost>,
    next: Vec<u32>,
    /// Exit vertex of every arc, for walking next-hop chains.
    arc_exit: Vec<VertexId>,
    /// Open deadheading cost of each edge at build time.
    snapshot: Vec<Option<Cost>>,
}

impl CostMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, from: VertexId, to: VertexId) -> Cost {
        self.dist[from * self.n + to]
    }

    /// Arcs of one minimal deadheading path, empty when `from == to`.
    pub fn path(&self, from: VertexId, to: VertexId) -> Option<Vec<ArcId>> {
        if !cost::is_reachable(self.get(from, to)) {
            return None;
        }
        let mut arcs = Vec::new();
        let mut at = from;
        while at != to {
            let a = self.next[at * self.n + to];
            debug_assert_ne!(a, NO_ARC);
            arcs.push(a as ArcId);
            at = self.arc_exit[a as usize];
        }
        Some(arcs)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Whether the matrix was built from exactly these open edge costs.
    pub fn is_current_for(&self, network: &RoadNetwork) -> bool {
        self.n == network.vertex_count()
            && self.snapshot.len() == network.edge_count()
            && network.edges().iter().zip(&self.snapshot).all(|(e, s)| e.dc() == *s)
    }
}

/// Floyd-Warshall over open arcs. Closed arcs are skipped entirely, so an
/// unreachable pair stays [`UNREACHABLE`].
pub fn shortest_deadhead_matrix(network: &RoadNetwork) -> CostMatrix {
    let n = network.vertex_count();
    let mut dist = vec![UNREACHABLE; n * n];
    let mut next = vec![NO_ARC; n * n];
    for v in 0..n {
        dist[v * n + v] = 0;
    }
    let mut arc_exit = Vec::with_capacity(network.arc_count());
    for arc in network.arcs() {
        arc_exit.push(arc.exit);
        let Some(dc) = arc.dc else { continue };
        if arc.entry == arc.exit {
            continue;
        }
        let slot = arc.entry * n + arc.exit;
        if dc < dist[slot] {
            dist[slot] = dc;
            next[slot] = arc.id as u32;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let ik = dist[i * n + k];
            if ik == UNREACHABLE {
                continue;
            }
            let hop = next[i * n + k];
            for j in 0..n {
                let kj = dist[k * n + j];
                if kj == UNREACHABLE {
                    continue;
                }
                let through = cost::add(ik, kj);
                let slot = i * n + j;
                if through < dist[slot] {
                    dist[slot] = through;
                    next[slot] = hop;
                }
            }
        }
    }
    let snapshot = network.edges().iter().map(|e| e.dc()).collect();
    CostMatrix { n, dist, next, arc_exit, snapshot }
}

/// Brings `matrix` up to date with the network's current arc costs. Reuses
/// the matrix when no open cost changed, otherwise recomputes it.
pub fn refresh_costs(network: &RoadNetwork, matrix: &CostMatrix) -> CostMatrix {
    if matrix.is_current_for(network) {
        matrix.clone()
    } else {
        shortest_deadhead_matrix(network)
    }
}
