//! Generators and brute-force oracles for tests. Nothing here reuses the
//! algorithms under test: distances come from Dijkstra or path enumeration,
//! splits from cut enumeration, optima from subset dynamic programming.

use dcarp_core::{
    Cost, DcarpInstance, Demand, Edge, OutsideVehicle, RoadNetwork, Route, ServiceModel, Solution,
    TaskKey, TaskRef, TrafficState, VertexId, UNREACHABLE,
};
use rand::seq::SliceRandom;
use rand::Rng;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// The four-vertex network used throughout the tests: depot 0, edges
/// 0-1 (2), 1-2 (3), 2-3 (1), 3-0 (4), 0-2 (6). Serving costs equal the
/// deadheading costs except t12 (4) and t23 (3); `demands` lists dm for
/// (0-1, 1-2, 2-3, 3-0, 0-2).
pub fn g4_network(vehicles: usize, capacity: Demand, demands: [Demand; 5]) -> RoadNetwork {
    let [d01, d12, d23, d30, d02] = demands;
    RoadNetwork::new(
        4,
        0,
        vehicles,
        capacity,
        vec![
            Edge::new(0, 1, 2, 2, d01),
            Edge::new(1, 2, 3, 4, d12),
            Edge::new(2, 3, 1, 3, d23),
            Edge::new(3, 0, 4, 4, d30),
            Edge::new(0, 2, 6, 6, d02),
        ],
    )
    .expect("valid fixture")
}

#[derive(Debug, Clone, Copy)]
pub struct NetworkShape {
    pub vertices: usize,
    /// Edges beyond the spanning tree.
    pub extra_edges: usize,
    pub task_prob: f64,
    pub max_dc: Cost,
    pub capacity: Demand,
    pub vehicles: usize,
}

impl Default for NetworkShape {
    fn default() -> Self {
        NetworkShape { vertices: 8, extra_edges: 6, task_prob: 0.6, max_dc: 9, capacity: 20, vehicles: 4 }
    }
}

/// A connected random network (random spanning tree plus extra edges) with at
/// least one task.
pub fn random_network<R: Rng + ?Sized>(rng: &mut R, shape: &NetworkShape) -> RoadNetwork {
    let n = shape.vertices.max(2);
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = std::collections::BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        pairs.insert((a.min(b), a.max(b)));
    }
    let max_pairs = n * (n - 1) / 2;
    let mut tries = 0;
    while pairs.len() < (n - 1 + shape.extra_edges).min(max_pairs) && tries < 10_000 {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
        tries += 1;
    }
    let max_dm = (shape.capacity / 2).max(1);
    let mut edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(a, b)| {
            let dc = rng.gen_range(1..=shape.max_dc);
            let sc = dc + rng.gen_range(0..=3);
            let dm = if rng.gen_bool(shape.task_prob) { rng.gen_range(1..=max_dm) } else { 0 };
            Edge::new(a, b, dc, sc, dm)
        })
        .collect();
    if edges.iter().all(|e| e.dm() == 0) {
        let i = rng.gen_range(0..edges.len());
        edges[i].set_demand(1);
    }
    let depot = rng.gen_range(0..n);
    RoadNetwork::new(n, depot, shape.vehicles, shape.capacity, edges).expect("generated network is valid")
}

/// A random instance with up to `max_outside` outside vehicles parked at
/// random vertices with random remaining capacity.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, shape: &NetworkShape, max_outside: usize) -> DcarpInstance {
    let net = random_network(rng, shape);
    let k = rng.gen_range(0..=max_outside.min(net.vehicles()));
    let outside = (0..k)
        .map(|r| OutsideVehicle {
            stop: rng.gen_range(0..net.vertex_count()),
            remaining: rng.gen_range(0..=net.capacity()),
            source_route: Some(r),
        })
        .collect();
    DcarpInstance::new(net, outside, 0).expect("connected instance is valid")
}

/// Randomly congests and closes edges, keeping the network connected.
pub fn perturb_traffic<R: Rng + ?Sized>(rng: &mut R, net: &mut RoadNetwork) {
    for e in 0..net.edge_count() {
        match rng.gen_range(0..4) {
            0 => {
                let base = net.edge(e).base_dc();
                net.edge_mut(e).set_congested(base + rng.gen_range(1..=5));
            }
            1 => {
                let before = net.reachable_from(net.depot(), None).iter().filter(|&&s| s).count();
                let after = net.reachable_from(net.depot(), Some(e)).iter().filter(|&&s| s).count();
                if before == after {
                    net.edge_mut(e).close();
                }
            }
            _ => {}
        }
    }
}

/// All-pairs open deadheading costs by Dijkstra from every vertex.
pub fn dijkstra_all_pairs(net: &RoadNetwork) -> Vec<Vec<Cost>> {
    let n = net.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in net.edges() {
        if let Some(dc) = e.dc() {
            let (a, b) = e.endpoints();
            adj[a].push((b, dc));
            adj[b].push((a, dc));
        }
    }
    (0..n)
        .map(|s| {
            let mut dist = vec![UNREACHABLE; n];
            dist[s] = 0;
            let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &(w, c) in &adj[v] {
                    let nd = d + c;
                    if nd < dist[w] {
                        dist[w] = nd;
                        heap.push(Reverse((nd, w)));
                    }
                }
            }
            dist
        })
        .collect()
}

/// Every simple path from `from` to `to` over open edges, as vertex lists.
pub fn simple_paths(net: &RoadNetwork, from: VertexId, to: VertexId) -> Vec<Vec<VertexId>> {
    fn walk(net: &RoadNetwork, at: VertexId, to: VertexId, path: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if at == to {
            out.push(path.clone());
            return;
        }
        for e in net.edges() {
            if e.state() == TrafficState::Closed {
                continue;
            }
            let (a, b) = e.endpoints();
            let next = if a == at { b } else if b == at { a } else { continue };
            if path.contains(&next) {
                continue;
            }
            path.push(next);
            walk(net, next, to, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(net, from, to, &mut vec![from], &mut out);
    out
}

/// Cheapest simple path by exhaustive enumeration.
pub fn enumerated_mdc(net: &RoadNetwork, from: VertexId, to: VertexId) -> Cost {
    simple_paths(net, from, to)
        .iter()
        .map(|p| {
            p.windows(2)
                .map(|w| {
                    let e = net.edge_between(w[0], w[1]).expect("path uses edges");
                    net.edge(e).dc().expect("path avoids closed edges")
                })
                .sum()
        })
        .min()
        .unwrap_or(UNREACHABLE)
}

/// Route cost recomputed from first principles with an external distance table.
pub fn naive_route_cost<M: ServiceModel + ?Sized>(route: &Route, model: &M, dist: &[Vec<Cost>]) -> Cost {
    let mut at = route.start;
    let mut total: Cost = 0;
    for &t in &route.tasks {
        let s = model.service(t).expect("known task");
        total = sat(sat(total, dist[at][s.entry]), s.sc);
        at = s.exit;
    }
    sat(total, dist[at][model.depot()])
}

pub fn naive_total_cost<M: ServiceModel + ?Sized>(solution: &Solution, model: &M, dist: &[Vec<Cost>]) -> Cost {
    solution.routes.iter().fold(0, |acc, r| sat(acc, naive_route_cost(r, model, dist)))
}

fn sat(a: Cost, b: Cost) -> Cost {
    if a == UNREACHABLE || b == UNREACHABLE {
        UNREACHABLE
    } else {
        a + b
    }
}

/// Depot-route cost of a block of tasks, or `None` when over capacity.
fn block_cost<M: ServiceModel + ?Sized>(model: &M, block: &[TaskRef]) -> Option<Cost> {
    let demand: Demand = block.iter().map(|&t| model.service(t).expect("known task").dm).sum();
    if demand > model.capacity() {
        return None;
    }
    let depot = model.depot();
    let route = Route::new(depot, block.to_vec());
    let mut at = depot;
    let mut total: Cost = 0;
    for &t in &route.tasks {
        let s = model.service(t).unwrap();
        total = sat(sat(total, model.mdc(at, s.entry)), s.sc);
        at = s.exit;
    }
    Some(sat(total, model.mdc(at, depot)))
}

/// Best split of a fixed sequence by enumerating all `2^(n-1)` cut sets.
pub fn brute_force_split<M: ServiceModel + ?Sized>(seq: &[TaskRef], model: &M) -> Option<Cost> {
    let n = seq.len();
    if n == 0 {
        return Some(0);
    }
    assert!(n <= 20, "cut enumeration is exponential");
    let mut best: Option<Cost> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut total: Cost = 0;
        let mut start = 0;
        let mut ok = true;
        for i in 1..=n {
            if i == n || mask & (1 << (i - 1)) != 0 {
                match block_cost(model, &seq[start..i]) {
                    Some(c) => total = sat(total, c),
                    None => {
                        ok = false;
                        break;
                    }
                }
                start = i;
            }
        }
        if ok && total != UNREACHABLE && best.is_none_or(|b| total < b) {
            best = Some(total);
        }
    }
    best
}

/// Exact optimum over depot routes (unbounded fleet): cheapest ordering and
/// orientation of every task subset by Held-Karp, then the cheapest partition
/// into capacity-feasible subsets. Practical up to about 12 tasks.
pub fn exact_optimum<M: ServiceModel + ?Sized>(model: &M) -> Option<Cost> {
    let tasks: Vec<TaskRef> = model
        .required()
        .into_iter()
        .map(|k| match k {
            TaskKey::Edge(e) => TaskRef::Arc(2 * e),
            TaskKey::Virtual(v) => TaskRef::Virtual(v),
        })
        .collect();
    let n = tasks.len();
    assert!(n <= 14, "subset DP is exponential");
    if n == 0 {
        return Some(0);
    }
    let depot = model.depot();
    let dirs: Vec<Vec<_>> = tasks
        .iter()
        .map(|&t| std::iter::once(t).chain(t.reversed()).map(|d| model.service(d).unwrap()).collect())
        .collect();
    let demand: Vec<Demand> = dirs.iter().map(|d| d[0].dm).collect();
    let full = 1usize << n;
    // path[mask][i*2+o]: cheapest walk from the depot serving `mask`, ending
    // with task i in orientation o.
    let mut path = vec![vec![UNREACHABLE; 2 * n]; full];
    for i in 0..n {
        for (o, s) in dirs[i].iter().enumerate() {
            path[1 << i][2 * i + o] = sat(model.mdc(depot, s.entry), s.sc);
        }
    }
    for mask in 1..full {
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            for (o, s) in dirs[i].iter().enumerate() {
                let c = path[mask][2 * i + o];
                if c == UNREACHABLE {
                    continue;
                }
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    for (p, t) in dirs[j].iter().enumerate() {
                        let nc = sat(sat(c, model.mdc(s.exit, t.entry)), t.sc);
                        let slot = &mut path[mask | (1 << j)][2 * j + p];
                        if nc < *slot {
                            *slot = nc;
                        }
                    }
                }
            }
        }
    }
    let mut route = vec![UNREACHABLE; full];
    for mask in 1..full {
        let load: Demand = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| demand[i]).sum();
        if load > model.capacity() {
            continue;
        }
        for i in 0..n {
            for (o, s) in dirs[i].iter().enumerate() {
                let c = sat(path[mask][2 * i + o], model.mdc(s.exit, depot));
                if c < route[mask] {
                    route[mask] = c;
                }
            }
        }
    }
    let mut best = vec![UNREACHABLE; full];
    best[0] = 0;
    for mask in 1..full {
        // Fix the lowest task in the first block to avoid counting orders.
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let block = sub | low;
            let c = sat(route[block], best[mask ^ block]);
            if c < best[mask] {
                best[mask] = c;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    (best[full - 1] != UNREACHABLE).then_some(best[full - 1])
}

/// Grand-tour cost of a task list, with the depot at both ends.
pub fn tour_cost<M: ServiceModel + ?Sized>(seq: &[TaskRef], model: &M) -> Cost {
    let depot = model.depot();
    let mut at = depot;
    let mut total = 0;
    for &t in seq {
        let s = model.service(t).unwrap();
        total = sat(sat(total, model.mdc(at, s.entry)), s.sc);
        at = s.exit;
    }
    sat(total, model.mdc(at, depot))
}

/// The cheapest single insertion by trying every position and direction and
/// re-evaluating the whole tour. Earliest position, then lower arc, wins ties.
pub fn exhaustive_insertion<M: ServiceModel + ?Sized>(seq: &[TaskRef], task: TaskRef, model: &M) -> (usize, TaskRef, Cost) {
    let mut dirs: Vec<TaskRef> = std::iter::once(task).chain(task.reversed()).collect();
    dirs.sort();
    let mut best: Option<(usize, TaskRef, Cost)> = None;
    for p in 0..=seq.len() {
        for &d in &dirs {
            let mut s = seq.to_vec();
            s.insert(p, d);
            let c = tour_cost(&s, model);
            if best.is_none_or(|(_, _, b)| c < b) {
                best = Some((p, d, c));
            }
        }
    }
    best.unwrap()
}

/// Every obligation of `model` once, in random order and random directions.
pub fn random_sequence<M: ServiceModel + ?Sized, R: Rng + ?Sized>(model: &M, rng: &mut R) -> Vec<TaskRef> {
    let mut seq: Vec<TaskRef> = model
        .required()
        .into_iter()
        .map(|k| match k {
            TaskKey::Edge(e) => TaskRef::Arc(2 * e + rng.gen_range(0..2)),
            TaskKey::Virtual(v) => TaskRef::Virtual(v),
        })
        .collect();
    seq.shuffle(rng);
    seq
}

/// A random capacity-feasible depot-route solution: a random sequence cut
/// where capacity forces it and at random elsewhere.
pub fn random_solution<M: ServiceModel + ?Sized, R: Rng + ?Sized>(model: &M, rng: &mut R) -> Solution {
    let depot = model.depot();
    let mut routes = Vec::new();
    let mut current: Vec<TaskRef> = Vec::new();
    let mut load = 0;
    for t in random_sequence(model, rng) {
        let dm = model.service(t).expect("known task").dm;
        if !current.is_empty() && (load + dm > model.capacity() || rng.gen_bool(0.25)) {
            routes.push(Route::new(depot, std::mem::take(&mut current)));
            load = 0;
        }
        current.push(t);
        load += dm;
    }
    if !current.is_empty() {
        routes.push(Route::new(depot, current));
    }
    Solution::new(routes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_agrees_with_dijkstra() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let mut net = random_network(&mut rng, &NetworkShape { vertices: 6, ..Default::default() });
            perturb_traffic(&mut rng, &mut net);
            let d = dijkstra_all_pairs(&net);
            for a in 0..6 {
                for b in 0..6 {
                    assert_eq!(d[a][b], enumerated_mdc(&net, a, b));
                }
            }
        }
    }

    #[test]
    fn g4_distances() {
        let net = g4_network(2, 10, [0; 5]);
        assert_eq!(enumerated_mdc(&net, 0, 2), 5);
        assert_eq!(enumerated_mdc(&net, 1, 3), 4);
        assert_eq!(enumerated_mdc(&net, 0, 3), 4);
    }
}
