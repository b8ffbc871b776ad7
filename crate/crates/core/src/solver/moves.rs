//! The move neighbourhood shared by local search and the descent solver:
//! single and double insertion, swap, intra-route reversal (2-opt) and
//! inter-route tail exchange (2-opt). Moved tasks are re-oriented.

use alloc::vec::Vec;

use crate::cost::{self, Cost, Demand};
use crate::instance::{ServiceModel, TaskKey, TaskRef};
use crate::solution::{Route, Solution};

use super::Meter;

/// Depot routes with cached loads and costs.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub routes: Vec<Vec<TaskRef>>,
    pub loads: Vec<Demand>,
    pub costs: Vec<Cost>,
}

impl Plan {
    pub fn new<M: ServiceModel + ?Sized>(solution: &Solution, model: &M) -> Self {
        let routes: Vec<Vec<TaskRef>> =
            solution.routes.iter().filter(|r| !r.is_empty()).map(|r| r.tasks.clone()).collect();
        let mut plan = Plan { loads: Vec::new(), costs: Vec::new(), routes };
        plan.refresh(model);
        plan
    }

    fn refresh<M: ServiceModel + ?Sized>(&mut self, model: &M) {
        self.routes.retain(|r| !r.is_empty());
        self.loads = self.routes.iter().map(|r| load_of(model, r.iter().copied())).collect();
        self.costs = self.routes.iter().map(|r| cost_of(model, r.iter().copied())).collect();
    }

    pub fn total(&self) -> Cost {
        self.costs.iter().fold(0, |a, &c| cost::add(a, c))
    }

    pub fn to_solution(&self, depot: usize) -> Solution {
        Solution::new(self.routes.iter().map(|r| Route::new(depot, r.clone())).collect())
    }

    pub fn apply<M: ServiceModel + ?Sized>(&mut self, mv: &Move, model: &M) {
        match *mv {
            Move::Relocate { from, pos, len, to, at, seg } => {
                let seg = &seg[..len];
                self.routes[from].drain(pos..pos + len);
                if to == self.routes.len() {
                    self.routes.push(seg.to_vec());
                } else {
                    let target = &mut self.routes[to];
                    for (i, &t) in seg.iter().enumerate() {
                        target.insert(at + i, t);
                    }
                }
            }
            Move::Swap { r1, p1, t1, r2, p2, t2 } => {
                self.routes[r1][p1] = t1;
                self.routes[r2][p2] = t2;
            }
            Move::Reverse { route, i, j } => {
                let r = &mut self.routes[route];
                r[i..=j].reverse();
                for t in &mut r[i..=j] {
                    *t = t.reversed().expect("reversal never covers virtual tasks");
                }
            }
            Move::Exchange { r1, c1, r2, c2 } => {
                let tail1 = self.routes[r1].split_off(c1);
                let tail2 = self.routes[r2].split_off(c2);
                self.routes[r1].extend(tail2);
                self.routes[r2].extend(tail1);
            }
        }
        self.refresh(model);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Move {
    /// Move `len` (1 or 2) consecutive tasks from `from[pos..]` to position
    /// `at` of `to` (positions in `to` after the removal when `to == from`).
    /// `to == routes.len()` opens a new route.
    Relocate { from: usize, pos: usize, len: usize, to: usize, at: usize, seg: [TaskRef; 2] },
    /// Put `t1` at `(r1, p1)` and `t2` at `(r2, p2)`.
    Swap { r1: usize, p1: usize, t1: TaskRef, r2: usize, p2: usize, t2: TaskRef },
    /// Reverse `route[i..=j]`, flipping every task.
    Reverse { route: usize, i: usize, j: usize },
    /// Swap the tails `r1[c1..]` and `r2[c2..]`.
    Exchange { r1: usize, c1: usize, r2: usize, c2: usize },
}

impl Move {
    /// Tasks whose placement the move changes, for tabu bookkeeping.
    pub fn touched(&self, plan: &Plan) -> [Option<TaskKey>; 2] {
        match *self {
            Move::Relocate { len, seg, .. } => [Some(seg[0].key()), (len == 2).then(|| seg[1].key())],
            Move::Swap { t1, t2, .. } => [Some(t1.key()), Some(t2.key())],
            Move::Reverse { route, i, j } => {
                [Some(plan.routes[route][i].key()), Some(plan.routes[route][j].key())]
            }
            Move::Exchange { r1, c1, r2, c2 } => {
                [plan.routes[r1].get(c1).map(|t| t.key()), plan.routes[r2].get(c2).map(|t| t.key())]
            }
        }
    }
}

#[inline]
pub(crate) fn cost_of<M, I>(model: &M, tasks: I) -> Cost
where
    M: ServiceModel + ?Sized,
    I: IntoIterator<Item = TaskRef>,
{
    let depot = model.depot();
    let mut at = depot;
    let mut total: Cost = 0;
    for t in tasks {
        let Some(s) = model.service(t) else { return cost::UNREACHABLE };
        total = cost::add(total, cost::add(model.mdc(at, s.entry), s.sc));
        at = s.exit;
    }
    cost::add(total, model.mdc(at, depot))
}

fn load_of<M, I>(model: &M, tasks: I) -> Demand
where
    M: ServiceModel + ?Sized,
    I: IntoIterator<Item = TaskRef>,
{
    tasks.into_iter().filter_map(|t| model.service(t)).map(|s| s.dm).sum()
}

fn orientations(t: TaskRef) -> impl Iterator<Item = TaskRef> + Clone {
    core::iter::once(t).chain(t.reversed())
}

#[inline]
fn signed(after: Cost, before: Cost) -> i64 {
    if after == cost::UNREACHABLE {
        i64::MAX / 4
    } else {
        cost::delta(after, before)
    }
}

/// Keeps the candidate with the lowest delta that `admissible` accepts; the
/// first one found wins ties.
struct Best<'f> {
    found: Option<(Move, i64)>,
    admissible: &'f mut dyn FnMut(&Move, i64) -> bool,
}

impl Best<'_> {
    #[inline]
    fn offer(&mut self, mv: Move, delta: i64) {
        if self.found.as_ref().is_some_and(|&(_, d)| d <= delta) {
            return;
        }
        if (self.admissible)(&mv, delta) {
            self.found = Some((mv, delta));
        }
    }
}

/// Scans the full neighbourhood and returns the best admissible move.
pub(crate) fn best_move<M: ServiceModel + ?Sized>(
    plan: &Plan,
    model: &M,
    meter: &mut Meter<'_>,
    admissible: &mut dyn FnMut(&Move, i64) -> bool,
) -> Option<(Move, i64)> {
    let mut best = Best { found: None, admissible };
    relocations(plan, model, meter, &mut best);
    swaps(plan, model, meter, &mut best);
    reversals(plan, model, meter, &mut best);
    exchanges(plan, model, meter, &mut best);
    best.found
}

fn relocations<M: ServiceModel + ?Sized>(plan: &Plan, model: &M, meter: &mut Meter<'_>, best: &mut Best<'_>) {
    let q = model.capacity();
    let n_routes = plan.routes.len();
    let mut reduced = Vec::new();
    for from in 0..n_routes {
        let route = &plan.routes[from];
        for len in 1..=2usize {
            if route.len() < len {
                continue;
            }
            for pos in 0..=route.len() - len {
                let orig = &route[pos..pos + len];
                let seg_dm = load_of(model, orig.iter().copied());
                reduced.clear();
                reduced.extend_from_slice(&route[..pos]);
                reduced.extend_from_slice(&route[pos + len..]);
                let reduced_cost = cost_of(model, reduced.iter().copied());
                let removal = signed(reduced_cost, plan.costs[from]);
                let mut options: Vec<[TaskRef; 2]> = Vec::with_capacity(4);
                if len == 1 {
                    options.extend(orientations(orig[0]).map(|a| [a, a]));
                } else {
                    for a in orientations(orig[0]) {
                        options.extend(orientations(orig[1]).map(|b| [a, b]));
                    }
                }
                for to in 0..=n_routes {
                    if to == n_routes {
                        if reduced.is_empty() {
                            continue;
                        }
                        for seg in &options {
                            let c = cost_of(model, seg[..len].iter().copied());
                            meter.count(1);
                            best.offer(
                                Move::Relocate { from, pos, len, to, at: 0, seg: *seg },
                                removal.saturating_add(signed(c, 0)),
                            );
                        }
                    } else if to == from {
                        for at in 0..=reduced.len() {
                            for seg in &options {
                                if at == pos && seg[..len] == *orig {
                                    continue;
                                }
                                let c = cost_of(
                                    model,
                                    reduced[..at].iter().chain(&seg[..len]).chain(&reduced[at..]).copied(),
                                );
                                meter.count(1);
                                best.offer(
                                    Move::Relocate { from, pos, len, to, at, seg: *seg },
                                    signed(c, plan.costs[from]),
                                );
                            }
                        }
                    } else {
                        if plan.loads[to] + seg_dm > q {
                            continue;
                        }
                        let target = &plan.routes[to];
                        for at in 0..=target.len() {
                            for seg in &options {
                                let c = cost_of(
                                    model,
                                    target[..at].iter().chain(&seg[..len]).chain(&target[at..]).copied(),
                                );
                                meter.count(1);
                                best.offer(
                                    Move::Relocate { from, pos, len, to, at, seg: *seg },
                                    removal.saturating_add(signed(c, plan.costs[to])),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}

fn replaced(route: &[TaskRef], p: usize, t: TaskRef) -> impl Iterator<Item = TaskRef> + '_ {
    route.iter().enumerate().map(move |(i, &x)| if i == p { t } else { x })
}

fn swaps<M: ServiceModel + ?Sized>(plan: &Plan, model: &M, meter: &mut Meter<'_>, best: &mut Best<'_>) {
    let q = model.capacity();
    let n_routes = plan.routes.len();
    for r1 in 0..n_routes {
        for p1 in 0..plan.routes[r1].len() {
            let x = plan.routes[r1][p1];
            let dx = model.service(x).map_or(0, |s| s.dm);
            for r2 in r1..n_routes {
                let start = if r2 == r1 { p1 + 1 } else { 0 };
                for p2 in start..plan.routes[r2].len() {
                    let y = plan.routes[r2][p2];
                    let dy = model.service(y).map_or(0, |s| s.dm);
                    if r1 == r2 {
                        let route = &plan.routes[r1];
                        for oy in orientations(y) {
                            for ox in orientations(x) {
                                let c = cost_of(
                                    model,
                                    route.iter().enumerate().map(|(i, &t)| {
                                        if i == p1 {
                                            oy
                                        } else if i == p2 {
                                            ox
                                        } else {
                                            t
                                        }
                                    }),
                                );
                                meter.count(1);
                                best.offer(
                                    Move::Swap { r1, p1, t1: oy, r2, p2, t2: ox },
                                    signed(c, plan.costs[r1]),
                                );
                            }
                        }
                        continue;
                    }
                    if plan.loads[r1] - dx + dy > q || plan.loads[r2] - dy + dx > q {
                        continue;
                    }
                    let pick = |route: &[TaskRef], p: usize, t: TaskRef, meter: &mut Meter<'_>| {
                        orientations(t)
                            .map(|o| {
                                meter.count(1);
                                (o, cost_of(model, replaced(route, p, o)))
                            })
                            .min_by_key(|&(_, c)| c)
                            .expect("at least one orientation")
                    };
                    let (oy, c1) = pick(&plan.routes[r1], p1, y, meter);
                    let (ox, c2) = pick(&plan.routes[r2], p2, x, meter);
                    best.offer(
                        Move::Swap { r1, p1, t1: oy, r2, p2, t2: ox },
                        signed(c1, plan.costs[r1]).saturating_add(signed(c2, plan.costs[r2])),
                    );
                }
            }
        }
    }
}

fn reversals<M: ServiceModel + ?Sized>(plan: &Plan, model: &M, meter: &mut Meter<'_>, best: &mut Best<'_>) {
    for (r, route) in plan.routes.iter().enumerate() {
        for i in 0..route.len() {
            if route[i].is_virtual() {
                continue;
            }
            for j in i + 1..route.len() {
                if route[j].is_virtual() {
                    break;
                }
                let seg = route[i..=j].iter().rev().map(|t| t.reversed().expect("real task"));
                let c = cost_of(model, route[..i].iter().copied().chain(seg).chain(route[j + 1..].iter().copied()));
                meter.count(1);
                best.offer(Move::Reverse { route: r, i, j }, signed(c, plan.costs[r]));
            }
        }
    }
}

fn exchanges<M: ServiceModel + ?Sized>(plan: &Plan, model: &M, meter: &mut Meter<'_>, best: &mut Best<'_>) {
    let q = model.capacity();
    let prefix = |r: &[TaskRef]| {
        let mut acc = Vec::with_capacity(r.len() + 1);
        acc.push(0);
        for &t in r {
            let last = *acc.last().unwrap();
            acc.push(last + model.service(t).map_or(0, |s| s.dm));
        }
        acc
    };
    let prefixes: Vec<Vec<Demand>> = plan.routes.iter().map(|r| prefix(r)).collect();
    for r1 in 0..plan.routes.len() {
        for r2 in r1 + 1..plan.routes.len() {
            let (a, b) = (&plan.routes[r1], &plan.routes[r2]);
            let (pa, pb) = (&prefixes[r1], &prefixes[r2]);
            for c1 in 0..=a.len() {
                for c2 in 0..=b.len() {
                    if (c1 == 0 && c2 == 0) || (c1 == a.len() && c2 == b.len()) {
                        continue;
                    }
                    let load1 = pa[c1] + (pb[b.len()] - pb[c2]);
                    let load2 = pb[c2] + (pa[a.len()] - pa[c1]);
                    if load1 > q || load2 > q {
                        continue;
                    }
                    let n1 = cost_of(model, a[..c1].iter().chain(&b[c2..]).copied());
                    let n2 = cost_of(model, b[..c2].iter().chain(&a[c1..]).copied());
                    meter.count(1);
                    best.offer(
                        Move::Exchange { r1, c1, r2, c2 },
                        signed(n1, plan.costs[r1]).saturating_add(signed(n2, plan.costs[r2])),
                    );
                }
            }
        }
    }
}
