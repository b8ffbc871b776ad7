use alloc::vec::Vec;

use rand::Rng;

use crate::cost::{Cost, Demand};
use crate::error::Result;
use crate::instance::{DcarpInstance, OutsideVehicle};
use crate::network::{EdgeId, RoadNetwork, TrafficState};
use crate::paths::refresh_costs;

use super::{EventConfig, EventKind, EventRecord, ExecutionState, ServiceMode};

/// Closure draws per edge before the edge is left unchanged.
const CLOSURE_RETRIES: usize = 3;

/// Builds the next instance from a frozen execution.
///
/// Served tasks lose their demand, then breakdowns, traffic changes and
/// demand changes are drawn in that order, edge by edge in ascending id.
/// Closing an edge that would cut any vertex off from the depot is redrawn.
pub fn apply_events<R: Rng + ?Sized>(
    state: &ExecutionState,
    instance: &DcarpInstance,
    config: &EventConfig,
    rng: &mut R,
) -> Result<(DcarpInstance, Vec<EventRecord>)> {
    config.validate()?;
    let mut net = instance.network().clone();
    let q = net.capacity();
    let mut log = Vec::new();
    for &e in &state.served {
        net.edge_mut(e).set_demand(0);
    }

    let halted: Vec<_> = state.halted().collect();
    let n = config.n_break.min(halted.len());
    let mut broken = rand::seq::index::sample(rng, halted.len(), n).into_vec();
    broken.sort_unstable();
    for &i in &broken {
        let v = halted[i];
        let edge = v.last_arc.map(RoadNetwork::edge_of);
        let mut added = 0;
        if let (ServiceMode::Collection, Some(e)) = (config.mode, edge) {
            let dm = net.edge(e).dm();
            let next = (dm + (q - v.remaining)).min(q);
            added = next - dm;
            net.edge_mut(e).set_demand(next);
        }
        log.push(EventRecord { edge, kind: EventKind::Breakdown { vehicle: v.route, added } });
    }
    let outside: Vec<OutsideVehicle> = halted
        .iter()
        .enumerate()
        .filter(|(i, _)| broken.binary_search(i).is_err())
        .map(|(_, v)| OutsideVehicle { stop: v.position, remaining: v.remaining, source_route: Some(v.route) })
        .collect();

    let depot = net.depot();
    for e in 0..net.edge_count() {
        if !rng.gen_bool(config.p_event) {
            continue;
        }
        let edge = net.edge(e).clone();
        let kind = match edge.state() {
            TrafficState::Normal => {
                let mut kind = None;
                for _ in 0..=CLOSURE_RETRIES {
                    if rng.gen_bool(config.p_road) {
                        if keeps_connectivity(&net, depot, e) {
                            net.edge_mut(e).close();
                            kind = Some(EventKind::Closure);
                            break;
                        }
                    } else {
                        let c = cost_delta(edge.base_dc(), config, rng);
                        net.edge_mut(e).set_congested(edge.base_dc() + c);
                        kind = Some(EventKind::Congestion { delta: c });
                        break;
                    }
                }
                kind
            }
            TrafficState::Closed => rng.gen_bool(config.p_bdrr).then(|| {
                net.edge_mut(e).restore();
                EventKind::Reopening
            }),
            TrafficState::Congested => {
                let current = edge.raw_dc();
                if rng.gen_bool(config.p_crr) {
                    net.edge_mut(e).restore();
                    Some(EventKind::Recovery)
                } else if rng.gen_bool(config.p_crbb) {
                    let c = cost_delta(edge.base_dc(), config, rng);
                    net.edge_mut(e).set_congested(current + c);
                    Some(EventKind::Worsening { delta: c })
                } else {
                    let c = cost_delta(edge.base_dc(), config, rng);
                    let eased = current.saturating_sub(c).max(edge.base_dc());
                    net.edge_mut(e).set_congested(eased);
                    Some(EventKind::Easing { delta: current - eased })
                }
            }
        };
        if let Some(kind) = kind {
            log.push(EventRecord { edge: Some(e), kind });
        }
    }

    let reachable = net.reachable_from(depot, None);
    for e in 0..net.edge_count() {
        let dm = net.edge(e).dm();
        if dm > 0 {
            if rng.gen_bool(config.p_icd) {
                let d = demand_delta(q, config, rng);
                let next = (dm + d).min(q);
                net.edge_mut(e).set_demand(next);
                log.push(EventRecord { edge: Some(e), kind: EventKind::DemandIncrease { delta: next - dm } });
            }
        } else if rng.gen_bool(config.p_add) {
            let (a, b) = net.edge(e).endpoints();
            if reachable[a] && reachable[b] {
                let d = demand_delta(q, config, rng).min(q);
                net.edge_mut(e).set_demand(d);
                log.push(EventRecord { edge: Some(e), kind: EventKind::NewTask { demand: d } });
            }
        }
    }

    let matrix = refresh_costs(&net, instance.matrix());
    let next = DcarpInstance::with_matrix(net, matrix, outside, instance.index() + 1)?;
    Ok((next, log))
}

fn keeps_connectivity(net: &RoadNetwork, depot: usize, e: EdgeId) -> bool {
    let count = |seen: Vec<bool>| seen.into_iter().filter(|&s| s).count();
    count(net.reachable_from(depot, Some(e))) == count(net.reachable_from(depot, None))
}

fn cost_delta<R: Rng + ?Sized>(base: Cost, config: &EventConfig, rng: &mut R) -> Cost {
    let (lo, hi) = config.congestion_frac;
    let f = if lo < hi { rng.gen_range(lo..=hi) } else { lo };
    ((f * base as f64) as Cost).max(1)
}

fn demand_delta<R: Rng + ?Sized>(q: Demand, config: &EventConfig, rng: &mut R) -> Demand {
    let (lo, hi) = config.demand_frac;
    let f = if lo < hi { rng.gen_range(lo..=hi) } else { lo };
    ((f * q as f64) as Demand).max(1)
}
