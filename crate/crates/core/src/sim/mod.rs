//! Service simulation: run a schedule at unit speed, freeze it at a random
//! instant, apply traffic and demand events, and emit the next instance.

mod events;
mod execute;

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::{Cost, Demand};
use crate::error::{Error, Result};
use crate::instance::DcarpInstance;
use crate::network::{ArcId, EdgeId, VertexId};
use crate::solution::Solution;

pub use events::apply_events;
pub use execute::{execute_until, makespan, sample_stop_time};

/// Draws allowed when a capacity band constrains the stop time.
pub const MAX_BAND_DRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServiceMode {
    /// Vehicles pick load up; a breakdown leaves its load on the halt edge.
    Collection,
    /// Vehicles drop load off; a breakdown adds no demand.
    Delivery,
}

/// Accept a stop time only if every halted vehicle's remaining capacity lies
/// in `[min_frac * Q, max_frac * Q]` and at least one vehicle halted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBand {
    pub min_frac: f64,
    pub max_frac: f64,
}

impl CapacityBand {
    pub fn contains(&self, remaining: Demand, capacity: Demand) -> bool {
        let r = remaining as f64;
        let q = capacity as f64;
        r >= self.min_frac * q - 1e-9 && r <= self.max_frac * q + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventConfig {
    /// Chance that an edge's traffic state changes at all.
    pub p_event: f64,
    /// Normal edge: closure (otherwise congestion).
    pub p_road: f64,
    /// Closed edge: reopening.
    pub p_bdrr: f64,
    /// Congested edge: full recovery.
    pub p_crr: f64,
    /// Congested edge that did not recover: worsening (otherwise easing).
    pub p_crbb: f64,
    /// Task: demand increase.
    pub p_icd: f64,
    /// Non-task edge: new demand.
    pub p_add: f64,
    pub n_break: usize,
    pub mode: ServiceMode,
    /// Cost change as a fraction of the edge's base deadheading cost.
    pub congestion_frac: (f64, f64),
    /// Demand change as a fraction of vehicle capacity.
    pub demand_frac: (f64, f64),
    pub seed: u64,
    pub band: Option<CapacityBand>,
}

impl Default for EventConfig {
    fn default() -> Self {
        EventConfig {
            p_event: 0.5,
            p_road: 0.1,
            p_bdrr: 0.5,
            p_crr: 0.3,
            p_crbb: 0.6,
            p_icd: 0.35,
            p_add: 0.35,
            n_break: 0,
            mode: ServiceMode::Collection,
            congestion_frac: (0.1, 1.0),
            demand_frac: (0.1, 0.5),
            seed: 0,
            band: None,
        }
    }
}

impl EventConfig {
    /// No traffic or demand events; the step only removes served tasks.
    pub fn quiet() -> Self {
        EventConfig { p_event: 0.0, p_road: 0.0, p_bdrr: 0.0, p_crr: 0.0, p_crbb: 0.0, p_icd: 0.0, p_add: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [self.p_event, self.p_road, self.p_bdrr, self.p_crr, self.p_crbb, self.p_icd, self.p_add];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidConfig("event probabilities must lie in [0, 1]".into()));
        }
        for (name, (lo, hi)) in [("congestion", self.congestion_frac), ("demand", self.demand_frac)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidConfig(alloc::format!("{name} fraction bounds must satisfy 0 < lo <= hi")));
            }
        }
        if let Some(b) = self.band {
            if !(0.0 <= b.min_frac && b.min_frac <= b.max_frac && b.max_frac <= 1.0) {
                return Err(Error::InvalidConfig("capacity band must satisfy 0 <= min <= max <= 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VehicleStatus {
    /// Finished its route and is back at the depot.
    Returned,
    /// Stopped on the road; becomes an outside vehicle.
    Halted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VehicleState {
    /// Index of the executed route in the solution.
    pub route: usize,
    pub dispatched_at: Cost,
    pub status: VehicleStatus,
    pub position: VertexId,
    /// The arc traversed last, if any.
    pub last_arc: Option<ArcId>,
    pub capacity: Demand,
    pub served_demand: Demand,
    pub remaining: Demand,
    /// Time spent driving or serving up to the halt.
    pub elapsed: Cost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionState {
    /// One entry per dispatched route, in route order.
    pub vehicles: Vec<VehicleState>,
    /// Edges whose service has started, ascending.
    pub served: Vec<EdgeId>,
    pub stop_time: f64,
    pub makespan: Cost,
    /// Depot routes not yet dispatched at the stop time.
    pub queued: Vec<usize>,
}

impl ExecutionState {
    pub fn halted(&self) -> impl Iterator<Item = &VehicleState> {
        self.vehicles.iter().filter(|v| v.status == VehicleStatus::Halted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// Event 1: a halted vehicle breaks down; `added` demand appears on its
    /// halt edge in collection mode.
    Breakdown { vehicle: usize, added: Demand },
    /// Event 2.
    Closure,
    /// Event 3: congestion raises the cost by `delta`.
    Congestion { delta: Cost },
    /// Event 4: a closed road reopens.
    Reopening,
    /// Event 5: full recovery from congestion.
    Recovery,
    /// Event 6.
    Worsening { delta: Cost },
    /// Event 7: `delta` is the applied reduction, after flooring.
    Easing { delta: Cost },
    /// Event 8.
    DemandIncrease { delta: Demand },
    /// Event 9.
    NewTask { demand: Demand },
}

impl EventKind {
    /// Event number 1 to 9.
    pub fn number(&self) -> u8 {
        match self {
            EventKind::Breakdown { .. } => 1,
            EventKind::Closure => 2,
            EventKind::Congestion { .. } => 3,
            EventKind::Reopening => 4,
            EventKind::Recovery => 5,
            EventKind::Worsening { .. } => 6,
            EventKind::Easing { .. } => 7,
            EventKind::DemandIncrease { .. } => 8,
            EventKind::NewTask { .. } => 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventRecord {
    /// Affected edge; `None` only for a breakdown without a halt edge.
    pub edge: Option<EdgeId>,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub instance: DcarpInstance,
    pub state: ExecutionState,
    pub events: Vec<EventRecord>,
    /// Stop times rejected by the capacity band before one was accepted.
    pub rejected_draws: usize,
}

/// The random stream used for the step from instance `index`.
pub fn step_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Executes `best` on `instance` until a random instant and applies events.
/// Deterministic for a given config seed and instance index.
pub fn step_scenario(instance: &DcarpInstance, best: &Solution, config: &EventConfig) -> Result<StepOutcome> {
    config.validate()?;
    if instance.task_count() == 0 {
        return Err(Error::ScenarioComplete);
    }
    let mut rng = step_rng(config.seed, instance.index());
    let span = makespan(best, instance)?;
    let q = instance.network().capacity();
    let mut rejected = 0;
    let state = loop {
        let t = sample_stop_time(span, &mut rng)?;
        let state = execute_until(best, instance, t)?;
        let accepted = match config.band {
            None => true,
            Some(band) => {
                let mut halted = state.halted().peekable();
                halted.peek().is_some() && halted.all(|v| band.contains(v.remaining, q))
            }
        };
        if accepted {
            break state;
        }
        rejected += 1;
        if rejected >= MAX_BAND_DRAWS {
            return Err(Error::BandUnsatisfied(rejected));
        }
    };
    let (next, events) = apply_events(&state, instance, config, &mut rng)?;
    Ok(StepOutcome { instance: next, state, events, rejected_draws: rejected })
}
