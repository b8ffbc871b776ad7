//! Dynamic capacitated arc routing (DCARP).
//!
//! The crate models road networks whose arc costs and demands change while a
//! schedule is being executed, turns a frozen problem state into an ordinary
//! static CARP instance through virtual tasks, solves that instance with
//! classic meta-heuristics and simulates vehicle service to produce the next
//! problem state.
//!
//! Everything here is `no_std` (with `alloc`). Clocks, files and the command
//! line live in the `dcarp` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cost;
pub mod error;
pub mod framework;
pub mod instance;
pub mod network;
pub mod paths;
pub mod scanning;
pub mod sim;
pub mod solution;
pub mod solver;
pub mod split;
pub mod strategy;
pub mod virtual_task;

pub use cost::{Cost, Demand, UNREACHABLE};
pub use error::Error;
pub use framework::{gofvt_solve, SolverKind, Strategy, StrategyOutcome};
pub use instance::{DcarpInstance, OutsideVehicle, Service, ServiceModel, TaskKey, TaskRef};
pub use network::{ArcId, ArcView, Edge, EdgeId, RoadNetwork, TrafficState, VertexId};
pub use paths::{refresh_costs, shortest_deadhead_matrix, CostMatrix};
pub use scanning::{path_scanning, ScanRule};
pub use sim::{
    apply_events, execute_until, sample_stop_time, step_scenario, CapacityBand, EventConfig,
    EventKind, EventRecord, ExecutionState, ServiceMode, StepOutcome, VehicleState, VehicleStatus,
};
pub use solution::{check_feasibility, route_cost, total_cost, Route, Solution, Violation};
pub use solver::{
    descent_solve, local_search, memetic_solve, Clock, NoClock, SolveOutcome, SolverBudget,
};
pub use split::{flatten, ulusoy_split, TaskSequence};
pub use strategy::{restart_init, return_first, sequence_transfer, ReturnFirstOutcome};
pub use virtual_task::{
    adjusted_cost, build_static_view, normalize_virtual_routes, to_executable, StaticView,
    VirtualTask,
};
