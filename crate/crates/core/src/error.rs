use alloc::string::String;

use crate::cost::Demand;
use crate::network::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("no open path from vertex {from} to vertex {to}")]
    UnreachableLeg { from: VertexId, to: VertexId },
    #[error("unknown task reference {0}")]
    UnknownTask(String),
    #[error("task demand {demand} exceeds vehicle capacity {capacity}")]
    DemandExceedsCapacity { demand: Demand, capacity: Demand },
    #[error("stop vertex {stop} of outside vehicle {vehicle} is unreachable from the depot")]
    UnreachableStop { vehicle: usize, stop: VertexId },
    #[error("virtual task of vehicle {0} is missing from the solution")]
    MissingVirtualTask(usize),
    #[error("virtual task of vehicle {0} appears more than once")]
    DuplicateVirtualTask(usize),
    #[error("solution is infeasible: {0}")]
    Infeasible(String),
    #[error("initial population is empty")]
    EmptyPopulation,
    #[error("makespan is zero; there is nothing to interrupt")]
    ZeroMakespan,
    #[error("instance has no unserved tasks; the scenario is complete")]
    ScenarioComplete,
    #[error("no stop time satisfied the remaining-capacity band after {0} draws")]
    BandUnsatisfied(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, Error>;
