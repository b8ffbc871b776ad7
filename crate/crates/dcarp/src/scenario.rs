//! Scenario orchestration: solve every instance of a chain with each arm,
//! log every run, and advance the chain with the overall best solution.

use std::io;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Context;
use dcarp_core::{
    check_feasibility, gofvt_solve, step_scenario, total_cost, Clock, Cost, DcarpInstance, Error, NoClock, Solution,
    Strategy,
};
use serde::{Deserialize, Serialize};

use crate::clock::WallClock;
use crate::config::ScenarioConfig;
use crate::format::write_instance;
use crate::solution_text::{parse_solution, write_solution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub scenario_id: String,
    pub m: usize,
    pub arm: String,
    pub run: usize,
    pub seed: u64,
    /// Empty when the run failed.
    pub cost: Option<Cost>,
    pub wall_ms: u64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub arm: String,
    pub run: usize,
    pub cost: Cost,
    pub solution: Solution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    /// All `scenario_length` instances were solved.
    Length,
    /// A simulation step left no tasks.
    Complete,
    /// No run produced a feasible solution for instance `m`.
    NoFeasibleRun(usize),
    /// The simulator could not produce the next instance.
    Simulation(String),
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub rows: Vec<LogRow>,
    pub instances: Vec<DcarpInstance>,
    pub chain: Vec<ChainStep>,
    pub stop: StopReason,
}

/// Counter-based seed split (splitmix64 finalizer).
pub fn split_seed(master: u64, counter: u64) -> u64 {
    let mut z = master.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for run `run` on instance `m`. Arms share it, so they are compared
/// on common random numbers.
pub fn run_seed(master: u64, m: usize, run: usize) -> u64 {
    split_seed(master, ((m as u64) << 32) | run as u64)
}

pub fn event_seed(master: u64) -> u64 {
    split_seed(master, u64::MAX)
}

struct Job {
    arm: usize,
    run: usize,
    seed: u64,
}

struct RunResult {
    solved: Result<(Solution, Cost), String>,
    wall_ms: u64,
}

/// Writes the solution out, reads it back and re-evaluates it.
pub fn revalidate(solution: &Solution, instance: &DcarpInstance, cost: Cost) -> bool {
    let text = write_solution(solution, instance, cost);
    let Ok(back) = parse_solution(&text, instance) else {
        return false;
    };
    back == *solution && check_feasibility(&back, instance).is_empty() && total_cost(&back, instance) == Ok(cost)
}

fn run_jobs(
    config: &ScenarioConfig,
    instance: &DcarpInstance,
    m: usize,
    previous: Option<&Solution>,
    jobs: &[Job],
) -> Vec<RunResult> {
    let deterministic = config.budget.max_evaluations.is_some();
    let solve = |job: &Job| {
        let arm = &config.arms[job.arm];
        let strategy = if m == 0 { Strategy::Restart } else { arm.strategy };
        let budget = config.budget.for_instance(instance.task_count(), job.seed);
        let wall = WallClock::start();
        let clock: &dyn Clock = if deterministic { &NoClock } else { &wall };
        let solved = gofvt_solve(instance, strategy, arm.solver, previous, &budget, clock)
            .map(|o| (o.solution, o.cost))
            .map_err(|e| e.to_string());
        let wall_ms = if deterministic { 0 } else { (wall.elapsed_secs() * 1000.0).round() as u64 };
        RunResult { solved, wall_ms }
    };
    let threads = config.threads.clamp(1, jobs.len().max(1));
    if threads == 1 {
        return jobs.iter().map(solve).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunResult>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = solve(&jobs[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect()
}

pub fn run_scenario(config: &ScenarioConfig, initial: DcarpInstance) -> anyhow::Result<ScenarioOutcome> {
    config.validate()?;
    let events = config.events.to_event_config(event_seed(config.seed));
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut rows = Vec::new();
    let mut instances = vec![initial];
    let mut chain: Vec<ChainStep> = Vec::new();
    let mut stop = StopReason::Length;
    for m in 0..config.scenario_length {
        let instance = &instances[m];
        let jobs: Vec<Job> = (0..config.arms.len())
            .flat_map(|arm| (0..config.runs).map(move |run| (arm, run)))
            .map(|(arm, run)| Job { arm, run, seed: run_seed(config.seed, m, run) })
            .collect();
        let previous = chain.last().map(|c| &c.solution);
        let results = run_jobs(config, instance, m, previous, &jobs);
        let mut best: Option<ChainStep> = None;
        for (job, result) in jobs.iter().zip(results) {
            let arm = &config.arms[job.arm].name;
            let (cost, feasible) = match &result.solved {
                Ok((solution, cost)) => {
                    let ok = revalidate(solution, instance, *cost);
                    if ok && best.as_ref().is_none_or(|b| *cost < b.cost) {
                        best = Some(ChainStep { arm: arm.clone(), run: job.run, cost: *cost, solution: solution.clone() });
                    }
                    (Some(*cost), ok)
                }
                Err(_) => (None, false),
            };
            rows.push(LogRow {
                scenario_id: config.scenario_id.clone(),
                m,
                arm: arm.clone(),
                run: job.run,
                seed: job.seed,
                cost,
                wall_ms: result.wall_ms,
                feasible,
            });
        }
        let Some(best) = best else {
            stop = StopReason::NoFeasibleRun(m);
            break;
        };
        if let Some(dir) = &config.output_dir {
            dump(dir, m, instance, &best)?;
        }
        let last = m + 1 == config.scenario_length;
        let step = if last { None } else { Some(step_scenario(instance, &best.solution, &events)) };
        chain.push(best);
        match step {
            None => {}
            Some(Ok(step)) => {
                let complete = step.instance.task_count() == 0;
                instances.push(step.instance);
                if complete {
                    stop = StopReason::Complete;
                    break;
                }
            }
            Some(Err(Error::ScenarioComplete)) => {
                stop = StopReason::Complete;
                break;
            }
            Some(Err(e)) => {
                stop = StopReason::Simulation(e.to_string());
                break;
            }
        }
    }
    Ok(ScenarioOutcome { rows, instances, chain, stop })
}

fn dump(dir: &Path, m: usize, instance: &DcarpInstance, best: &ChainStep) -> anyhow::Result<()> {
    std::fs::write(dir.join(format!("instance_{m}.dcarp")), write_instance(&format!("instance-{m}"), instance))?;
    let text = format!("# arm {} run {}\n{}", best.arm, best.run, write_solution(&best.solution, instance, best.cost));
    std::fs::write(dir.join(format!("best_{m}.sol")), text)?;
    Ok(())
}

pub fn write_log<W: io::Write>(rows: &[LogRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_log<R: io::Read>(input: R) -> csv::Result<Vec<LogRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
