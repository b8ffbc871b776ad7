//! Scenario configuration, read from TOML.
//!
//! ```toml
//! scenario_id = "demo"
//! instance = "maps/small.dcarp"    # relative to this file
//! scenario_length = 5
//! runs = 3
//! seed = 42
//! output_csv = "log.csv"
//! baseline = "restart"
//!
//! [budget]
//! small_secs = 5.0
//! large_secs = 15.0
//! large_threshold = 100
//!
//! [[arm]]
//! name = "restart"
//! strategy = "restart"
//! solver = "descent"
//!
//! [events]
//! n_break = 1
//! band = "high"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use dcarp_core::{CapacityBand, EventConfig, ServiceMode, SolverBudget, SolverKind, Strategy};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_id")]
    pub scenario_id: String,
    pub instance: PathBuf,
    /// Number of instances in the chain.
    #[serde(default = "default_length")]
    pub scenario_length: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    pub output_csv: Option<PathBuf>,
    /// Writes every instance and chain solution here when set.
    pub output_dir: Option<PathBuf>,
    pub baseline: Option<String>,
    /// Worker threads for the runs of one instance.
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(rename = "arm", default = "default_arms")]
    pub arms: Vec<ArmConfig>,
    #[serde(default)]
    pub events: EventsConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub small_secs: f64,
    pub large_secs: f64,
    /// Instances with more tasks than this get `large_secs`.
    pub large_threshold: usize,
    /// Caps evaluations per run; with a cap the log is reproducible.
    pub max_evaluations: Option<u64>,
    pub population: usize,
    pub local_search_prob: f64,
    pub tournament: usize,
    pub tabu_tenure: usize,
    pub stagnation: usize,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        let d = SolverBudget::new(60.0, 0);
        BudgetConfig {
            small_secs: 60.0,
            large_secs: 180.0,
            large_threshold: 100,
            max_evaluations: None,
            population: d.population,
            local_search_prob: d.local_search_prob,
            tournament: d.tournament,
            tabu_tenure: d.tabu_tenure,
            stagnation: d.stagnation,
        }
    }
}

impl BudgetConfig {
    pub fn for_instance(&self, task_count: usize, seed: u64) -> SolverBudget {
        let secs = if task_count > self.large_threshold { self.large_secs } else { self.small_secs };
        SolverBudget {
            time_limit_secs: secs,
            max_evaluations: self.max_evaluations,
            seed,
            population: self.population,
            local_search_prob: self.local_search_prob,
            tournament: self.tournament,
            tabu_tenure: self.tabu_tenure,
            stagnation: self.stagnation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    pub name: String,
    #[serde(with = "parsed")]
    pub strategy: Strategy,
    #[serde(with = "parsed")]
    pub solver: SolverKind,
}

mod parsed {
    use serde::{de::Error, Deserialize, Deserializer};
    use std::str::FromStr;

    pub fn deserialize<'de, D, T>(d: D) -> Result<T, D::Error>
    where
        D: Deserializer<'de>,
        T: FromStr,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("unknown value `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Any,
    Low,
    Mid,
    High,
}

impl Band {
    pub fn capacity_band(self) -> Option<CapacityBand> {
        match self {
            Band::Any => None,
            Band::Low => Some(CapacityBand { min_frac: 0.0, max_frac: 0.33 }),
            Band::Mid => Some(CapacityBand { min_frac: 0.34, max_frac: 0.66 }),
            Band::High => Some(CapacityBand { min_frac: 0.67, max_frac: 1.0 }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Collection,
    Delivery,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EventsConfig {
    pub p_event: f64,
    pub p_road: f64,
    pub p_bdrr: f64,
    pub p_crr: f64,
    pub p_crbb: f64,
    pub p_icd: f64,
    pub p_add: f64,
    pub n_break: usize,
    pub mode: Mode,
    pub congestion_frac: [f64; 2],
    pub demand_frac: [f64; 2],
    pub band: Band,
}

impl Default for EventsConfig {
    fn default() -> Self {
        let d = EventConfig::default();
        EventsConfig {
            p_event: d.p_event,
            p_road: d.p_road,
            p_bdrr: d.p_bdrr,
            p_crr: d.p_crr,
            p_crbb: d.p_crbb,
            p_icd: d.p_icd,
            p_add: d.p_add,
            n_break: d.n_break,
            mode: Mode::Collection,
            congestion_frac: [d.congestion_frac.0, d.congestion_frac.1],
            demand_frac: [d.demand_frac.0, d.demand_frac.1],
            band: Band::Any,
        }
    }
}

impl EventsConfig {
    pub fn to_event_config(&self, seed: u64) -> EventConfig {
        EventConfig {
            p_event: self.p_event,
            p_road: self.p_road,
            p_bdrr: self.p_bdrr,
            p_crr: self.p_crr,
            p_crbb: self.p_crbb,
            p_icd: self.p_icd,
            p_add: self.p_add,
            n_break: self.n_break,
            mode: match self.mode {
                Mode::Collection => ServiceMode::Collection,
                Mode::Delivery => ServiceMode::Delivery,
            },
            congestion_frac: (self.congestion_frac[0], self.congestion_frac[1]),
            demand_frac: (self.demand_frac[0], self.demand_frac[1]),
            seed,
            band: self.band.capacity_band(),
        }
    }
}

fn default_id() -> String {
    "scenario".into()
}

fn default_length() -> usize {
    5
}

fn default_runs() -> usize {
    1
}

fn default_threads() -> usize {
    1
}

fn default_arms() -> Vec<ArmConfig> {
    [(Strategy::Restart, "restart"), (Strategy::Transfer, "transfer")]
        .into_iter()
        .map(|(strategy, name)| ArmConfig { name: name.into(), strategy, solver: SolverKind::Memetic })
        .collect()
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let config: ScenarioConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config = Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut config.instance);
        if let Some(p) = config.output_csv.as_mut() {
            rebase(p);
        }
        if let Some(p) = config.output_dir.as_mut() {
            rebase(p);
        }
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.scenario_length == 0 || self.runs == 0 {
            bail!("scenario_length and runs must be at least 1");
        }
        let b = &self.budget;
        if !(b.small_secs > 0.0 && b.large_secs > 0.0) {
            bail!("time budgets must be positive");
        }
        b.for_instance(0, 0).validate()?;
        if self.arms.is_empty() {
            bail!("at least one arm is required");
        }
        for (i, a) in self.arms.iter().enumerate() {
            if self.arms[..i].iter().any(|b| b.name == a.name) {
                bail!("duplicate arm name `{}`", a.name);
            }
            if a.name.contains(',') || a.name.contains('"') {
                bail!("arm name `{}` may not contain commas or quotes", a.name);
            }
        }
        if let Some(base) = &self.baseline {
            if !self.arms.iter().any(|a| &a.name == base) {
                bail!("baseline `{base}` is not an arm");
            }
        }
        self.events.to_event_config(0).validate()?;
        Ok(())
    }
}
