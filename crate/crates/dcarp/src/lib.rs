//! File formats, scenario harness and reporting on top of `dcarp-core`.

pub mod clock;
pub mod config;
pub mod egl;
pub mod format;
pub mod report;
pub mod scenario;
pub mod solution_text;

use std::path::Path;

use anyhow::Context;

pub use clock::WallClock;
pub use config::ScenarioConfig;
pub use format::{parse_instance, write_instance, FormatError, NamedInstance};
pub use scenario::{run_scenario, LogRow, ScenarioOutcome};

/// Reads either instance layout, told apart by its list keywords.
pub fn parse_any(text: &str) -> Result<NamedInstance, FormatError> {
    if text.lines().any(|l| l.trim_start().starts_with("LIST_REQ")) {
        parse_instance(text)
    } else {
        egl::parse_egl(text)
    }
}

pub fn load_instance(path: &Path) -> anyhow::Result<NamedInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_any(&text).with_context(|| format!("parsing {}", path.display()))
}
