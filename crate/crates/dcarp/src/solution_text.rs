//! Plain-text executable solutions, one route per line.
//!
//! ```text
//! # cost 23
//! 1: 2-3 3-4
//! 3: 4-1
//! ```
//!
//! Each line is a 1-based start vertex followed by served arcs as
//! `entry-exit`. Lines starting with `#` are comments.

use std::fmt::Write as _;

use dcarp_core::{Cost, DcarpInstance, Route, Solution, TaskRef};

use crate::format::FormatError;

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

pub fn write_solution(solution: &Solution, instance: &DcarpInstance, cost: Cost) -> String {
    let net = instance.network();
    let mut out = format!("# cost {cost}\n");
    for r in &solution.routes {
        let _ = write!(out, "{}:", r.start + 1);
        for t in &r.tasks {
            match t {
                TaskRef::Arc(a) => {
                    let arc = net.arc(*a);
                    let _ = write!(out, " {}-{}", arc.entry + 1, arc.exit + 1);
                }
                TaskRef::Virtual(k) => {
                    let _ = write!(out, " v{}", k + 1);
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Parses routes against `instance`; virtual tasks are rejected since only
/// executable solutions are written.
pub fn parse_solution(text: &str, instance: &DcarpInstance) -> Result<Solution, FormatError> {
    let net = instance.network();
    let n = net.vertex_count();
    let vertex = |s: &str, line: usize| -> Result<usize, FormatError> {
        match s.parse::<usize>() {
            Ok(v) if v >= 1 && v <= n => Ok(v - 1),
            _ => Err(syntax(line, format!("bad vertex `{s}`"))),
        }
    };
    let mut routes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (start, rest) = content.split_once(':').ok_or_else(|| syntax(line, "expected `start: arcs`"))?;
        let start = vertex(start.trim(), line)?;
        let mut tasks = Vec::new();
        for tok in rest.split_whitespace() {
            let (a, b) = tok.split_once('-').ok_or_else(|| syntax(line, format!("bad arc `{tok}`")))?;
            let (a, b) = (vertex(a, line)?, vertex(b, line)?);
            let arc = net.arc_between(a, b).ok_or_else(|| syntax(line, format!("no edge {tok}")))?;
            tasks.push(TaskRef::Arc(arc));
        }
        routes.push(Route::new(start, tasks));
    }
    Ok(Solution::new(routes))
}
