//! Per (instance, arm) summaries of a scenario log.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;

use crate::scenario::LogRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Win,
    Draw,
    Lose,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario_id: String,
    pub m: usize,
    pub arm: String,
    /// Feasible runs the statistics are taken over.
    pub runs: usize,
    pub failed: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation; 0 for a single run.
    pub std: Option<f64>,
    pub min: Option<u64>,
    /// Lower mean than the baseline wins.
    pub vs_baseline: Option<Verdict>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub win: usize,
    pub draw: usize,
    pub lose: usize,
}

pub fn summarize(rows: &[LogRow], baseline: Option<&str>) -> Vec<Summary> {
    let mut cells: Vec<((String, usize, String), Vec<&LogRow>)> = Vec::new();
    for r in rows {
        let key = (r.scenario_id.clone(), r.m, r.arm.clone());
        match cells.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => cells.push((key, vec![r])),
        }
    }
    let mut out: Vec<Summary> = cells
        .into_iter()
        .map(|((scenario_id, m, arm), rs)| {
            let costs: Vec<u64> = rs.iter().filter(|r| r.feasible).filter_map(|r| r.cost).collect();
            let n = costs.len();
            let mean = (n > 0).then(|| costs.iter().map(|&c| c as f64).sum::<f64>() / n as f64);
            let std = mean.map(|mu| {
                if n < 2 {
                    0.0
                } else {
                    (costs.iter().map(|&c| (c as f64 - mu).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
                }
            });
            Summary {
                scenario_id,
                m,
                arm,
                runs: n,
                failed: rs.len() - n,
                mean,
                std,
                min: costs.iter().copied().min(),
                vs_baseline: None,
            }
        })
        .collect();
    if let Some(base) = baseline {
        let base_means: Vec<(String, usize, Option<f64>)> =
            out.iter().filter(|s| s.arm == base).map(|s| (s.scenario_id.clone(), s.m, s.mean)).collect();
        for s in &mut out {
            let b = base_means.iter().find(|(id, m, _)| *id == s.scenario_id && *m == s.m).and_then(|x| x.2);
            s.vs_baseline = match (s.mean, b) {
                (Some(a), Some(b)) if a < b => Some(Verdict::Win),
                (Some(a), Some(b)) if a > b => Some(Verdict::Lose),
                (Some(_), Some(_)) => Some(Verdict::Draw),
                _ => None,
            };
        }
    }
    out
}

/// Win/draw/lose counts per arm, in first-appearance order.
pub fn tally(summaries: &[Summary]) -> Vec<(String, Tally)> {
    let mut out: Vec<(String, Tally)> = Vec::new();
    for s in summaries {
        let Some(v) = s.vs_baseline else { continue };
        let idx = match out.iter().position(|(a, _)| *a == s.arm) {
            Some(i) => i,
            None => {
                out.push((s.arm.clone(), Tally::default()));
                out.len() - 1
            }
        };
        let t = &mut out[idx].1;
        match v {
            Verdict::Win => t.win += 1,
            Verdict::Draw => t.draw += 1,
            Verdict::Lose => t.lose += 1,
        }
    }
    out
}

pub fn write_summary_csv<W: io::Write>(summaries: &[Summary], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

pub fn render_text(summaries: &[Summary], baseline: Option<&str>) -> String {
    let header = ["scenario", "m", "arm", "runs", "failed", "mean", "std", "min", "vs base"];
    let mut table: Vec<[String; 9]> = vec![header.map(String::from)];
    for s in summaries {
        table.push([
            s.scenario_id.clone(),
            s.m.to_string(),
            s.arm.clone(),
            s.runs.to_string(),
            s.failed.to_string(),
            opt(s.mean.map(|x| format!("{x:.2}"))),
            opt(s.std.map(|x| format!("{x:.2}"))),
            opt(s.min),
            opt(s.vs_baseline.map(|v| format!("{v:?}").to_lowercase())),
        ]);
    }
    let widths: Vec<usize> = (0..9).map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| if c == 0 || c == 2 { format!("{v:<w$}", w = widths[c]) } else { format!("{v:>w$}", w = widths[c]) })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    if let Some(base) = baseline {
        let _ = writeln!(out, "\nW-D-L against {base}:");
        for (arm, t) in tally(summaries) {
            let _ = writeln!(out, "  {arm}: {}-{}-{}", t.win, t.draw, t.lose);
        }
    }
    out
}
