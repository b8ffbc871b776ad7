//! The dcarp-text instance format.
//!
//! ```text
//! NAME : small
//! VERTICES : 4
//! DEPOT : 1
//! VEHICLES : 2
//! CAPACITY : 10
//! INSTANCE_INDEX : 0
//! EDGES_REQUIRED : 2
//! EDGES_NONREQUIRED : 3
//! LIST_REQ :
//! 2 3 3 3 4
//! 3 4 1 4 3
//! LIST_NONREQ :
//! 1 2 2
//! 1 3 6
//! 1 4 4
//! OUTSIDE_VEHICLES : 1
//! LIST_OV :
//! 3 6 1
//! ARC_STATES :
//! 1 3 closed inf
//! END
//! ```
//!
//! Vertices and route numbers are 1-based. Required edges list
//! `u v dc dm [sc]`, others `u v dc [sc]`; `sc` defaults to `dc`. Costs are
//! base (uncongested) values; `ARC_STATES` lists edges that are currently
//! closed or congested, with their current deadheading cost. Outside vehicles
//! list `stop remaining [route]`.

use std::fmt::Write as _;

use dcarp_core::{DcarpInstance, Edge, OutsideVehicle, RoadNetwork, TrafficState};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header `{0}`")]
    MissingHeader(&'static str),
    #[error(transparent)]
    Model(#[from] dcarp_core::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedInstance {
    pub name: String,
    pub instance: DcarpInstance,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    Required,
    NonRequired,
    Outside,
    States,
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, FormatError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

fn vertex(tok: Option<&str>, line: usize, n: usize) -> Result<usize, FormatError> {
    let v: usize = number(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(syntax(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

pub fn parse_instance(text: &str) -> Result<NamedInstance, FormatError> {
    let mut name = String::new();
    let (mut vertices, mut depot, mut vehicles, mut capacity) = (None, None, None, None);
    let mut index = 0usize;
    let mut edges: Vec<Edge> = Vec::new();
    let mut outside = Vec::new();
    let mut states: Vec<(usize, usize, TrafficState, Option<u64>, usize)> = Vec::new();
    let mut section = Section::Header;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((key, value)) = content.split_once(':') {
            let key = key.trim();
            let value = value.trim();
            let header_num = |v: &str| -> Result<usize, FormatError> { number(Some(v), line, key) };
            match key {
                "NAME" => name = value.to_string(),
                "VERTICES" => vertices = Some(header_num(value)?),
                "DEPOT" => depot = Some(header_num(value)?),
                "VEHICLES" => vehicles = Some(header_num(value)?),
                "CAPACITY" => capacity = Some(number::<u64>(Some(value), line, key)?),
                "INSTANCE_INDEX" => index = header_num(value)?,
                "EDGES_REQUIRED" | "EDGES_NONREQUIRED" | "OUTSIDE_VEHICLES" => {
                    header_num(value)?;
                }
                "LIST_REQ" => section = Section::Required,
                "LIST_NONREQ" => section = Section::NonRequired,
                "LIST_OV" => section = Section::Outside,
                "ARC_STATES" => section = Section::States,
                _ => return Err(syntax(line, format!("unknown header `{key}`"))),
            }
            continue;
        }
        if content == "END" {
            break;
        }
        let n = vertices.ok_or(FormatError::MissingHeader("VERTICES"))?;
        let mut toks = content.split_whitespace();
        match section {
            Section::Header => return Err(syntax(line, "data line outside a list section")),
            Section::Required | Section::NonRequired => {
                let u = vertex(toks.next(), line, n)?;
                let v = vertex(toks.next(), line, n)?;
                let dc: u64 = number(toks.next(), line, "dc")?;
                let dm: u64 = if section == Section::Required { number(toks.next(), line, "dm")? } else { 0 };
                let sc: u64 = match toks.next() {
                    Some(t) => number(Some(t), line, "sc")?,
                    None => dc,
                };
                if section == Section::Required && dm == 0 {
                    return Err(syntax(line, "required edge with zero demand"));
                }
                edges.push(Edge::new(u, v, dc, sc, dm));
            }
            Section::Outside => {
                let stop = vertex(toks.next(), line, n)?;
                let remaining: u64 = number(toks.next(), line, "remaining capacity")?;
                let source_route = match toks.next() {
                    Some(t) => {
                        let r: usize = number(Some(t), line, "route")?;
                        if r == 0 {
                            return Err(syntax(line, "route numbers start at 1"));
                        }
                        Some(r - 1)
                    }
                    None => None,
                };
                outside.push(OutsideVehicle { stop, remaining, source_route });
            }
            Section::States => {
                let u = vertex(toks.next(), line, n)?;
                let v = vertex(toks.next(), line, n)?;
                let state = match toks.next() {
                    Some("normal") => TrafficState::Normal,
                    Some("closed") => TrafficState::Closed,
                    Some("congested") => TrafficState::Congested,
                    other => return Err(syntax(line, format!("bad arc state {other:?}"))),
                };
                let dc = match toks.next() {
                    Some("inf") => None,
                    t => Some(number::<u64>(t, line, "current dc")?),
                };
                states.push((u, v, state, dc, line));
            }
        }
        if toks.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
    }
    let n = vertices.ok_or(FormatError::MissingHeader("VERTICES"))?;
    let depot = depot.ok_or(FormatError::MissingHeader("DEPOT"))?;
    if depot == 0 || depot > n {
        return Err(FormatError::Syntax { line: 0, message: format!("depot {depot} outside 1..={n}") });
    }
    let mut net = RoadNetwork::new(
        n,
        depot - 1,
        vehicles.ok_or(FormatError::MissingHeader("VEHICLES"))?,
        capacity.ok_or(FormatError::MissingHeader("CAPACITY"))?,
        edges,
    )?;
    for (u, v, state, dc, line) in states {
        let e = net.edge_between(u, v).ok_or_else(|| syntax(line, "state for an unknown edge"))?;
        let edge = net.edge_mut(e);
        match (state, dc) {
            (TrafficState::Normal, _) => edge.restore(),
            (TrafficState::Closed, _) => edge.close(),
            (TrafficState::Congested, Some(dc)) if dc > edge.base_dc() => edge.set_congested(dc),
            (TrafficState::Congested, _) => {
                return Err(syntax(line, "congested cost must exceed the base cost"));
            }
        }
    }
    let instance = DcarpInstance::new(net, outside, index)?;
    Ok(NamedInstance { name, instance })
}

pub fn write_instance(name: &str, instance: &DcarpInstance) -> String {
    let net = instance.network();
    let mut out = String::new();
    let required: Vec<&Edge> = net.edges().iter().filter(|e| e.is_task()).collect();
    let other: Vec<&Edge> = net.edges().iter().filter(|e| !e.is_task()).collect();
    let _ = writeln!(out, "NAME : {name}");
    let _ = writeln!(out, "VERTICES : {}", net.vertex_count());
    let _ = writeln!(out, "DEPOT : {}", net.depot() + 1);
    let _ = writeln!(out, "VEHICLES : {}", net.vehicles());
    let _ = writeln!(out, "CAPACITY : {}", net.capacity());
    let _ = writeln!(out, "INSTANCE_INDEX : {}", instance.index());
    let _ = writeln!(out, "EDGES_REQUIRED : {}", required.len());
    let _ = writeln!(out, "EDGES_NONREQUIRED : {}", other.len());
    let sc_suffix = |e: &Edge| if e.base_sc() == e.base_dc() { String::new() } else { format!(" {}", e.base_sc()) };
    let _ = writeln!(out, "LIST_REQ :");
    for e in &required {
        let (a, b) = e.endpoints();
        let _ = writeln!(out, "{} {} {} {}{}", a + 1, b + 1, e.base_dc(), e.dm(), sc_suffix(e));
    }
    let _ = writeln!(out, "LIST_NONREQ :");
    for e in &other {
        let (a, b) = e.endpoints();
        let _ = writeln!(out, "{} {} {}{}", a + 1, b + 1, e.base_dc(), sc_suffix(e));
    }
    if !instance.outside().is_empty() {
        let _ = writeln!(out, "OUTSIDE_VEHICLES : {}", instance.outside().len());
        let _ = writeln!(out, "LIST_OV :");
        for ov in instance.outside() {
            match ov.source_route {
                Some(r) => {
                    let _ = writeln!(out, "{} {} {}", ov.stop + 1, ov.remaining, r + 1);
                }
                None => {
                    let _ = writeln!(out, "{} {}", ov.stop + 1, ov.remaining);
                }
            }
        }
    }
    let changed: Vec<&Edge> = net.edges().iter().filter(|e| e.state() != TrafficState::Normal).collect();
    if !changed.is_empty() {
        let _ = writeln!(out, "ARC_STATES :");
        for e in changed {
            let (a, b) = e.endpoints();
            let dc = e.dc().map_or_else(|| "inf".to_string(), |d| d.to_string());
            let _ = writeln!(out, "{} {} {} {}", a + 1, b + 1, e.state().as_str(), dc);
        }
    }
    out.push_str("END\n");
    out
}
