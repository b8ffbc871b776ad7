//! Reader for the classic CARP benchmark layout (egl, gdb, val).
//!
//! Both the original Spanish keywords and their English renderings are
//! accepted:
//!
//! ```text
//! NOMBRE : egl-e1-A
//! VERTICES : 77
//! ARISTAS_REQ : 51
//! ARISTAS_NOREQ : 47
//! VEHICULOS : 5
//! CAPACIDAD : 305
//! TIPO_COSTES_ARISTAS : EXPLICITOS
//! COSTE_TOTAL_REQ : 1468
//! LISTA_ARISTAS_REQ :
//! ( 1, 2) coste 9 demanda 5
//! LISTA_ARISTAS_NOREQ :
//! ( 1, 3) coste 12
//! DEPOSITO : 1
//! ```
//!
//! Serving cost equals deadheading cost in these files.

use dcarp_core::{DcarpInstance, Edge, RoadNetwork};

use crate::format::{FormatError, NamedInstance};

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

enum List {
    None,
    Required,
    NonRequired,
}

fn parse_edge_line(content: &str, line: usize, required: bool) -> Result<(usize, usize, u64, u64), FormatError> {
    let open = content.find('(').ok_or_else(|| syntax(line, "expected `( u, v)`"))?;
    let close = content.find(')').ok_or_else(|| syntax(line, "unclosed edge tuple"))?;
    let (u, v) = content[open + 1..close].split_once(',').ok_or_else(|| syntax(line, "expected `u, v`"))?;
    let vertex = |s: &str| -> Result<usize, FormatError> {
        s.trim().parse().map_err(|_| syntax(line, format!("bad vertex `{}`", s.trim())))
    };
    let (u, v) = (vertex(u)?, vertex(v)?);
    let mut cost = None;
    let mut demand = None;
    let mut toks = content[close + 1..].split_whitespace();
    while let Some(key) = toks.next() {
        let value: u64 = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| syntax(line, format!("`{key}` needs a number")))?;
        match key.to_ascii_lowercase().as_str() {
            "coste" | "cost" => cost = Some(value),
            "demanda" | "demand" => demand = Some(value),
            other => return Err(syntax(line, format!("unknown field `{other}`"))),
        }
    }
    let cost = cost.ok_or_else(|| syntax(line, "missing cost"))?;
    let demand = if required { demand.ok_or_else(|| syntax(line, "missing demand"))? } else { 0 };
    Ok((u, v, cost, demand))
}

/// Parses an egl-style file into a static instance with no outside vehicles.
pub fn parse_egl(text: &str) -> Result<NamedInstance, FormatError> {
    let mut name = String::new();
    let (mut vertices, mut vehicles, mut capacity, mut depot) = (None, None, None, None);
    let mut raw: Vec<(usize, usize, u64, u64, usize)> = Vec::new();
    let mut list = List::None;
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let content = l.trim();
        if content.is_empty() || content.eq_ignore_ascii_case("END") {
            continue;
        }
        if content.starts_with('(') {
            let required = match list {
                List::Required => true,
                List::NonRequired => false,
                List::None => return Err(syntax(line, "edge outside an edge list")),
            };
            let (u, v, c, d) = parse_edge_line(content, line, required)?;
            if required && d == 0 {
                return Err(syntax(line, "required edge with zero demand"));
            }
            raw.push((u, v, c, d, line));
            continue;
        }
        let (key, value) = content.split_once(':').ok_or_else(|| syntax(line, "expected `KEY : value`"))?;
        let value = value.trim();
        let num = || -> Result<u64, FormatError> {
            value.parse().map_err(|_| syntax(line, format!("bad value `{value}`")))
        };
        match key.trim().to_ascii_uppercase().as_str() {
            "NOMBRE" | "NAME" => name = value.to_string(),
            "VERTICES" => vertices = Some(num()? as usize),
            "VEHICULOS" | "VEHICLES" => vehicles = Some(num()? as usize),
            "CAPACIDAD" | "CAPACITY" => capacity = Some(num()?),
            "DEPOSITO" | "DEPOT" => depot = Some(num()? as usize),
            "LISTA_ARISTAS_REQ" | "LIST_REQUIRED_EDGES" | "REQUIRED_EDGES_LIST" => list = List::Required,
            "LISTA_ARISTAS_NOREQ" | "LIST_NON_REQUIRED_EDGES" | "NON_REQUIRED_EDGES_LIST" => list = List::NonRequired,
            "COMENTARIO" | "COMMENT" | "ARISTAS_REQ" | "ARISTAS_NOREQ" | "REQUIRED_EDGES" | "NON_REQUIRED_EDGES"
            | "TIPO_COSTES_ARISTAS" | "EDGE_COST_TYPE" | "COSTE_TOTAL_REQ" | "TOTAL_REQUIRED_COST" => {}
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    let n = vertices.ok_or(FormatError::MissingHeader("VERTICES"))?;
    let depot = depot.ok_or(FormatError::MissingHeader("DEPOSITO"))?;
    let mut edges = Vec::with_capacity(raw.len());
    for (u, v, c, d, line) in raw {
        if u == 0 || v == 0 || u > n || v > n {
            return Err(syntax(line, format!("vertex outside 1..={n}")));
        }
        edges.push(Edge::new(u - 1, v - 1, c, c, d));
    }
    if depot == 0 || depot > n {
        return Err(syntax(0, format!("depot {depot} outside 1..={n}")));
    }
    let net = RoadNetwork::new(
        n,
        depot - 1,
        vehicles.ok_or(FormatError::MissingHeader("VEHICULOS"))?,
        capacity.ok_or(FormatError::MissingHeader("CAPACIDAD"))?,
        edges,
    )?;
    Ok(NamedInstance { name, instance: DcarpInstance::new(net, Vec::new(), 0)? })
}
