//! Free-format MPS export and a reader for round-trip checks.
//!
//! Columns are named `kind_owner_t[_w]` and rows `FAMILY_owner_t[_w]`. Binary
//! columns are wrapped in `MARKER INTORG/INTEND` pairs and given `BV` bounds.

use std::collections::HashMap;
use std::fmt::Write;

use crate::error::{Error, Result};

use super::{Model, Sense};

/// Plain-data view of an MPS file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MpsModel {
    pub name: String,
    pub col_names: Vec<String>,
    pub cost: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub integer: Vec<bool>,
    pub row_names: Vec<String>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    /// Row-wise `(column, coefficient)` lists in column order.
    pub coefs: Vec<Vec<(usize, f64)>>,
}

impl MpsModel {
    pub fn from_model(model: &Model) -> Self {
        let cols = model.columns();
        Self {
            name: "DSO".to_string(),
            col_names: cols.iter().map(|c| c.key.name()).collect(),
            cost: model.cost.clone(),
            lo: cols.iter().map(|c| c.lo).collect(),
            hi: cols.iter().map(|c| c.hi).collect(),
            integer: cols.iter().map(|c| c.binary).collect(),
            row_names: model.rows.iter().map(|r| r.tag.name()).collect(),
            senses: model.rows.iter().map(|r| r.sense).collect(),
            rhs: model.rows.iter().map(|r| r.rhs).collect(),
            coefs: model.rows.iter().map(|r| r.coefs.clone()).collect(),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Serializes the model in free MPS.
pub fn write_mps(model: &Model) -> String {
    let m = MpsModel::from_model(model);
    let n = m.col_names.len();
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in m.coefs.iter().enumerate() {
        for &(j, a) in row {
            by_col[j].push((i, a));
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", m.name);
    out.push_str("ROWS\n N COST\n");
    for (name, s) in m.row_names.iter().zip(&m.senses) {
        let code = match s {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {code} {name}");
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for j in 0..n {
        if m.integer[j] != in_int {
            let marker = if m.integer[j] { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " MARKER 'MARKER' '{marker}'");
            in_int = m.integer[j];
        }
        let name = &m.col_names[j];
        if m.cost[j] != 0.0 || by_col[j].is_empty() {
            let _ = writeln!(out, " {name} COST {}", num(m.cost[j]));
        }
        for &(i, a) in &by_col[j] {
            let _ = writeln!(out, " {name} {} {}", m.row_names[i], num(a));
        }
    }
    if in_int {
        out.push_str(" MARKER 'MARKER' 'INTEND'\n");
    }
    out.push_str("RHS\n");
    for (i, &r) in m.rhs.iter().enumerate() {
        if r != 0.0 {
            let _ = writeln!(out, " RHS {} {}", m.row_names[i], num(r));
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..n {
        let name = &m.col_names[j];
        let (lo, hi) = (m.lo[j], m.hi[j]);
        if m.integer[j] && lo == 0.0 && hi == 1.0 {
            let _ = writeln!(out, " BV BND {name}");
        } else if lo == hi {
            let _ = writeln!(out, " FX BND {name} {}", num(lo));
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(out, " FR BND {name}");
        } else {
            if lo == f64::NEG_INFINITY {
                out.push_str(&format!(" MI BND {name}\n"));
            } else if lo != 0.0 {
                let _ = writeln!(out, " LO BND {name} {}", num(lo));
            }
            if hi != f64::INFINITY {
                let _ = writeln!(out, " UP BND {name} {}", num(hi));
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::Syntax(format!("line {line}: bad number {tok:?}")))
}

/// Parses free MPS as written by [`write_mps`] (and the common subset of the format).
pub fn read_mps(text: &str) -> Result<MpsModel> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
    }
    let mut m = MpsModel::default();
    let mut section = Section::None;
    let mut row_pos: HashMap<String, usize> = HashMap::new();
    let mut col_pos: HashMap<String, usize> = HashMap::new();
    let mut objective = String::new();
    let mut in_int = false;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            section = match toks[0] {
                "NAME" => {
                    m.name = toks.get(1).unwrap_or(&"").to_string();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => break,
                other => return Err(Error::Syntax(format!("line {line}: unknown section {other}"))),
            };
            continue;
        }
        let short = || Error::Syntax(format!("line {line}: too few fields"));
        match section {
            Section::Rows => {
                let (code, name) = (toks[0], *toks.get(1).ok_or_else(short)?);
                let sense = match code {
                    "N" => {
                        if objective.is_empty() {
                            objective = name.to_string();
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(Error::Syntax(format!("line {line}: row type {code}"))),
                };
                row_pos.insert(name.to_string(), m.row_names.len());
                m.row_names.push(name.to_string());
                m.senses.push(sense);
                m.rhs.push(0.0);
                m.coefs.push(Vec::new());
            }
            Section::Columns => {
                if toks.get(1) == Some(&"'MARKER'") {
                    in_int = toks.get(2) == Some(&"'INTORG'");
                    continue;
                }
                let name = toks[0];
                let j = *col_pos.entry(name.to_string()).or_insert_with(|| {
                    m.col_names.push(name.to_string());
                    m.cost.push(0.0);
                    m.lo.push(0.0);
                    m.hi.push(f64::INFINITY);
                    m.integer.push(in_int);
                    m.col_names.len() - 1
                });
                if toks.len() < 3 || toks.len() % 2 == 0 {
                    return Err(short());
                }
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    if pair[0] == objective {
                        m.cost[j] = v;
                    } else {
                        let i = *row_pos
                            .get(pair[0])
                            .ok_or_else(|| Error::Syntax(format!("line {line}: unknown row {}", pair[0])))?;
                        m.coefs[i].push((j, v));
                    }
                }
            }
            Section::Rhs => {
                if toks.len() < 3 {
                    return Err(short());
                }
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair.get(1).ok_or_else(short)?, line)?;
                    if let Some(&i) = row_pos.get(pair[0]) {
                        m.rhs[i] = v;
                    }
                }
            }
            Section::Bounds => {
                let kind = toks[0];
                let name = *toks.get(2).ok_or_else(short)?;
                let j = *col_pos
                    .get(name)
                    .ok_or_else(|| Error::Syntax(format!("line {line}: unknown column {name}")))?;
                let val = || -> Result<f64> { parse_num(toks.get(3).ok_or_else(short)?, line) };
                match kind {
                    "UP" => m.hi[j] = val()?,
                    "LO" => m.lo[j] = val()?,
                    "FX" => {
                        let v = val()?;
                        m.lo[j] = v;
                        m.hi[j] = v;
                    }
                    "FR" => {
                        m.lo[j] = f64::NEG_INFINITY;
                        m.hi[j] = f64::INFINITY;
                    }
                    "MI" => m.lo[j] = f64::NEG_INFINITY,
                    "PL" => m.hi[j] = f64::INFINITY,
                    "BV" => {
                        m.lo[j] = 0.0;
                        m.hi[j] = 1.0;
                        m.integer[j] = true;
                    }
                    _ => return Err(Error::Syntax(format!("line {line}: bound type {kind}"))),
                }
            }
            Section::None => return Err(Error::Syntax(format!("line {line}: data outside a section"))),
        }
    }
    for row in &mut m.coefs {
        row.sort_by_key(|&(j, _)| j);
    }
    Ok(m)
}
