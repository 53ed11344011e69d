//! TOML instance documents.
//!
//! A document is an [`Instance`] serialized as TOML, optionally followed by a
//! `scenarios` array of tables. Optional fields missing from a document are
//! filled from defaults before deserialization and recorded as `default` in the
//! instance provenance log. See `docs/instance-format.md` for the schema.

use toml::{Table, Value};

use super::builtin::tan_phi_pf095;
use super::types::{Instance, Provenance, Source};
use super::validate::validate_instance;
use crate::error::{Error, Result};
use crate::scenario::ScenarioSet;

/// Parses and validates an instance document, ignoring any scenario section.
pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_document(text).map(|(inst, _)| inst)
}

/// Parses an instance document and its optional scenario section.
pub fn parse_document(text: &str) -> Result<(Instance, Option<ScenarioSet>)> {
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Syntax(e.to_string().trim_end().to_string()))?;
    let scenarios = table.remove("scenarios");
    let mut defaulted = Provenance::default();
    fill_defaults(&mut table, &mut defaulted);

    let mut inst: Instance = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::semantic("document", e.to_string().trim_end()))?;
    for (path, source) in defaulted.0 {
        inst.provenance.record(path, source);
    }
    let report = validate_instance(&inst);
    if let Some(first) = report.findings.first() {
        let message = report
            .findings
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::semantic(first.path.clone(), message));
    }

    let scenarios = match scenarios {
        None => None,
        Some(v) => {
            let set: ScenarioSet = v
                .try_into()
                .map_err(|e: toml::de::Error| Error::semantic("scenarios", e.to_string().trim_end()))?;
            set.check(&inst)?;
            Some(set)
        }
    };
    Ok((inst, scenarios))
}

pub fn serialize_instance(inst: &Instance) -> String {
    serialize_document(inst, None)
}

/// Writes an instance and optional scenario set as one TOML document.
pub fn serialize_document(inst: &Instance, scenarios: Option<&ScenarioSet>) -> String {
    let mut table = match Value::try_from(inst).expect("instance serializes to TOML") {
        Value::Table(t) => t,
        _ => unreachable!("struct serializes to a table"),
    };
    if let Some(set) = scenarios {
        table.insert(
            "scenarios".into(),
            Value::try_from(set).expect("scenarios serialize to TOML"),
        );
    }
    toml::to_string(&table).expect("table serializes")
}

fn float_series(value: f64, len: usize) -> Value {
    Value::Array(vec![Value::Float(value); len])
}

fn fill(table: &mut Table, key: &str, default: impl FnOnce() -> Value, path: String, log: &mut Provenance) {
    if !table.contains_key(key) {
        table.insert(key.to_string(), default());
        log.record(path, Source::Default);
    }
}

fn each_entry(table: &mut Table, key: &str, mut f: impl FnMut(usize, &mut Table)) {
    if let Some(Value::Array(items)) = table.get_mut(key) {
        for (i, item) in items.iter_mut().enumerate() {
            if let Value::Table(t) = item {
                f(i, t);
            }
        }
    }
}

fn fill_defaults(doc: &mut Table, log: &mut Provenance) {
    let hours = doc
        .get("horizon")
        .and_then(|h| h.get("hours"))
        .and_then(|h| h.as_array())
        .map(|a| a.len())
        .unwrap_or(0);
    let tan_phi = tan_phi_pf095();
    let zero_regulation = || {
        let mut t = Table::new();
        for k in ["cap_up", "cap_dn", "mil_up", "mil_dn"] {
            t.insert(k.into(), float_series(0.0, hours));
        }
        Value::Table(t)
    };

    if let Some(Value::Table(net)) = doc.get_mut("network") {
        let first_bus = net
            .get("buses")
            .and_then(|b| b.as_array())
            .and_then(|b| b.first().cloned());
        if let Some(bus) = first_bus {
            fill(net, "substation_bus", || bus, "network.substation_bus".into(), log);
        }
        fill(net, "v_min", || Value::Float(0.95), "network.v_min".into(), log);
        fill(net, "v_max", || Value::Float(1.05), "network.v_max".into(), log);
        fill(net, "s_base", || Value::Float(100.0), "network.s_base".into(), log);
        each_entry(net, "branches", |j, br| {
            let p = |k: &str| format!("network.branches[{j}].{k}");
            fill(br, "r", || Value::Float(0.01), p("r"), log);
            fill(br, "x", || Value::Float(0.02), p("x"), log);
            fill(br, "pl_max", || Value::Float(40.0), p("pl_max"), log);
            fill(br, "ql_max", || Value::Float(40.0), p("ql_max"), log);
        });
    }

    if let Some(Value::Table(prices)) = doc.get_mut("prices") {
        for (k, v) in [("s_up", 1.0), ("s_dn", 1.0), ("mu_up", 0.9), ("mu_dn", 0.9)] {
            fill(prices, k, || float_series(v, hours), format!("prices.{k}"), log);
        }
    }

    if !doc.contains_key("flags") {
        doc.insert("flags".into(), Value::Table(Table::new()));
    }
    if let Some(Value::Table(flags)) = doc.get_mut("flags") {
        fill(flags, "rt_sell_allowed", || Value::Boolean(true), "flags.rt_sell_allowed".into(), log);
        fill(flags, "rt_premium", || Value::Float(0.0), "flags.rt_premium".into(), log);
        fill(flags, "rt_sell_ratio", || Value::Float(1.0), "flags.rt_sell_ratio".into(), log);
        fill(flags, "evcs_eq23_strict", || Value::Boolean(true), "flags.evcs_eq23_strict".into(), log);
    }

    each_entry(doc, "loads", |i, l| {
        let q = l.get("p").and_then(|p| p.as_array()).map(|p| {
            Value::Array(
                p.iter()
                    .map(|v| Value::Float(v.as_float().or(v.as_integer().map(|i| i as f64)).unwrap_or(0.0) * tan_phi))
                    .collect(),
            )
        });
        if let Some(q) = q {
            fill(l, "q", || q, format!("loads[{i}].q"), log);
        }
    });
    each_entry(doc, "drag", |i, d| {
        fill(d, "tan_phi", || Value::Float(tan_phi), format!("drag[{i}].tan_phi"), log);
        fill(d, "regulation", zero_regulation, format!("drag[{i}].regulation"), log);
    });
    each_entry(doc, "esag", |i, e| {
        fill(e, "eta_ch", || Value::Float(1.0), format!("esag[{i}].eta_ch"), log);
        fill(e, "eta_di", || Value::Float(1.0), format!("esag[{i}].eta_di"), log);
        fill(e, "regulation", zero_regulation, format!("esag[{i}].regulation"), log);
    });
    each_entry(doc, "evcs", |i, e| {
        fill(e, "cl_max", || Value::Float(20.0), format!("evcs[{i}].cl_max"), log);
        fill(e, "gamma_ch", || Value::Float(1.0), format!("evcs[{i}].gamma_ch"), log);
        fill(e, "regulation", zero_regulation, format!("evcs[{i}].regulation"), log);
    });
    each_entry(doc, "ddgag", |i, g| {
        fill(g, "tan_phi", || Value::Float(tan_phi), format!("ddgag[{i}].tan_phi"), log);
        fill(g, "regulation", zero_regulation, format!("ddgag[{i}].regulation"), log);
    });
    each_entry(doc, "reag", |i, r| {
        fill(r, "energy_price", || float_series(0.0, hours), format!("reag[{i}].energy_price"), log);
    });
}
