use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dso_core::instance::Source;
use dso_core::model::{assemble, write_mps, Model};
use dso_core::pricing::{
    lmps_da_csv, lmps_rt_csv, settlement_csv, solution_csv, sweep_csv, CaseResult, SweepMode,
    SweepRecord,
};
use dso_core::solver::SolverOptions;
use dso_core::Error;
use serde_json::{json, Value};

use crate::input::Input;

fn write(dir: &Path, name: &str, body: impl AsRef<[u8]>) -> Result<(), Error> {
    fs::write(dir.join(name), body).map_err(|e| {
        Error::InvalidArgument(format!("cannot write {}: {e}", dir.join(name).display()))
    })
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::InvalidArgument(format!("cannot create output directory {}: {e}", dir.display()))
    })
}

fn provenance(input: &Input) -> Value {
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (path, source) in &input.instance.provenance.0 {
        let key = match source {
            Source::Paper => "paper",
            Source::Default => "default",
            Source::File => "file",
        };
        groups.entry(key).or_default().push(path);
    }
    json!(groups)
}

fn solver_options(opts: &SolverOptions) -> Value {
    json!({
        "feas_tol": opts.feas_tol,
        "opt_tol": opts.opt_tol,
        "int_tol": opts.int_tol,
        "gap_tol": opts.gap_tol,
    })
}

fn model_size(model: &Model) -> Value {
    json!({
        "columns": model.num_cols(),
        "rows": model.num_rows(),
        "binaries": model.binaries().len(),
        "first_stage_columns": model.index.first_stage,
    })
}

fn manifest(command: &str, input: &Input, opts: &SolverOptions, extra: Value) -> Value {
    let mut m = json!({
        "command": command,
        "source": input.label,
        "scenario_source": input.scenario_source,
        "instance_sha256": input.hash(),
        "hours": input.instance.hours(),
        "scenarios": input
            .scenarios
            .iter()
            .map(|s| json!({"id": s.id, "probability": s.probability}))
            .collect::<Vec<_>>(),
        "provenance": provenance(input),
        "solver_options": solver_options(opts),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut m, extra) {
        m.extend(e);
    }
    m
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("manifest serializes");
    s.push('\n');
    s
}

pub fn write_run(
    out: &Path,
    input: &Input,
    case: &CaseResult,
    opts: &SolverOptions,
    export_lp: bool,
) -> Result<(), Error> {
    ensure_dir(out)?;
    write(out, "solution.csv", solution_csv(&case.model, &case.milp.x))?;
    write(out, "lmp_da.csv", lmps_da_csv(&case.lmps))?;
    write(out, "lmp_rt.csv", lmps_rt_csv(&case.lmps))?;
    write(out, "settlement.csv", settlement_csv(&case.report))?;
    let mut log = case.milp.log.join("\n");
    log.push('\n');
    write(out, "solve.log", log)?;
    let mut files = vec!["solution.csv", "lmp_da.csv", "lmp_rt.csv", "settlement.csv", "solve.log"];
    if export_lp {
        write(out, "model.mps", write_mps(&case.model))?;
        files.push("model.mps");
    }
    let m = &case.milp;
    let extra = json!({
        "model": model_size(&case.model),
        "solver": {
            "status": format!("{:?}", m.status),
            "objective": m.objective,
            "nodes": m.nodes,
            "lp_iterations": m.lp_iterations,
            "commitment": m.assignment,
        },
        "files": files,
    });
    write(out, "manifest.json", to_json(&manifest("run", input, opts, extra)))
}

/// Writes `sweep.csv` and the manifest; returns the first failed case, if any.
pub fn write_sweep(
    out: &Path,
    input: &Input,
    mode: SweepMode,
    multipliers: &[f64],
    cases: Vec<Result<SweepRecord, Error>>,
    opts: &SolverOptions,
) -> Result<Option<Error>, Error> {
    ensure_dir(out)?;
    let mut rows = Vec::with_capacity(cases.len());
    let mut first_err = None;
    let mut failed = 0;
    for (&i, case) in multipliers.iter().zip(cases) {
        match case {
            Ok(r) => rows.push((i, Ok(r))),
            Err(e) => {
                failed += 1;
                rows.push((i, Err(e.to_string())));
                first_err.get_or_insert(e);
            }
        }
    }
    write(out, "sweep.csv", sweep_csv(&rows))?;
    let extra = json!({
        "sweep": {
            "mode": mode.as_str(),
            "multipliers": multipliers,
            "failed_cases": failed,
        },
        "files": ["sweep.csv"],
    });
    write(out, "manifest.json", to_json(&manifest("sweep", input, opts, extra)))?;
    Ok(first_err)
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub fn inspect(input: &Input) -> Result<String, Error> {
    let inst = &input.instance;
    let mut s = String::new();
    let _ = writeln!(s, "source      {}", input.label);
    let _ = writeln!(s, "scenarios   {}", input.scenario_source);
    let _ = writeln!(s, "sha256      {}", input.hash());
    let _ = writeln!(
        s,
        "network     {} buses, {} branches, substation bus {}",
        inst.network.buses.len(),
        inst.network.branches.len(),
        inst.network.substation_bus
    );
    let _ = writeln!(s, "hours       {}", inst.hours());
    let _ = writeln!(s);
    let _ = writeln!(s, "{:>4} {:>12} {:>10} {:>10} {:>10} {:>10}", "w", "probability", "reag_mw", "load_mw", "rt_buy", "rt_sell");
    for sc in input.scenarios.iter() {
        let reag: Vec<f64> = (0..inst.hours())
            .map(|t| sc.reag.iter().map(|r| r[t]).sum())
            .collect();
        let load: Vec<f64> = (0..inst.hours())
            .map(|t| sc.loads.iter().map(|l| l.p[t]).sum())
            .collect();
        let _ = writeln!(
            s,
            "{:>4} {:>12.6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            sc.id,
            sc.probability,
            mean(&reag),
            mean(&load),
            mean(&sc.rt_buy),
            mean(&sc.rt_sell)
        );
    }
    let _ = writeln!(s, "(hourly means)");
    let _ = writeln!(s);

    let model = assemble(inst, &input.scenarios)?;
    let _ = writeln!(
        s,
        "model       {} columns ({} first stage, {} binary), {} rows",
        model.num_cols(),
        model.index.first_stage,
        model.binaries().len(),
        model.num_rows()
    );
    let mut families: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &model.rows {
        *families.entry(r.tag.family.code()).or_default() += 1;
    }
    for (f, n) in families {
        let _ = writeln!(s, "  {f:<24} {n}");
    }
    let _ = writeln!(s);

    for (label, source) in [("paper", Source::Paper), ("default", Source::Default), ("file", Source::File)] {
        let keys: Vec<&str> = inst.provenance.with_source(source).collect();
        if keys.is_empty() {
            continue;
        }
        let _ = writeln!(s, "{label} parameters ({})", keys.len());
        for k in keys {
            let _ = writeln!(s, "  {k}");
        }
    }
    Ok(s)
}
