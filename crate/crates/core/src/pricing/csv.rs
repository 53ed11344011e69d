//! CSV emitters. Headers and row order are fixed; numbers use the shortest
//! representation that round-trips to the same double.

use std::fmt::Write;

use crate::model::Model;

use super::{LmpSurface, SettlementReport, SweepRecord};

/// Maps `-0.0` to `0.0` so signed zeros do not leak into the output.
fn z(v: f64) -> f64 {
    v + 0.0
}

/// `n,t,price` for every bus and hour.
pub fn lmps_da_csv(l: &LmpSurface) -> String {
    let mut s = String::from("n,t,price\n");
    for (n, &bus) in l.buses.iter().enumerate() {
        for (t, &hour) in l.hours.iter().enumerate() {
            let _ = writeln!(s, "{bus},{hour},{}", z(l.da[n][t]));
        }
    }
    s
}

/// `n,t,w,price` for every scenario, bus and hour.
pub fn lmps_rt_csv(l: &LmpSurface) -> String {
    let mut s = String::from("n,t,w,price\n");
    for (w, &sid) in l.scenarios.iter().enumerate() {
        for (n, &bus) in l.buses.iter().enumerate() {
            for (t, &hour) in l.hours.iter().enumerate() {
                let _ = writeln!(s, "{bus},{hour},{sid},{}", z(l.rt[w][n][t]));
            }
        }
    }
    s
}

/// Long format `party,id,bus,item,scenario,value`; `scenario` is empty for
/// items that are not scenario-specific.
pub fn settlement_csv(r: &SettlementReport) -> String {
    let mut s = String::from("party,id,bus,item,scenario,value\n");
    for a in &r.aggregators {
        let head = format!("{},{},{}", a.kind.as_str(), a.id, a.bus);
        let _ = writeln!(s, "{head},da_energy,,{}", a.da_energy);
        let _ = writeln!(s, "{head},reg_capacity,,{}", z(a.reg_capacity));
        let _ = writeln!(s, "{head},reg_mileage,,{}", z(a.reg_mileage));
        for (v, (w, _)) in a.rt.iter().zip(&r.scenarios) {
            let _ = writeln!(s, "{head},rt,{w},{}", z(*v));
        }
        let _ = writeln!(s, "{head},rt_expected,,{}", z(a.rt_expected));
        let _ = writeln!(s, "{head},total_expected,,{}", z(a.total_expected));
    }
    for (item, v) in r.dso.terms() {
        let _ = writeln!(s, "DSO,0,,{item},,{}", z(v));
    }
    s
}

pub const SWEEP_HEADER: &str = "multiplier,reag_da_revenue,reag_rt_expected,reag_total,reag_da_energy,reag_da_max_hourly,rt_traded_expected,objective,status";

/// One row per case; failed cases keep their multiplier and carry the error
/// message in `status` with empty numeric fields.
pub fn sweep_csv(rows: &[(f64, Result<SweepRecord, String>)]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for (i, row) in rows {
        match row {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},ok",
                    r.multiplier,
                    z(r.reag_da_revenue),
                    z(r.reag_rt_expected),
                    z(r.reag_total),
                    z(r.reag_da_energy),
                    z(r.reag_da_max_hourly),
                    z(r.rt_traded_expected),
                    z(r.objective)
                );
            }
            Err(e) => {
                let msg = e.replace(['"', '\n'], " ");
                let _ = writeln!(s, "{i},,,,,,,,\"{msg}\"");
            }
        }
    }
    s
}

/// `column,value` for every model column.
pub fn solution_csv(model: &Model, x: &[f64]) -> String {
    let mut s = String::from("column,value\n");
    for (j, v) in x.iter().enumerate() {
        let _ = writeln!(s, "{},{}", model.column_name(j), z(*v));
    }
    s
}
