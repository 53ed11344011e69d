//! Sensitivity of the REAG settlement to real-time price levels.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scenario::ScenarioSet;
use crate::solver::SolverOptions;

use super::{run_case, AggregatorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepMode {
    /// Real-time buy and sell prices both multiplied by `i`.
    RtPremium,
    /// Real-time buy price multiplied by `i`, sell price divided by `i`.
    Spread,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::RtPremium => "rt_premium",
            SweepMode::Spread => "spread",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rt_premium" => Ok(SweepMode::RtPremium),
            "spread" => Ok(SweepMode::Spread),
            other => Err(Error::InvalidArgument(format!(
                "unknown sweep mode `{other}` (expected rt_premium or spread)"
            ))),
        }
    }
}

/// Outcome of one sweep case, summed over every REAG.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub multiplier: f64,
    pub reag_da_revenue: f64,
    pub reag_rt_expected: f64,
    pub reag_total: f64,
    /// Day-ahead REAG energy over the horizon, MWh.
    pub reag_da_energy: f64,
    /// Largest hourly day-ahead REAG schedule, MW.
    pub reag_da_max_hourly: f64,
    /// Expected real-time purchases plus sales at the substation, MWh.
    pub rt_traded_expected: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSeries {
    pub mode: SweepMode,
    pub records: Vec<SweepRecord>,
}

/// Copy of `scen` with real-time prices scaled according to `mode`.
pub fn scale_rt_prices(scen: &ScenarioSet, mode: SweepMode, i: f64) -> ScenarioSet {
    let mut out = scen.clone();
    for s in &mut out.scenarios {
        let (buy, sell) = match mode {
            SweepMode::RtPremium => (i, i),
            SweepMode::Spread => (i, 1.0 / i),
        };
        s.rt_buy.iter_mut().for_each(|p| *p *= buy);
        s.rt_sell.iter_mut().for_each(|p| *p *= sell);
    }
    out
}

fn check_multipliers(multipliers: &[f64]) -> Result<()> {
    match multipliers.iter().find(|&&i| !(i.is_finite() && i > 0.0)) {
        Some(i) => Err(Error::InvalidArgument(format!(
            "sweep multiplier must be positive, got {i}"
        ))),
        None => Ok(()),
    }
}

fn one_case(
    inst: &Instance,
    scen: &ScenarioSet,
    mode: SweepMode,
    i: f64,
    opts: &SolverOptions,
) -> Result<SweepRecord> {
    let scaled = scale_rt_prices(scen, mode, i);
    let case = run_case(inst, &scaled, opts)?;
    let x = &case.milp.x;
    let idx = &case.model.index;
    let mut rec = SweepRecord {
        multiplier: i,
        reag_da_revenue: 0.0,
        reag_rt_expected: 0.0,
        reag_total: 0.0,
        reag_da_energy: 0.0,
        reag_da_max_hourly: 0.0,
        rt_traded_expected: 0.0,
        objective: case.report.dso.objective,
    };
    for a in case.report.aggregators.iter().filter(|a| a.kind == AggregatorKind::Reag) {
        rec.reag_da_revenue += a.da_energy;
        rec.reag_rt_expected += a.rt_expected;
        rec.reag_total += a.total_expected;
    }
    for t in 0..inst.hours() {
        let hourly: f64 = idx.reag.iter().map(|cols| x[cols[t]]).sum();
        rec.reag_da_energy += hourly;
        rec.reag_da_max_hourly = rec.reag_da_max_hourly.max(hourly);
    }
    for (w, s) in scaled.iter().enumerate() {
        let sc = &idx.scenarios[w];
        for t in 0..inst.hours() {
            rec.rt_traded_expected += s.probability * (x[sc.buy[t]] + x[sc.sell[t]]);
        }
    }
    Ok(rec)
}

/// Solves every case independently (in parallel) and returns per-case results
/// in multiplier order.
pub fn sweep_cases(
    inst: &Instance,
    scen: &ScenarioSet,
    multipliers: &[f64],
    mode: SweepMode,
    opts: &SolverOptions,
) -> Result<Vec<Result<SweepRecord>>> {
    check_multipliers(multipliers)?;
    Ok(multipliers
        .par_iter()
        .map(|&i| {
            one_case(inst, scen, mode, i, opts).map_err(|e| Error::Sweep {
                multiplier: i,
                source: Box::new(e),
            })
        })
        .collect())
}

/// Like [`sweep_cases`] but fails on the first failing case.
pub fn sensitivity_sweep(
    inst: &Instance,
    scen: &ScenarioSet,
    multipliers: &[f64],
    mode: SweepMode,
    opts: &SolverOptions,
) -> Result<SweepSeries> {
    let records = sweep_cases(inst, scen, multipliers, mode, opts)?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSeries { mode, records })
}
