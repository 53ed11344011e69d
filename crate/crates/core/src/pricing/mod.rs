//! Locational marginal prices, settlement and sensitivity sweeps.
//!
//! Day-ahead LMPs are the duals of the active balance rows of the fixed-binary
//! pricing LP. Real-time LMPs are the duals of the active adjustment rows
//! divided by the scenario probability, which makes them invariant to how the
//! probability mass is split between identical scenarios.

mod csv;
mod sweep;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::{assemble, ConstraintTag, Family, Model};
use crate::scenario::ScenarioSet;
use crate::solver::{solve_milp, LpSolution, LpStatus, MilpSolution, SolverOptions};

pub use csv::{lmps_da_csv, lmps_rt_csv, settlement_csv, solution_csv, sweep_csv};
pub use sweep::{
    scale_rt_prices, sensitivity_sweep, sweep_cases, SweepMode, SweepRecord, SweepSeries,
};

/// Prices in $/MWh indexed by bus position, hour position and scenario position.
#[derive(Clone, Debug, PartialEq)]
pub struct LmpSurface {
    pub buses: Vec<u32>,
    pub hours: Vec<u32>,
    pub scenarios: Vec<u32>,
    /// `da[n][t]`
    pub da: Vec<Vec<f64>>,
    /// `rt[w][n][t]`
    pub rt: Vec<Vec<Vec<f64>>>,
}

impl LmpSurface {
    pub fn da_at(&self, bus: u32, t: usize) -> Option<f64> {
        let n = self.buses.iter().position(|&b| b == bus)?;
        Some(self.da[n][t])
    }

    pub fn rt_at(&self, scenario: u32, bus: u32, t: usize) -> Option<f64> {
        let w = self.scenarios.iter().position(|&s| s == scenario)?;
        let n = self.buses.iter().position(|&b| b == bus)?;
        Some(self.rt[w][n][t])
    }
}

fn dual(model: &Model, sol: &LpSolution, tag: ConstraintTag) -> Result<f64> {
    sol.dual(model, &tag)
        .ok_or_else(|| Error::MissingTag(tag.name()))
}

/// Reads LMPs off the duals of a fixed-binary pricing solution.
pub fn extract_lmps(
    model: &Model,
    inst: &Instance,
    scen: &ScenarioSet,
    pricing: &LpSolution,
) -> Result<LmpSurface> {
    if pricing.status != LpStatus::Optimal {
        return Err(Error::InvalidArgument(
            "LMPs need an optimal pricing solution".to_string(),
        ));
    }
    if pricing.duals.len() != model.num_rows() {
        return Err(Error::MissingTag(format!(
            "solution has {} duals for {} rows",
            pricing.duals.len(),
            model.num_rows()
        )));
    }
    let buses = inst.network.buses.clone();
    let hours = inst.horizon.hours.clone();
    let mut da = Vec::with_capacity(buses.len());
    for &bus in &buses {
        let row = hours
            .iter()
            .map(|&h| dual(model, pricing, ConstraintTag::new(Family::Eq52BalanceP, bus, h)))
            .collect::<Result<Vec<_>>>()?;
        da.push(row);
    }
    let mut rt = Vec::with_capacity(scen.len());
    for s in scen.iter() {
        if s.probability <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "scenario {} has non-positive probability",
                s.id
            )));
        }
        let mut per_bus = Vec::with_capacity(buses.len());
        for &bus in &buses {
            let row = hours
                .iter()
                .map(|&h| {
                    dual(model, pricing, ConstraintTag::in_scenario(Family::Eq60AdjP, bus, h, s.id))
                        .map(|d| d / s.probability)
                })
                .collect::<Result<Vec<_>>>()?;
            per_bus.push(row);
        }
        rt.push(per_bus);
    }
    Ok(LmpSurface {
        buses,
        hours,
        scenarios: scen.iter().map(|s| s.id).collect(),
        da,
        rt,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AggregatorKind {
    Drag,
    Esag,
    Evcs,
    Ddgag,
    Reag,
}

impl AggregatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregatorKind::Drag => "DRAG",
            AggregatorKind::Esag => "ESAG",
            AggregatorKind::Evcs => "EVCS",
            AggregatorKind::Ddgag => "DDGAG",
            AggregatorKind::Reag => "REAG",
        }
    }
}

/// Revenues of one aggregator in $. Consumers have negative energy revenue.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregatorSettlement {
    pub kind: AggregatorKind,
    pub id: u32,
    pub bus: u32,
    pub da_energy: f64,
    pub reg_capacity: f64,
    pub reg_mileage: f64,
    /// Real-time revenue per scenario, in scenario order.
    pub rt: Vec<f64>,
    pub rt_expected: f64,
    pub total_expected: f64,
}

/// Terms of the DSO's expected cost; `objective` is their signed sum.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DsoBreakdown {
    pub wholesale_energy_cost: f64,
    pub wholesale_capacity_revenue: f64,
    pub wholesale_mileage_revenue: f64,
    pub energy_payments: f64,
    pub drag_bid_value: f64,
    pub capacity_payments: f64,
    pub mileage_payments: f64,
    pub rt_purchase_cost: f64,
    pub rt_sale_revenue: f64,
    pub objective: f64,
}

impl DsoBreakdown {
    pub fn terms(&self) -> [(&'static str, f64); 10] {
        [
            ("wholesale_energy_cost", self.wholesale_energy_cost),
            ("wholesale_capacity_revenue", self.wholesale_capacity_revenue),
            ("wholesale_mileage_revenue", self.wholesale_mileage_revenue),
            ("energy_payments", self.energy_payments),
            ("drag_bid_value", self.drag_bid_value),
            ("capacity_payments", self.capacity_payments),
            ("mileage_payments", self.mileage_payments),
            ("rt_purchase_cost", self.rt_purchase_cost),
            ("rt_sale_revenue", self.rt_sale_revenue),
            ("objective", self.objective),
        ]
    }

    /// Recomputes the objective from the terms.
    pub fn signed_sum(&self) -> f64 {
        self.wholesale_energy_cost - self.wholesale_capacity_revenue - self.wholesale_mileage_revenue
            + self.energy_payments
            - self.drag_bid_value
            + self.capacity_payments
            + self.mileage_payments
            + self.rt_purchase_cost
            - self.rt_sale_revenue
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SettlementReport {
    pub scenarios: Vec<(u32, f64)>,
    pub aggregators: Vec<AggregatorSettlement>,
    pub dso: DsoBreakdown,
}

impl SettlementReport {
    pub fn aggregator(&self, kind: AggregatorKind, id: u32) -> Option<&AggregatorSettlement> {
        self.aggregators.iter().find(|a| a.kind == kind && a.id == id)
    }
}

fn bus_pos(lmps: &LmpSurface, bus: u32) -> usize {
    lmps.buses
        .iter()
        .position(|&b| b == bus)
        .expect("aggregator bus is part of the network")
}

/// Settles the schedule `sol` at the prices `lmps`.
pub fn settle(
    model: &Model,
    inst: &Instance,
    scen: &ScenarioSet,
    sol: &MilpSolution,
    lmps: &LmpSurface,
) -> SettlementReport {
    let x = &sol.x;
    let idx = &model.index;
    let pr = &inst.prices;
    let hours = inst.hours();
    let probs: Vec<(u32, f64)> = scen.iter().map(|s| (s.id, s.probability)).collect();
    let regulation = |off: &crate::instance::RegulationOffer, up: &[usize], dn: &[usize]| {
        let mut cap = 0.0;
        let mut mil = 0.0;
        for t in 0..hours {
            cap += off.cap_up[t] * x[up[t]] + off.cap_dn[t] * x[dn[t]];
            mil += pr.s_up[t] * pr.mu_up[t] * off.mil_up[t] * x[up[t]]
                + pr.s_dn[t] * pr.mu_dn[t] * off.mil_dn[t] * x[dn[t]];
        }
        (cap, mil)
    };
    let mut out = Vec::new();
    let mut dso = DsoBreakdown::default();
    let mut push = |kind, id, bus, da: f64, cap: f64, mil: f64, rt: Vec<f64>| {
        let rt_expected: f64 = rt.iter().zip(&probs).map(|(r, (_, p))| r * p).sum();
        out.push(AggregatorSettlement {
            kind,
            id,
            bus,
            da_energy: da,
            reg_capacity: cap,
            reg_mileage: mil,
            total_expected: da + cap + mil + rt_expected,
            rt,
            rt_expected,
        });
    };
    let zero_rt = vec![0.0; scen.len()];

    for (k, d) in inst.drag.iter().enumerate() {
        let n = bus_pos(lmps, d.bus);
        let mut da = 0.0;
        for (a, b) in d.blocks.iter().enumerate() {
            for t in 0..hours {
                let p = x[idx.drag[k].blocks[a][t]];
                da -= p * lmps.da[n][t];
                dso.drag_bid_value += b.bid[t] * p;
            }
        }
        let (cap, mil) = regulation(&d.regulation, &idx.drag[k].r_up, &idx.drag[k].r_dn);
        dso.capacity_payments += cap;
        dso.mileage_payments += mil;
        push(AggregatorKind::Drag, d.id, d.bus, da, cap, mil, zero_rt.clone());
    }
    for (k, e) in inst.esag.iter().enumerate() {
        let n = bus_pos(lmps, e.bus);
        let mut da = 0.0;
        for t in 0..hours {
            let p = x[idx.esag[k].p[t]];
            da += p * lmps.da[n][t];
            dso.energy_payments += e.energy_price[t] * p;
        }
        let (cap, mil) = regulation(&e.regulation, &idx.esag[k].r_up, &idx.esag[k].r_dn);
        dso.capacity_payments += cap;
        dso.mileage_payments += mil;
        push(AggregatorKind::Esag, e.id, e.bus, da, cap, mil, zero_rt.clone());
    }
    for (k, ev) in inst.evcs.iter().enumerate() {
        let n = bus_pos(lmps, ev.bus);
        let mut da = 0.0;
        for t in 0..hours {
            let p = x[idx.evcs[k].p[t]];
            da -= p * lmps.da[n][t];
            dso.energy_payments -= ev.energy_price[t] * p;
        }
        let (cap, mil) = regulation(&ev.regulation, &idx.evcs[k].r_up, &idx.evcs[k].r_dn);
        dso.capacity_payments += cap;
        dso.mileage_payments += mil;
        push(AggregatorKind::Evcs, ev.id, ev.bus, da, cap, mil, zero_rt.clone());
    }
    for (k, g) in inst.ddgag.iter().enumerate() {
        let n = bus_pos(lmps, g.bus);
        let mut da = 0.0;
        for t in 0..hours {
            let p = x[idx.ddgag[k].p[t]];
            da += p * lmps.da[n][t];
            dso.energy_payments += g.energy_price[t] * p;
        }
        let (cap, mil) = regulation(&g.regulation, &idx.ddgag[k].r_up, &idx.ddgag[k].r_dn);
        dso.capacity_payments += cap;
        dso.mileage_payments += mil;
        push(AggregatorKind::Ddgag, g.id, g.bus, da, cap, mil, zero_rt.clone());
    }
    for (k, r) in inst.reag.iter().enumerate() {
        let n = bus_pos(lmps, r.bus);
        let mut da = 0.0;
        for t in 0..hours {
            da += x[idx.reag[k][t]] * lmps.da[n][t];
        }
        let rt = scen
            .iter()
            .enumerate()
            .map(|(w, s)| {
                (0..hours)
                    .map(|t| {
                        let delta = s.reag[k][t] - x[idx.scenarios[w].spill[k][t]] - x[idx.reag[k][t]];
                        delta * lmps.rt[w][n][t]
                    })
                    .sum()
            })
            .collect();
        push(AggregatorKind::Reag, r.id, r.bus, da, 0.0, 0.0, rt);
    }

    for t in 0..hours {
        dso.wholesale_energy_cost += pr.da_energy[t] * x[idx.substation.p[t]];
        let up = x[idx.substation.r_up[t]];
        let dn = x[idx.substation.r_dn[t]];
        dso.wholesale_capacity_revenue += pr.cap_up[t] * up + pr.cap_dn[t] * dn;
        dso.wholesale_mileage_revenue +=
            pr.s_up[t] * pr.mu_up[t] * pr.mil_up[t] * up + pr.s_dn[t] * pr.mu_dn[t] * pr.mil_dn[t] * dn;
    }
    for (w, s) in scen.iter().enumerate() {
        let sc = &idx.scenarios[w];
        for t in 0..hours {
            dso.rt_purchase_cost += s.probability * s.rt_buy[t] * x[sc.buy[t]];
            dso.rt_sale_revenue += s.probability * s.rt_sell[t] * x[sc.sell[t]];
        }
    }
    dso.objective = dso.signed_sum();
    SettlementReport {
        scenarios: probs,
        aggregators: out,
        dso,
    }
}

/// Everything produced by one solve of an instance.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub model: Model,
    pub milp: MilpSolution,
    pub lmps: LmpSurface,
    pub report: SettlementReport,
}

/// Assembles, solves, prices and settles one case.
pub fn run_case(inst: &Instance, scen: &ScenarioSet, opts: &SolverOptions) -> Result<CaseResult> {
    let model = assemble(inst, scen)?;
    let milp = solve_milp(&model, opts)?;
    let lmps = extract_lmps(&model, inst, scen, &milp.pricing)?;
    let report = settle(&model, inst, scen, &milp, &lmps);
    Ok(CaseResult {
        model,
        milp,
        lmps,
        report,
    })
}

