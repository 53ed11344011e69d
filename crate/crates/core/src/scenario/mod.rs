//! Second-stage scenario sets.
//!
//! Two generators are provided: a discrete table of renewable production levels
//! (load and prices at forecast), and a seven-point quantization of a normal
//! distribution applied comonotonically to real-time prices, inelastic load and
//! renewable production.

mod normal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{BusLoad, Instance};

pub use normal::{normal_cdf, seven_point_normal, seven_point_weights, QuantizedFactor, LEVELS};

/// One joint realization of the second-stage uncertainty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: u32,
    pub probability: f64,
    /// Available renewable production per REAG (instance order) and hour, MW.
    pub reag: Vec<Vec<f64>>,
    /// Realized inelastic load.
    pub loads: Vec<BusLoad>,
    /// Real-time purchase price per hour, $/MWh.
    pub rt_buy: Vec<f64>,
    /// Real-time sale price per hour, $/MWh.
    pub rt_sell: Vec<f64>,
}

impl Scenario {
    pub fn load(&self, bus: u32, t: usize) -> (f64, f64) {
        crate::instance::load_at(&self.loads, bus, t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scenario> {
        self.scenarios.iter()
    }

    pub fn total_probability(&self) -> f64 {
        self.scenarios.iter().map(|s| s.probability).sum()
    }

    /// Checks probabilities, id uniqueness and price ordering against an instance.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let total = self.total_probability();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ProbabilitySum(total));
        }
        let hours = inst.hours();
        for (i, s) in self.scenarios.iter().enumerate() {
            let path = format!("scenarios[{i}]");
            if self.scenarios[..i].iter().any(|o| o.id == s.id) {
                return Err(Error::semantic(path, format!("duplicate scenario id {}", s.id)));
            }
            if !(s.probability > 0.0 && s.probability <= 1.0) {
                return Err(Error::semantic(path, "probability must lie in (0, 1]"));
            }
            if s.reag.len() != inst.reag.len() || s.reag.iter().any(|r| r.len() != hours) {
                return Err(Error::semantic(path, "renewable realization shape mismatch"));
            }
            if s.rt_buy.len() != hours || s.rt_sell.len() != hours {
                return Err(Error::semantic(path, "real-time price series length mismatch"));
            }
            if s.reag.iter().flatten().any(|v| !(*v >= 0.0)) {
                return Err(Error::semantic(path, "renewable realization must be non-negative"));
            }
            for l in &s.loads {
                if inst.network.bus_position(l.bus).is_none() {
                    return Err(Error::semantic(path, format!("load on unknown bus {}", l.bus)));
                }
                if l.p.len() != hours || l.q.len() != hours {
                    return Err(Error::semantic(path, "load realization length mismatch"));
                }
                if l.p.iter().chain(&l.q).any(|v| !(*v >= 0.0)) {
                    return Err(Error::semantic(path, "load realization must be non-negative"));
                }
            }
            if s.rt_sell.iter().zip(&s.rt_buy).any(|(sell, buy)| sell > buy) {
                return Err(Error::semantic(path, "real-time sell price exceeds buy price"));
            }
        }
        Ok(())
    }
}

/// Base real-time prices implied by the instance flags: buy at day-ahead plus
/// premium, sell at a fixed fraction of buy.
pub fn base_rt_prices(inst: &Instance) -> (Vec<f64>, Vec<f64>) {
    let buy: Vec<f64> = inst
        .prices
        .da_energy
        .iter()
        .map(|p| p + inst.flags.rt_premium)
        .collect();
    let sell = buy.iter().map(|b| b * inst.flags.rt_sell_ratio).collect();
    (buy, sell)
}

fn forecast_reag(inst: &Instance) -> Vec<Vec<f64>> {
    inst.reag.iter().map(|r| r.p_forecast_max.clone()).collect()
}

/// Single scenario with every realization at its forecast.
pub fn forecast_scenario(inst: &Instance) -> ScenarioSet {
    let (rt_buy, rt_sell) = base_rt_prices(inst);
    ScenarioSet {
        scenarios: vec![Scenario {
            id: 1,
            probability: 1.0,
            reag: forecast_reag(inst),
            loads: inst.loads.clone(),
            rt_buy,
            rt_sell,
        }],
    }
}

/// One scenario per `(production MW, probability)` row; every REAG produces the
/// row's value in every hour.
pub fn discrete_reag_scenarios(inst: &Instance, rows: &[(f64, f64)]) -> Result<ScenarioSet> {
    if rows.is_empty() {
        return Err(Error::ProbabilitySum(0.0));
    }
    if let Some(&(_, p)) = rows.iter().find(|(_, p)| !(*p > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "scenario probability must be positive, got {p}"
        )));
    }
    if let Some(&(v, _)) = rows.iter().find(|(v, _)| !(*v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "renewable production must be non-negative, got {v}"
        )));
    }
    let total: f64 = rows.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::ProbabilitySum(total));
    }
    let (rt_buy, rt_sell) = base_rt_prices(inst);
    let hours = inst.hours();
    let scenarios = rows
        .iter()
        .enumerate()
        .map(|(i, &(production, probability))| Scenario {
            id: i as u32 + 1,
            probability: probability / total,
            reag: vec![vec![production; hours]; inst.reag.len()],
            loads: inst.loads.clone(),
            rt_buy: rt_buy.clone(),
            rt_sell: rt_sell.clone(),
        })
        .collect();
    Ok(ScenarioSet { scenarios })
}

/// Couples three quantized factors point by point into seven joint scenarios.
///
/// Point `i` of every factor is used together, so the directions carried by the
/// factors decide which way each quantity moves. Reactive load moves with active load.
/// Sell prices are the instance's sell ratio times the scenario buy price.
pub fn compose_joint(
    inst: &Instance,
    reag: &QuantizedFactor,
    load: &QuantizedFactor,
    price: &QuantizedFactor,
) -> Result<ScenarioSet> {
    for (name, f) in [("reag", reag), ("load", load), ("price", price)] {
        if f.points() != LEVELS.len() {
            return Err(Error::FactorMismatch(format!(
                "{name} factor has {} points, expected {}",
                f.points(),
                LEVELS.len()
            )));
        }
    }
    if reag.weights != load.weights || reag.weights != price.weights {
        return Err(Error::FactorMismatch("factor weights differ".into()));
    }
    let (base_buy, _) = base_rt_prices(inst);
    let ratio = inst.flags.rt_sell_ratio;
    let scenarios = (0..LEVELS.len())
        .map(|i| {
            let mr = reag.multiplier(i);
            let ml = load.multiplier(i);
            let mp = price.multiplier(i);
            let rt_buy: Vec<f64> = base_buy.iter().map(|b| b * mp).collect();
            Scenario {
                id: i as u32 + 1,
                probability: reag.weights[i],
                reag: inst
                    .reag
                    .iter()
                    .map(|r| r.p_forecast_max.iter().map(|p| (p * mr).max(0.0)).collect())
                    .collect(),
                loads: inst
                    .loads
                    .iter()
                    .map(|l| BusLoad {
                        bus: l.bus,
                        p: l.p.iter().map(|v| (v * ml).max(0.0)).collect(),
                        q: l.q.iter().map(|v| (v * ml).max(0.0)).collect(),
                    })
                    .collect(),
                rt_sell: rt_buy.iter().map(|b| b * ratio).collect(),
                rt_buy,
            }
        })
        .collect();
    Ok(ScenarioSet { scenarios })
}

/// Seven-point multi-uncertainty set around the instance's forecasts.
pub fn multi_uncertainty(
    inst: &Instance,
    price_sigma: f64,
    load_sigma: f64,
    reag_sigma: f64,
) -> Result<ScenarioSet> {
    let (base_buy, _) = base_rt_prices(inst);
    let reag_mean = inst
        .reag
        .first()
        .map(|r| r.p_forecast_max.clone())
        .unwrap_or_else(|| vec![0.0; inst.hours()]);
    let load_mean: Vec<f64> = (0..inst.hours())
        .map(|t| inst.loads.iter().map(|l| l.p[t]).sum())
        .collect();
    let reag = seven_point_normal(&reag_mean, reag_sigma, -1)?;
    let load = seven_point_normal(&load_mean, load_sigma, 1)?;
    let price = seven_point_normal(&base_buy, price_sigma, 1)?;
    compose_joint(inst, &reag, &load, &price)
}
