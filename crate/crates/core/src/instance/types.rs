use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Ordered operating hours and their count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeHorizon {
    pub hours: Vec<u32>,
}

impl TimeHorizon {
    pub fn len(&self) -> usize {
        self.hours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hours.is_empty()
    }

    /// Position of an hour label within the horizon.
    pub fn position(&self, hour: u32) -> Option<usize> {
        self.hours.iter().position(|&h| h == hour)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    /// Series resistance, per-unit.
    pub r: f64,
    /// Series reactance, per-unit.
    pub x: f64,
    /// Active flow limit, MW.
    pub pl_max: f64,
    /// Reactive flow limit, MVAr.
    pub ql_max: f64,
}

/// Radial distribution feeder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub buses: Vec<u32>,
    pub substation_bus: u32,
    pub v_min: f64,
    pub v_max: f64,
    /// System power base in MVA used to convert MW flows into per-unit voltage drops.
    pub s_base: f64,
    pub branches: Vec<Branch>,
}

impl Network {
    pub fn bus_position(&self, bus: u32) -> Option<usize> {
        self.buses.iter().position(|&b| b == bus)
    }

    pub fn substation_position(&self) -> Option<usize> {
        self.bus_position(self.substation_bus)
    }

    /// Signed branch-bus incidence: +1 at the sending bus, -1 at the receiving bus.
    pub fn incidence(&self, branch: usize, bus: u32) -> f64 {
        let b = &self.branches[branch];
        if b.from == bus {
            1.0
        } else if b.to == bus {
            -1.0
        } else {
            0.0
        }
    }

    /// Connecting-nodes relation: true when a branch runs from `n` to `m`.
    pub fn adjacency(&self, m: u32, n: u32) -> bool {
        self.branches.iter().any(|b| b.from == n && b.to == m)
    }

    /// Number of buses reachable from the first bus through branches.
    pub(crate) fn reachable_count(&self) -> usize {
        let Some(&start) = self.buses.first() else {
            return 0;
        };
        let mut seen = vec![start];
        let mut stack = vec![start];
        while let Some(bus) = stack.pop() {
            for br in &self.branches {
                let next = if br.from == bus {
                    br.to
                } else if br.to == bus {
                    br.from
                } else {
                    continue;
                };
                if self.buses.contains(&next) && !seen.contains(&next) {
                    seen.push(next);
                    stack.push(next);
                }
            }
        }
        seen.len()
    }
}

/// Offer prices for regulation capacity ($/MW) and mileage ($/MW-mile), one entry per hour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulationOffer {
    pub cap_up: Vec<f64>,
    pub cap_dn: Vec<f64>,
    pub mil_up: Vec<f64>,
    pub mil_dn: Vec<f64>,
}

impl RegulationOffer {
    pub fn flat(hours: usize, cap_up: f64, cap_dn: f64, mil_up: f64, mil_dn: f64) -> Self {
        Self {
            cap_up: vec![cap_up; hours],
            cap_dn: vec![cap_dn; hours],
            mil_up: vec![mil_up; hours],
            mil_dn: vec![mil_dn; hours],
        }
    }

    pub(crate) fn series(&self) -> [(&'static str, &Vec<f64>); 4] {
        [
            ("cap_up", &self.cap_up),
            ("cap_dn", &self.cap_dn),
            ("mil_up", &self.mil_up),
            ("mil_dn", &self.mil_dn),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandBlock {
    /// Block size, MW.
    pub p_max: f64,
    /// Bid price per hour, $/MWh.
    pub bid: Vec<f64>,
}

/// Demand-response aggregator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragSpec {
    pub id: u32,
    pub bus: u32,
    pub r_up_max: f64,
    pub r_dn_max: f64,
    pub tan_phi: f64,
    pub regulation: RegulationOffer,
    pub blocks: Vec<DemandBlock>,
}

impl DragSpec {
    pub fn total_p_max(&self) -> f64 {
        self.blocks.iter().map(|b| b.p_max).sum()
    }
}

/// Energy-storage aggregator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsagSpec {
    pub id: u32,
    pub bus: u32,
    pub e_min: f64,
    pub e_max: f64,
    pub e_init: f64,
    pub cr_max: f64,
    pub dr_max: f64,
    pub eta_ch: f64,
    pub eta_di: f64,
    pub energy_price: Vec<f64>,
    pub regulation: RegulationOffer,
}

/// EV charging station aggregator. Charging only, available on `window` hours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvcsSpec {
    pub id: u32,
    pub bus: u32,
    pub er_max: f64,
    pub err_max: f64,
    pub cl_max: f64,
    pub e_init: f64,
    pub gamma_ch: f64,
    pub window: Vec<u32>,
    pub energy_price: Vec<f64>,
    pub regulation: RegulationOffer,
}

/// Dispatchable distributed-generation aggregator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdgagSpec {
    pub id: u32,
    pub bus: u32,
    pub p_min: f64,
    pub p_max: f64,
    pub ru: f64,
    pub rd: f64,
    pub tan_phi: f64,
    pub energy_price: Vec<f64>,
    pub regulation: RegulationOffer,
}

/// Renewable-energy aggregator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReagSpec {
    pub id: u32,
    pub bus: u32,
    /// Day-ahead schedulable cap per hour, MW.
    pub p_forecast_max: Vec<f64>,
    pub energy_price: Vec<f64>,
}

/// Wholesale price and regulation performance series, one entry per hour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceData {
    pub da_energy: Vec<f64>,
    pub cap_up: Vec<f64>,
    pub cap_dn: Vec<f64>,
    pub mil_up: Vec<f64>,
    pub mil_dn: Vec<f64>,
    pub s_up: Vec<f64>,
    pub s_dn: Vec<f64>,
    pub mu_up: Vec<f64>,
    pub mu_dn: Vec<f64>,
}

impl PriceData {
    pub(crate) fn series(&self) -> [(&'static str, &Vec<f64>); 9] {
        [
            ("da_energy", &self.da_energy),
            ("cap_up", &self.cap_up),
            ("cap_dn", &self.cap_dn),
            ("mil_up", &self.mil_up),
            ("mil_dn", &self.mil_dn),
            ("s_up", &self.s_up),
            ("s_dn", &self.s_dn),
            ("mu_up", &self.mu_up),
            ("mu_dn", &self.mu_dn),
        ]
    }

    /// Wholesale regulation-up value per MW: capacity plus expected mileage payment.
    pub fn reg_up_value(&self, t: usize) -> f64 {
        self.cap_up[t] + self.s_up[t] * self.mu_up[t] * self.mil_up[t]
    }

    pub fn reg_dn_value(&self, t: usize) -> f64 {
        self.cap_dn[t] + self.s_dn[t] * self.mu_dn[t] * self.mil_dn[t]
    }
}

/// Inelastic load at one bus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusLoad {
    pub bus: u32,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Active and reactive load at `bus` and hour position `t`, zero when no entry exists.
pub fn load_at(loads: &[BusLoad], bus: u32, t: usize) -> (f64, f64) {
    loads
        .iter()
        .filter(|l| l.bus == bus)
        .fold((0.0, 0.0), |(p, q), l| (p + l.p[t], q + l.q[t]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Whether the DSO may sell to the wholesale real-time market.
    pub rt_sell_allowed: bool,
    /// Real-time buy price premium over day-ahead, $/MWh.
    pub rt_premium: f64,
    /// Real-time sell price as a fraction of the real-time buy price.
    pub rt_sell_ratio: f64,
    /// EVCS terminal-energy row: `true` scales `E_init * b` by the charging
    /// efficiency together with the charging sum.
    pub evcs_eq23_strict: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Self {
            rt_sell_allowed: true,
            rt_premium: 0.0,
            rt_sell_ratio: 1.0,
            evcs_eq23_strict: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Value stated by the source case study.
    Paper,
    /// Filled-in default.
    Default,
    /// Provided explicitly in an instance file.
    File,
}

/// Where each parameter came from, keyed by field path.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Provenance(pub BTreeMap<String, Source>);

impl Provenance {
    pub fn record(&mut self, path: impl Into<String>, source: Source) {
        self.0.insert(path.into(), source);
    }

    pub fn get(&self, path: &str) -> Option<Source> {
        self.0.get(path).copied()
    }

    pub fn with_source(&self, source: Source) -> impl Iterator<Item = &str> {
        self.0
            .iter()
            .filter(move |(_, s)| **s == source)
            .map(|(k, _)| k.as_str())
    }
}

/// Full deterministic problem description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub horizon: TimeHorizon,
    pub network: Network,
    pub prices: PriceData,
    pub flags: Flags,
    #[serde(default)]
    pub loads: Vec<BusLoad>,
    #[serde(default)]
    pub drag: Vec<DragSpec>,
    #[serde(default)]
    pub esag: Vec<EsagSpec>,
    #[serde(default)]
    pub evcs: Vec<EvcsSpec>,
    #[serde(default)]
    pub ddgag: Vec<DdgagSpec>,
    #[serde(default)]
    pub reag: Vec<ReagSpec>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Instance {
    pub fn hours(&self) -> usize {
        self.horizon.len()
    }

    /// Inelastic load at a bus and hour position.
    pub fn load(&self, bus: u32, t: usize) -> (f64, f64) {
        load_at(&self.loads, bus, t)
    }

    /// Keeps the first `hours` hours. EVCS windows keep their offset from the end
    /// of the horizon, clipped to the new length.
    pub fn truncated(&self, hours: usize) -> Instance {
        let n = hours.min(self.hours());
        let cut = |v: &Vec<f64>| v[..n].to_vec();
        let cut_reg = |r: &RegulationOffer| RegulationOffer {
            cap_up: cut(&r.cap_up),
            cap_dn: cut(&r.cap_dn),
            mil_up: cut(&r.mil_up),
            mil_dn: cut(&r.mil_dn),
        };
        let mut out = self.clone();
        out.horizon.hours.truncate(n);
        let p = &self.prices;
        out.prices = PriceData {
            da_energy: cut(&p.da_energy),
            cap_up: cut(&p.cap_up),
            cap_dn: cut(&p.cap_dn),
            mil_up: cut(&p.mil_up),
            mil_dn: cut(&p.mil_dn),
            s_up: cut(&p.s_up),
            s_dn: cut(&p.s_dn),
            mu_up: cut(&p.mu_up),
            mu_dn: cut(&p.mu_dn),
        };
        for l in &mut out.loads {
            l.p.truncate(n);
            l.q.truncate(n);
        }
        for d in &mut out.drag {
            d.regulation = cut_reg(&d.regulation);
            for b in &mut d.blocks {
                b.bid.truncate(n);
            }
        }
        for e in &mut out.esag {
            e.energy_price.truncate(n);
            e.regulation = cut_reg(&e.regulation);
        }
        let old_end = self.horizon.hours.last().copied();
        for ev in &mut out.evcs {
            ev.energy_price.truncate(n);
            ev.regulation = cut_reg(&ev.regulation);
            if let (Some(old_end), true) = (old_end, n > 0) {
                let len = ev.window.len().min(n);
                let offset = ev
                    .window
                    .last()
                    .map(|&w| old_end.saturating_sub(w) as usize)
                    .unwrap_or(0)
                    .min(n - len);
                let end = n - 1 - offset;
                ev.window = out.horizon.hours[end + 1 - len..=end].to_vec();
            }
        }
        for g in &mut out.ddgag {
            g.energy_price.truncate(n);
            g.regulation = cut_reg(&g.regulation);
        }
        for r in &mut out.reag {
            r.p_forecast_max.truncate(n);
            r.energy_price.truncate(n);
        }
        out
    }
}
