//! The five-bus case study network with one aggregator of each kind.
//!
//! Parameters stated by the case study are recorded as `paper` in the provenance
//! log; everything else (placements, line data, price series, offer prices,
//! EVCS capacity, power factors) is a documented default.

use std::fmt;
use std::str::FromStr;

use super::types::*;
use crate::scenario::{self, ScenarioSet};

/// Which second-stage uncertainty the built-in case carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseMode {
    Deterministic,
    SingleUncertainty,
    MultiUncertainty,
}

impl CaseMode {
    pub const ALL: [CaseMode; 3] = [
        CaseMode::Deterministic,
        CaseMode::SingleUncertainty,
        CaseMode::MultiUncertainty,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseMode::Deterministic => "deterministic",
            CaseMode::SingleUncertainty => "single-uncertainty",
            CaseMode::MultiUncertainty => "multi-uncertainty",
        }
    }
}

impl fmt::Display for CaseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown case mode `{s}`"))
    }
}

/// Renewable production table of the single-uncertainty case: (MW, probability).
pub const REAG_TABLE: [(f64, f64); 5] = [(1.0, 0.1), (1.5, 0.1), (3.0, 0.6), (2.0, 0.1), (2.5, 0.1)];

/// Standard deviations (fraction of mean) of real-time price, load and renewable production.
pub const MULTI_SIGMA: (f64, f64, f64) = (0.05, 0.15, 0.08);

pub const MULTI_SELL_RATIO: f64 = 0.8;
pub const SINGLE_RT_PREMIUM: f64 = 2.0;

/// Synthetic day-ahead energy price curve, $/MWh.
pub const DA_ENERGY: [f64; 24] = [
    28.5, 26.9, 25.8, 25.2, 25.6, 27.4, 31.8, 36.5, 40.2, 42.7, 44.1, 45.8, 46.9, 47.5, 48.8,
    51.6, 56.3, 62.4, 66.8, 61.2, 53.7, 45.1, 37.9, 32.4,
];

/// tan(phi) at power factor 0.95.
pub fn tan_phi_pf095() -> f64 {
    (1.0f64 - 0.95 * 0.95).sqrt() / 0.95
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// The deterministic five-bus instance with default flags.
pub fn base_instance() -> Instance {
    let hours = 24;
    let tan_phi = tan_phi_pf095();
    let da = DA_ENERGY.to_vec();
    let prices = PriceData {
        cap_up: da.iter().map(|p| round2(0.22 * p)).collect(),
        cap_dn: da.iter().map(|p| round2(0.16 * p)).collect(),
        mil_up: vec![1.0; hours],
        mil_dn: vec![0.8; hours],
        s_up: vec![1.0; hours],
        s_dn: vec![1.0; hours],
        mu_up: vec![0.9; hours],
        mu_dn: vec![0.9; hours],
        da_energy: da,
    };
    let branches = (1..=4)
        .map(|j| Branch {
            id: j,
            from: j,
            to: j + 1,
            r: 0.01,
            x: 0.02,
            pl_max: 40.0,
            ql_max: 40.0,
        })
        .collect();
    let network = Network {
        buses: vec![1, 2, 3, 4, 5],
        substation_bus: 1,
        v_min: 0.95,
        v_max: 1.05,
        s_base: 100.0,
        branches,
    };
    let drag = DragSpec {
        id: 1,
        bus: 2,
        r_up_max: 1.0,
        r_dn_max: 1.0,
        tan_phi,
        regulation: RegulationOffer::flat(hours, 3.0, 3.0, 0.2, 0.2),
        blocks: [80.0, 24.0, 12.0]
            .iter()
            .map(|&bid| DemandBlock {
                p_max: 10.0,
                bid: vec![bid; hours],
            })
            .collect(),
    };
    let esag = EsagSpec {
        id: 2,
        bus: 3,
        e_min: 2.0,
        e_max: 10.0,
        e_init: 8.0,
        cr_max: 5.0,
        dr_max: 5.0,
        eta_ch: 1.0,
        eta_di: 1.0,
        energy_price: vec![42.0; hours],
        regulation: RegulationOffer::flat(hours, 4.0, 3.0, 0.3, 0.3),
    };
    let evcs = EvcsSpec {
        id: 3,
        bus: 4,
        er_max: 5.0,
        err_max: 0.5,
        cl_max: 20.0,
        e_init: 2.0,
        gamma_ch: 1.0,
        window: (16..=24).collect(),
        energy_price: vec![70.0; hours],
        regulation: RegulationOffer::flat(hours, 4.0, 3.0, 0.3, 0.3),
    };
    let ddgag = DdgagSpec {
        id: 4,
        bus: 5,
        p_min: 0.0,
        p_max: 5.0,
        ru: 1.0,
        rd: 1.0,
        tan_phi,
        energy_price: vec![38.0; hours],
        regulation: RegulationOffer::flat(hours, 5.0, 4.0, 0.4, 0.4),
    };
    let reag = ReagSpec {
        id: 5,
        bus: 4,
        p_forecast_max: vec![3.0; hours],
        energy_price: vec![20.0; hours],
    };
    let loads = vec![BusLoad {
        bus: 5,
        p: vec![3.0; hours],
        q: vec![3.0 * tan_phi; hours],
    }];

    let mut provenance = Provenance::default();
    for key in [
        "horizon.hours",
        "network.buses",
        "network.branches.count",
        "drag[0].blocks.p_max",
        "drag[0].r_up_max",
        "drag[0].r_dn_max",
        "esag[0].e_min",
        "esag[0].e_max",
        "esag[0].e_init",
        "esag[0].cr_max",
        "esag[0].dr_max",
        "esag[0].eta_ch",
        "esag[0].eta_di",
        "evcs[0].er_max",
        "evcs[0].err_max",
        "evcs[0].e_init",
        "evcs[0].window",
        "ddgag[0].p_min",
        "ddgag[0].p_max",
        "ddgag[0].ru",
        "ddgag[0].rd",
        "reag[0].p_forecast_max",
        "loads[0].bus",
        "loads[0].p",
    ] {
        provenance.record(key, Source::Paper);
    }
    for key in [
        "network.substation_bus",
        "network.branches.r",
        "network.branches.x",
        "network.branches.pl_max",
        "network.branches.ql_max",
        "network.branches.topology",
        "network.v_min",
        "network.v_max",
        "network.s_base",
        "prices.da_energy",
        "prices.cap_up",
        "prices.cap_dn",
        "prices.mil_up",
        "prices.mil_dn",
        "prices.s_up",
        "prices.s_dn",
        "prices.mu_up",
        "prices.mu_dn",
        "drag[0].bus",
        "drag[0].blocks.count",
        "drag[0].blocks.bid",
        "drag[0].tan_phi",
        "drag[0].regulation",
        "esag[0].bus",
        "esag[0].energy_price",
        "esag[0].regulation",
        "evcs[0].bus",
        "evcs[0].cl_max",
        "evcs[0].gamma_ch",
        "evcs[0].energy_price",
        "evcs[0].regulation",
        "ddgag[0].bus",
        "ddgag[0].tan_phi",
        "ddgag[0].energy_price",
        "ddgag[0].regulation",
        "reag[0].bus",
        "reag[0].energy_price",
        "loads[0].q",
        "flags.evcs_eq23_strict",
    ] {
        provenance.record(key, Source::Default);
    }

    Instance {
        horizon: TimeHorizon {
            hours: (1..=24).collect(),
        },
        network,
        prices,
        flags: Flags::default(),
        loads,
        drag: vec![drag],
        esag: vec![esag],
        evcs: vec![evcs],
        ddgag: vec![ddgag],
        reag: vec![reag],
        provenance,
    }
}

/// Applies the mode's real-time market flags to an instance.
pub fn apply_mode_flags(inst: &mut Instance, mode: CaseMode) {
    let f = &mut inst.flags;
    let p = &mut inst.provenance;
    match mode {
        CaseMode::Deterministic => {
            f.rt_sell_allowed = true;
            f.rt_premium = 0.0;
            f.rt_sell_ratio = 1.0;
            p.record("flags.rt_sell_allowed", Source::Default);
            p.record("flags.rt_premium", Source::Default);
            p.record("flags.rt_sell_ratio", Source::Default);
        }
        CaseMode::SingleUncertainty => {
            f.rt_sell_allowed = false;
            f.rt_premium = SINGLE_RT_PREMIUM;
            f.rt_sell_ratio = 1.0;
            p.record("flags.rt_sell_allowed", Source::Paper);
            p.record("flags.rt_premium", Source::Paper);
            p.record("flags.rt_sell_ratio", Source::Default);
        }
        CaseMode::MultiUncertainty => {
            f.rt_sell_allowed = true;
            f.rt_premium = 0.0;
            f.rt_sell_ratio = MULTI_SELL_RATIO;
            p.record("flags.rt_sell_allowed", Source::Paper);
            p.record("flags.rt_premium", Source::Default);
            p.record("flags.rt_sell_ratio", Source::Paper);
        }
    }
}

/// Scenario set the built-in case uses for `mode`.
pub fn mode_scenarios(inst: &Instance, mode: CaseMode) -> ScenarioSet {
    match mode {
        CaseMode::Deterministic => scenario::forecast_scenario(inst),
        CaseMode::SingleUncertainty => scenario::discrete_reag_scenarios(inst, &REAG_TABLE)
            .expect("built-in scenario table is valid"),
        CaseMode::MultiUncertainty => {
            let (price, load, reag) = MULTI_SIGMA;
            scenario::multi_uncertainty(inst, price, load, reag)
                .expect("built-in quantization is valid")
        }
    }
}

/// The five-bus case together with the scenario set for `mode`.
pub fn builtin_case(mode: CaseMode) -> (Instance, ScenarioSet) {
    let mut inst = base_instance();
    apply_mode_flags(&mut inst, mode);
    let scen = mode_scenarios(&inst, mode);
    (inst, scen)
}
