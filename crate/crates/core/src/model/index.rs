//! Dense column numbering for every decision variable.
//!
//! First-stage columns are numbered hour by hour, and within an hour in the
//! order substation, DRAG, ESAG, EVCS, DDGAG, REAG, network. The per-station
//! EVCS commitment binaries follow the hourly block. Second-stage columns come
//! last, scenario-major, then hour, then kind.
//!
//! Column count: per hour `4 + sum_drag(blocks + 2) + 11*|ESAG| + 3*|EVCS| +
//! 3*|DDGAG| + |REAG| + 2*|J| + |N|`, plus `|EVCS|`, plus per scenario and hour
//! `3 + |REAG| + 2*|J| + |N|`.

use std::fmt;

use crate::instance::Instance;
use crate::scenario::ScenarioSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    SubP,
    SubQ,
    SubRegUp,
    SubRegDn,
    DragBlock,
    DragRegUp,
    DragRegDn,
    EsagEnergy,
    EsagP,
    EsagCh,
    EsagDi,
    EsagRegUp,
    EsagRegDn,
    EsagRegUpDi,
    EsagRegDnDi,
    EsagRegUpCh,
    EsagRegDnCh,
    EsagMode,
    EvcsP,
    EvcsRegUp,
    EvcsRegDn,
    EvcsCommit,
    DdgP,
    DdgRegUp,
    DdgRegDn,
    ReagP,
    FlowP,
    FlowQ,
    Voltage,
    RtBuy,
    RtSell,
    RtSubQ,
    Spill,
    RtFlowP,
    RtFlowQ,
    RtVoltage,
}

impl VarKind {
    pub fn code(self) -> &'static str {
        use VarKind::*;
        match self {
            SubP => "psub",
            SubQ => "qsub",
            SubRegUp => "rsubup",
            SubRegDn => "rsubdn",
            DragBlock => "pblock",
            DragRegUp => "rdragup",
            DragRegDn => "rdragdn",
            EsagEnergy => "esoc",
            EsagP => "pesag",
            EsagCh => "pch",
            EsagDi => "pdi",
            EsagRegUp => "resagup",
            EsagRegDn => "resagdn",
            EsagRegUpDi => "rupdi",
            EsagRegDnDi => "rdndi",
            EsagRegUpCh => "rupch",
            EsagRegDnCh => "rdnch",
            EsagMode => "besag",
            EvcsP => "pevcs",
            EvcsRegUp => "revcsup",
            EvcsRegDn => "revcsdn",
            EvcsCommit => "bevcs",
            DdgP => "pddg",
            DdgRegUp => "rddgup",
            DdgRegDn => "rddgdn",
            ReagP => "preag",
            FlowP => "pl",
            FlowQ => "ql",
            Voltage => "v",
            RtBuy => "prtbuy",
            RtSell => "prtsell",
            RtSubQ => "qsubrt",
            Spill => "pspill",
            RtFlowP => "plrt",
            RtFlowQ => "qlrt",
            RtVoltage => "vrt",
        }
    }

    pub fn is_second_stage(self) -> bool {
        use VarKind::*;
        matches!(self, RtBuy | RtSell | RtSubQ | Spill | RtFlowP | RtFlowQ | RtVoltage)
    }
}

/// Identity of one column: kind, owner id (aggregator, bus or branch; 0 for the
/// substation), demand block, hour label (0 for horizon-wide columns) and scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarKey {
    pub kind: VarKind,
    pub owner: u32,
    pub block: Option<u32>,
    pub hour: u32,
    pub scenario: Option<u32>,
}

impl VarKey {
    /// Column name in exchange files: `kind_owner_t[_w]`.
    pub fn name(&self) -> String {
        let owner = match self.block {
            Some(a) => format!("{}b{}", self.owner, a),
            None => self.owner.to_string(),
        };
        match self.scenario {
            Some(w) => format!("{}_{}_{}_{}", self.kind.code(), owner, self.hour, w),
            None => format!("{}_{}_{}", self.kind.code(), owner, self.hour),
        }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Column with bounds and integrality. Costs are set by the objective builder.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSpec {
    pub key: VarKey,
    pub lo: f64,
    pub hi: f64,
    pub binary: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SubstationCols {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub r_up: Vec<usize>,
    pub r_dn: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DragCols {
    /// `[block][t]`
    pub blocks: Vec<Vec<usize>>,
    pub r_up: Vec<usize>,
    pub r_dn: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EsagCols {
    pub energy: Vec<usize>,
    pub p: Vec<usize>,
    pub p_ch: Vec<usize>,
    pub p_di: Vec<usize>,
    pub r_up: Vec<usize>,
    pub r_dn: Vec<usize>,
    pub r_up_di: Vec<usize>,
    pub r_dn_di: Vec<usize>,
    pub r_up_ch: Vec<usize>,
    pub r_dn_ch: Vec<usize>,
    pub mode: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvcsCols {
    pub p: Vec<usize>,
    pub r_up: Vec<usize>,
    pub r_dn: Vec<usize>,
    pub commit: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DdgCols {
    pub p: Vec<usize>,
    pub r_up: Vec<usize>,
    pub r_dn: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NetworkCols {
    /// `[branch][t]`
    pub pl: Vec<Vec<usize>>,
    pub ql: Vec<Vec<usize>>,
    /// `[bus][t]`
    pub v: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioCols {
    pub buy: Vec<usize>,
    pub sell: Vec<usize>,
    pub q_sub: Vec<usize>,
    /// `[reag][t]`
    pub spill: Vec<Vec<usize>>,
    pub net: NetworkCols,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VariableIndex {
    pub substation: SubstationCols,
    pub drag: Vec<DragCols>,
    pub esag: Vec<EsagCols>,
    pub evcs: Vec<EvcsCols>,
    pub ddgag: Vec<DdgCols>,
    pub reag: Vec<Vec<usize>>,
    pub network: NetworkCols,
    pub scenarios: Vec<ScenarioCols>,
    pub columns: Vec<ColumnSpec>,
    /// Number of first-stage columns; they occupy ids `0..first_stage`.
    pub first_stage: usize,
}

impl VariableIndex {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn binaries(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&j| self.columns[j].binary)
            .collect()
    }

    pub fn key(&self, col: usize) -> VarKey {
        self.columns[col].key
    }

    fn add(&mut self, kind: VarKind, owner: u32, block: Option<u32>, hour: u32, scenario: Option<u32>, lo: f64, hi: f64) -> usize {
        let id = self.columns.len();
        self.columns.push(ColumnSpec {
            key: VarKey {
                kind,
                owner,
                block,
                hour,
                scenario,
            },
            lo,
            hi,
            binary: false,
        });
        id
    }

    fn add_binary(&mut self, kind: VarKind, owner: u32, hour: u32) -> usize {
        let id = self.add(kind, owner, None, hour, None, 0.0, 1.0);
        self.columns[id].binary = true;
        id
    }
}

const INF: f64 = f64::INFINITY;

fn net_columns(
    idx: &mut VariableIndex,
    net: &mut NetworkCols,
    inst: &Instance,
    hour: u32,
    scenario: Option<u32>,
) {
    let (kp, kq, kv) = if scenario.is_some() {
        (VarKind::RtFlowP, VarKind::RtFlowQ, VarKind::RtVoltage)
    } else {
        (VarKind::FlowP, VarKind::FlowQ, VarKind::Voltage)
    };
    let n = &inst.network;
    for (j, br) in n.branches.iter().enumerate() {
        let c = idx.add(kp, br.id, None, hour, scenario, -br.pl_max, br.pl_max);
        net.pl[j].push(c);
    }
    for (j, br) in n.branches.iter().enumerate() {
        let c = idx.add(kq, br.id, None, hour, scenario, -br.ql_max, br.ql_max);
        net.ql[j].push(c);
    }
    for (b, &bus) in n.buses.iter().enumerate() {
        let (lo, hi) = if bus == n.substation_bus {
            (1.0, 1.0)
        } else {
            (n.v_min, n.v_max)
        };
        let c = idx.add(kv, bus, None, hour, scenario, lo, hi);
        net.v[b].push(c);
    }
}

fn empty_net(inst: &Instance) -> NetworkCols {
    NetworkCols {
        pl: vec![Vec::new(); inst.network.branches.len()],
        ql: vec![Vec::new(); inst.network.branches.len()],
        v: vec![Vec::new(); inst.network.buses.len()],
    }
}

/// Allocates every column of the two-stage model with its bounds.
pub fn index_variables(inst: &Instance, scen: &ScenarioSet) -> VariableIndex {
    use VarKind::*;
    let mut idx = VariableIndex {
        drag: inst
            .drag
            .iter()
            .map(|d| DragCols {
                blocks: vec![Vec::new(); d.blocks.len()],
                ..Default::default()
            })
            .collect(),
        esag: vec![EsagCols::default(); inst.esag.len()],
        evcs: vec![EvcsCols::default(); inst.evcs.len()],
        ddgag: vec![DdgCols::default(); inst.ddgag.len()],
        reag: vec![Vec::new(); inst.reag.len()],
        network: empty_net(inst),
        ..Default::default()
    };

    for (t, &hour) in inst.horizon.hours.iter().enumerate() {
        let c = idx.add(SubP, 0, None, hour, None, -INF, INF);
        idx.substation.p.push(c);
        let c = idx.add(SubQ, 0, None, hour, None, -INF, INF);
        idx.substation.q.push(c);
        let c = idx.add(SubRegUp, 0, None, hour, None, 0.0, INF);
        idx.substation.r_up.push(c);
        let c = idx.add(SubRegDn, 0, None, hour, None, 0.0, INF);
        idx.substation.r_dn.push(c);

        for (k, d) in inst.drag.iter().enumerate() {
            for (a, b) in d.blocks.iter().enumerate() {
                let c = idx.add(DragBlock, d.id, Some(a as u32 + 1), hour, None, 0.0, b.p_max);
                idx.drag[k].blocks[a].push(c);
            }
            let c = idx.add(DragRegUp, d.id, None, hour, None, 0.0, d.r_up_max);
            idx.drag[k].r_up.push(c);
            let c = idx.add(DragRegDn, d.id, None, hour, None, 0.0, d.r_dn_max);
            idx.drag[k].r_dn.push(c);
        }

        for (k, e) in inst.esag.iter().enumerate() {
            let cols = [
                (EsagEnergy, e.e_min, e.e_max),
                (EsagP, -INF, INF),
                (EsagCh, 0.0, e.cr_max),
                (EsagDi, 0.0, e.dr_max),
                (EsagRegUp, 0.0, INF),
                (EsagRegDn, 0.0, INF),
                (EsagRegUpDi, 0.0, e.dr_max),
                (EsagRegDnDi, 0.0, e.dr_max),
                (EsagRegUpCh, 0.0, e.cr_max),
                (EsagRegDnCh, 0.0, e.cr_max),
            ];
            let ids: Vec<usize> = cols
                .iter()
                .map(|&(kind, lo, hi)| idx.add(kind, e.id, None, hour, None, lo, hi))
                .collect();
            let b = idx.add_binary(EsagMode, e.id, hour);
            let ec = &mut idx.esag[k];
            ec.energy.push(ids[0]);
            ec.p.push(ids[1]);
            ec.p_ch.push(ids[2]);
            ec.p_di.push(ids[3]);
            ec.r_up.push(ids[4]);
            ec.r_dn.push(ids[5]);
            ec.r_up_di.push(ids[6]);
            ec.r_dn_di.push(ids[7]);
            ec.r_up_ch.push(ids[8]);
            ec.r_dn_ch.push(ids[9]);
            ec.mode.push(b);
        }

        for (k, ev) in inst.evcs.iter().enumerate() {
            let active = ev.window.contains(&hour);
            let (p_hi, r_hi) = if active { (ev.er_max, ev.err_max) } else { (0.0, 0.0) };
            let c = idx.add(EvcsP, ev.id, None, hour, None, 0.0, p_hi);
            idx.evcs[k].p.push(c);
            let c = idx.add(EvcsRegUp, ev.id, None, hour, None, 0.0, r_hi);
            idx.evcs[k].r_up.push(c);
            let c = idx.add(EvcsRegDn, ev.id, None, hour, None, 0.0, r_hi);
            idx.evcs[k].r_dn.push(c);
        }

        for (k, g) in inst.ddgag.iter().enumerate() {
            let c = idx.add(DdgP, g.id, None, hour, None, 0.0, g.p_max);
            idx.ddgag[k].p.push(c);
            let c = idx.add(DdgRegUp, g.id, None, hour, None, 0.0, g.ru);
            idx.ddgag[k].r_up.push(c);
            let c = idx.add(DdgRegDn, g.id, None, hour, None, 0.0, g.rd);
            idx.ddgag[k].r_dn.push(c);
        }

        for (k, r) in inst.reag.iter().enumerate() {
            let c = idx.add(ReagP, r.id, None, hour, None, 0.0, r.p_forecast_max[t]);
            idx.reag[k].push(c);
        }

        let mut net = std::mem::take(&mut idx.network);
        net_columns(&mut idx, &mut net, inst, hour, None);
        idx.network = net;
    }

    for (k, ev) in inst.evcs.iter().enumerate() {
        idx.evcs[k].commit = idx.add_binary(EvcsCommit, ev.id, 0);
    }
    idx.first_stage = idx.columns.len();

    for s in scen.iter() {
        let w = Some(s.id);
        let mut sc = ScenarioCols {
            spill: vec![Vec::new(); inst.reag.len()],
            net: empty_net(inst),
            ..Default::default()
        };
        for (t, &hour) in inst.horizon.hours.iter().enumerate() {
            sc.buy.push(idx.add(RtBuy, 0, None, hour, w, 0.0, INF));
            let sell_hi = if inst.flags.rt_sell_allowed { INF } else { 0.0 };
            sc.sell.push(idx.add(RtSell, 0, None, hour, w, 0.0, sell_hi));
            sc.q_sub.push(idx.add(RtSubQ, 0, None, hour, w, -INF, INF));
            for (k, r) in inst.reag.iter().enumerate() {
                sc.spill[k].push(idx.add(Spill, r.id, None, hour, w, 0.0, s.reag[k][t]));
            }
            net_columns(&mut idx, &mut sc.net, inst, hour, w);
        }
        idx.scenarios.push(sc);
    }
    idx
}
