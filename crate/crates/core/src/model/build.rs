//! Objective and constraint builders. Each builder is pure: it reads the
//! instance and the column index and appends tagged rows.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scenario::ScenarioSet;

use super::index::VariableIndex;
use super::tag::{ConstraintTag, Family};
use super::{Row, Sense};

/// Appends rows, merging repeated columns and dropping exact zeros.
#[derive(Debug, Default)]
pub struct RowSink {
    pub rows: Vec<Row>,
}

impl RowSink {
    pub fn push(&mut self, tag: ConstraintTag, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        let mut terms = terms;
        terms.sort_by_key(|&(c, _)| c);
        let mut coefs: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (c, v) in terms {
            match coefs.last_mut() {
                Some((last, acc)) if *last == c => *acc += v,
                _ => coefs.push((c, v)),
            }
        }
        coefs.retain(|&(_, v)| v != 0.0);
        self.rows.push(Row {
            tag,
            coefs,
            sense,
            rhs,
        });
    }
}

/// Objective coefficients of the DSO's expected cost.
pub fn build_objective(inst: &Instance, scen: &ScenarioSet, idx: &VariableIndex) -> Result<Vec<f64>> {
    let hours = inst.hours();
    let pr = &inst.prices;
    for (name, s) in pr.series() {
        if s.len() < hours {
            return Err(Error::MissingPrice(format!("prices.{name}")));
        }
    }
    let mut c = vec![0.0; idx.len()];
    for t in 0..hours {
        c[idx.substation.p[t]] = pr.da_energy[t];
        c[idx.substation.r_up[t]] = -pr.reg_up_value(t);
        c[idx.substation.r_dn[t]] = -pr.reg_dn_value(t);
    }

    let up = |off: &crate::instance::RegulationOffer, t: usize| {
        off.cap_up[t] + pr.s_up[t] * pr.mu_up[t] * off.mil_up[t]
    };
    let dn = |off: &crate::instance::RegulationOffer, t: usize| {
        off.cap_dn[t] + pr.s_dn[t] * pr.mu_dn[t] * off.mil_dn[t]
    };
    let check = |what: &str, id: u32, off: &crate::instance::RegulationOffer| -> Result<()> {
        for (name, s) in off.series() {
            if s.len() < hours {
                return Err(Error::MissingPrice(format!("{what} {id} regulation.{name}")));
            }
        }
        Ok(())
    };

    for (k, d) in inst.drag.iter().enumerate() {
        check("DRAG", d.id, &d.regulation)?;
        for (a, b) in d.blocks.iter().enumerate() {
            if b.bid.len() < hours {
                return Err(Error::MissingPrice(format!("DRAG {} block {} bid", d.id, a + 1)));
            }
            for t in 0..hours {
                c[idx.drag[k].blocks[a][t]] = -b.bid[t];
            }
        }
        for t in 0..hours {
            c[idx.drag[k].r_up[t]] = up(&d.regulation, t);
            c[idx.drag[k].r_dn[t]] = dn(&d.regulation, t);
        }
    }
    for (k, e) in inst.esag.iter().enumerate() {
        check("ESAG", e.id, &e.regulation)?;
        if e.energy_price.len() < hours {
            return Err(Error::MissingPrice(format!("ESAG {} energy_price", e.id)));
        }
        for t in 0..hours {
            c[idx.esag[k].p[t]] = e.energy_price[t];
            c[idx.esag[k].r_up[t]] = up(&e.regulation, t);
            c[idx.esag[k].r_dn[t]] = dn(&e.regulation, t);
        }
    }
    for (k, ev) in inst.evcs.iter().enumerate() {
        check("EVCS", ev.id, &ev.regulation)?;
        if ev.energy_price.len() < hours {
            return Err(Error::MissingPrice(format!("EVCS {} energy_price", ev.id)));
        }
        for t in 0..hours {
            c[idx.evcs[k].p[t]] = -ev.energy_price[t];
            c[idx.evcs[k].r_up[t]] = up(&ev.regulation, t);
            c[idx.evcs[k].r_dn[t]] = dn(&ev.regulation, t);
        }
    }
    for (k, g) in inst.ddgag.iter().enumerate() {
        check("DDGAG", g.id, &g.regulation)?;
        if g.energy_price.len() < hours {
            return Err(Error::MissingPrice(format!("DDGAG {} energy_price", g.id)));
        }
        for t in 0..hours {
            c[idx.ddgag[k].p[t]] = g.energy_price[t];
            c[idx.ddgag[k].r_up[t]] = up(&g.regulation, t);
            c[idx.ddgag[k].r_dn[t]] = dn(&g.regulation, t);
        }
    }
    for (s, sc) in scen.iter().zip(&idx.scenarios) {
        if s.rt_buy.len() < hours || s.rt_sell.len() < hours {
            return Err(Error::MissingPrice(format!("scenario {} real-time prices", s.id)));
        }
        for t in 0..hours {
            c[sc.buy[t]] = s.probability * s.rt_buy[t];
            c[sc.sell[t]] = -s.probability * s.rt_sell[t];
        }
    }
    Ok(c)
}

pub fn add_drag_block(inst: &Instance, idx: &VariableIndex, rows: &mut RowSink) {
    for (k, d) in inst.drag.iter().enumerate() {
        let cols = &idx.drag[k];
        for (t, &hour) in inst.horizon.hours.iter().enumerate() {
            let blocks = || cols.blocks.iter().map(move |b| (b[t], 1.0));
            let mut floor: Vec<_> = blocks().collect();
            floor.push((cols.r_dn[t], -1.0));
            rows.push(ConstraintTag::new(Family::Eq2DragFloor, d.id, hour), floor, Sense::Ge, 0.0);
            let mut ceil: Vec<_> = blocks().collect();
            ceil.push((cols.r_up[t], 1.0));
            rows.push(
                ConstraintTag::new(Family::Eq3DragCeiling, d.id, hour),
                ceil,
                Sense::Le,
                d.total_p_max(),
            );
        }
    }
}

pub fn add_esag_block(inst: &Instance, idx: &VariableIndex, rows: &mut RowSink) {
    let pr = &inst.prices;
    for (k, e) in inst.esag.iter().enumerate() {
        let c = &idx.esag[k];
        for (t, &hour) in inst.horizon.hours.iter().enumerate() {
            let tag = |f| ConstraintTag::new(f, e.id, hour);
            let mut energy = vec![
                (c.p[t], 1.0),
                (c.energy[t], 1.0),
                (c.r_up[t], -pr.mu_up[t] / e.eta_di),
                (c.r_dn[t], e.eta_ch * pr.mu_dn[t]),
            ];
            let rhs = if t == 0 {
                e.e_init
            } else {
                energy.push((c.energy[t - 1], -1.0));
                0.0
            };
            rows.push(tag(Family::Eq7EsagEnergy), energy, Sense::Eq, rhs);
            rows.push(
                tag(Family::Eq8EsagSplit),
                vec![(c.p[t], 1.0), (c.p_di[t], -1.0 / e.eta_di), (c.p_ch[t], e.eta_ch)],
                Sense::Eq,
                0.0,
            );
            rows.push(
                tag(Family::Eq9EsagUpSplit),
                vec![(c.r_up[t], 1.0), (c.r_up_di[t], -1.0), (c.r_dn_ch[t], -1.0)],
                Sense::Eq,
                0.0,
            );
            rows.push(
                tag(Family::Eq10EsagDnSplit),
                vec![(c.r_dn[t], 1.0), (c.r_dn_di[t], -1.0), (c.r_up_ch[t], -1.0)],
                Sense::Eq,
                0.0,
            );
            let b = c.mode[t];
            for (f, col) in [
                (Family::Eq12EsagDiMode, c.p_di[t]),
                (Family::Eq13EsagUpDiMode, c.r_up_di[t]),
                (Family::Eq14EsagDnDiMode, c.r_dn_di[t]),
            ] {
                rows.push(tag(f), vec![(col, 1.0), (b, -e.dr_max)], Sense::Le, 0.0);
            }
            for (f, col) in [
                (Family::Eq15EsagChMode, c.p_ch[t]),
                (Family::Eq16EsagUpChMode, c.r_up_ch[t]),
                (Family::Eq17EsagDnChMode, c.r_dn_ch[t]),
            ] {
                rows.push(tag(f), vec![(col, 1.0), (b, e.cr_max)], Sense::Le, e.cr_max);
            }
            rows.push(
                tag(Family::Eq18EsagDiFloor),
                vec![(c.p_di[t], 1.0), (c.r_dn_di[t], -1.0)],
                Sense::Ge,
                0.0,
            );
            rows.push(
                tag(Family::Eq18EsagDiCeiling),
                vec![(c.p_di[t], 1.0), (c.r_up_di[t], 1.0)],
                Sense::Le,
                e.dr_max,
            );
            rows.push(
                tag(Family::Eq19EsagChFloor),
                vec![(c.p_ch[t], 1.0), (c.r_dn_ch[t], -1.0)],
                Sense::Ge,
                0.0,
            );
            rows.push(
                tag(Family::Eq19EsagChCeiling),
                vec![(c.p_ch[t], 1.0), (c.r_up_ch[t], 1.0)],
                Sense::Le,
                e.cr_max,
            );
        }
    }
}

pub fn add_evcs_block(inst: &Instance, idx: &VariableIndex, rows: &mut RowSink) {
    let pr = &inst.prices;
    for (k, ev) in inst.evcs.iter().enumerate() {
        let c = &idx.evcs[k];
        let b = c.commit;
        let mut charge = Vec::new();
        let mut last_hour = 0;
        for (t, &hour) in inst.horizon.hours.iter().enumerate() {
            if !ev.window.contains(&hour) {
                continue;
            }
            last_hour = hour;
            let tag = |f| ConstraintTag::new(f, ev.id, hour);
            rows.push(
                tag(Family::Eq20_1EvcsPower),
                vec![(c.p[t], 1.0), (b, -ev.er_max)],
                Sense::Le,
                0.0,
            );
            rows.push(
                tag(Family::Eq20_2EvcsUp),
                vec![(c.r_up[t], 1.0), (b, -ev.err_max)],
                Sense::Le,
                0.0,
            );
            rows.push(
                tag(Family::Eq20_3EvcsDn),
                vec![(c.r_dn[t], 1.0), (b, -ev.err_max)],
                Sense::Le,
                0.0,
            );
            rows.push(
                tag(Family::Eq20EvcsCeiling),
                vec![(c.p[t], 1.0), (c.r_up[t], 1.0)],
                Sense::Le,
                ev.er_max,
            );
            rows.push(
                tag(Family::Eq21EvcsFloor),
                vec![(c.p[t], 1.0), (c.r_dn[t], -1.0)],
                Sense::Ge,
                0.0,
            );
            charge.push((c.p[t], ev.gamma_ch));
            charge.push((c.r_up[t], ev.gamma_ch * pr.mu_up[t]));
            charge.push((c.r_dn[t], -ev.gamma_ch * pr.mu_dn[t]));
        }
        if charge.is_empty() {
            continue;
        }
        let init = if inst.flags.evcs_eq23_strict {
            ev.gamma_ch * ev.e_init
        } else {
            ev.e_init
        };
        let mut lo = charge.clone();
        lo.push((b, init - 0.9 * ev.cl_max));
        rows.push(
            ConstraintTag::new(Family::Eq23EvcsEnergyMin, ev.id, last_hour),
            lo,
            Sense::Ge,
            0.0,
        );
        let mut hi = charge;
        hi.push((b, init - ev.cl_max));
        rows.push(
            ConstraintTag::new(Family::Eq23EvcsEnergyMax, ev.id, last_hour),
            hi,
            Sense::Le,
            0.0,
        );
    }
}

pub fn add_ddgag_block(inst: &Instance, idx: &VariableIndex, rows: &mut RowSink) {
    for (k, g) in inst.ddgag.iter().enumerate() {
        let c = &idx.ddgag[k];
        for (t, &hour) in inst.horizon.hours.iter().enumerate() {
            rows.push(
                ConstraintTag::new(Family::Eq24DdgCeiling, g.id, hour),
                vec![(c.p[t], 1.0), (c.r_up[t], 1.0)],
                Sense::Le,
                g.p_max,
            );
            rows.push(
                ConstraintTag::new(Family::Eq25DdgFloor, g.id, hour),
                vec![(c.p[t], 1.0), (c.r_dn[t], -1.0)],
                Sense::Ge,
                g.p_min,
            );
        }
    }
}

/// REAG limits are column bounds only: the day-ahead schedule is capped by the
/// forecast and each scenario's spill by the realization.
pub fn add_reag_block(_inst: &Instance, _idx: &VariableIndex, _rows: &mut RowSink) {}

/// Active and reactive nodal balances, voltage drops and the regulation
/// aggregation rows of the day-ahead stage.
pub fn add_day_ahead_network(inst: &Instance, idx: &VariableIndex, rows: &mut RowSink) {
    let net = &inst.network;
    let s_base = net.s_base;
    for (t, &hour) in inst.horizon.hours.iter().enumerate() {
        for &bus in &net.buses {
            let mut p = Vec::new();
            let mut q = Vec::new();
            if bus == net.substation_bus {
                p.push((idx.substation.p[t], 1.0));
                q.push((idx.substation.q[t], 1.0));
            }
            for (k, d) in inst.drag.iter().enumerate() {
                if d.bus == bus {
                    for b in &idx.drag[k].blocks {
                        p.push((b[t], -1.0));
                        q.push((b[t], -d.tan_phi));
                    }
                }
            }
            for (k, e) in inst.esag.iter().enumerate() {
                if e.bus == bus {
                    p.push((idx.esag[k].p[t], 1.0));
                }
            }
            for (k, ev) in inst.evcs.iter().enumerate() {
                if ev.bus == bus {
                    p.push((idx.evcs[k].p[t], -1.0));
                }
            }
            for (k, g) in inst.ddgag.iter().enumerate() {
                if g.bus == bus {
                    p.push((idx.ddgag[k].p[t], 1.0));
                    q.push((idx.ddgag[k].p[t], g.tan_phi));
                }
            }
            for (k, r) in inst.reag.iter().enumerate() {
                if r.bus == bus {
                    p.push((idx.reag[k][t], 1.0));
                }
            }
            for j in 0..net.branches.len() {
                let a = net.incidence(j, bus);
                if a != 0.0 {
                    p.push((idx.network.pl[j][t], -a));
                    q.push((idx.network.ql[j][t], -a));
                }
            }
            let (pd, qd) = inst.load(bus, t);
            rows.push(ConstraintTag::new(Family::Eq52BalanceP, bus, hour), p, Sense::Eq, pd);
            rows.push(ConstraintTag::new(Family::Eq53BalanceQ, bus, hour), q, Sense::Eq, qd);
        }
        for (j, br) in net.branches.iter().enumerate() {
            let from = net.bus_position(br.from).expect("validated bus");
            let to = net.bus_position(br.to).expect("validated bus");
            rows.push(
                ConstraintTag::new(Family::Eq54VoltageDrop, br.id, hour),
                vec![
                    (idx.network.v[to][t], 1.0),
                    (idx.network.v[from][t], -1.0),
                    (idx.network.pl[j][t], br.r / s_base),
                    (idx.network.ql[j][t], br.x / s_base),
                ],
                Sense::Eq,
                0.0,
            );
        }

        let mut up = vec![(idx.substation.r_up[t], 1.0)];
        let mut dn = vec![(idx.substation.r_dn[t], 1.0)];
        for c in &idx.esag {
            up.push((c.r_up[t], -1.0));
            dn.push((c.r_dn[t], -1.0));
        }
        for c in &idx.ddgag {
            up.push((c.r_up[t], -1.0));
            dn.push((c.r_dn[t], -1.0));
        }
        for c in &idx.drag {
            up.push((c.r_dn[t], -1.0));
            dn.push((c.r_up[t], -1.0));
        }
        for c in &idx.evcs {
            up.push((c.r_dn[t], -1.0));
            dn.push((c.r_up[t], -1.0));
        }
        rows.push(ConstraintTag::new(Family::Eq58RegUp, 0, hour), up, Sense::Eq, 0.0);
        rows.push(ConstraintTag::new(Family::Eq59RegDn, 0, hour), dn, Sense::Eq, 0.0);
    }
}

/// Per-scenario active, reactive and voltage adjustment rows.
pub fn add_real_time_network(
    inst: &Instance,
    scen: &ScenarioSet,
    idx: &VariableIndex,
    rows: &mut RowSink,
) {
    let net = &inst.network;
    let s_base = net.s_base;
    for (s, sc) in scen.iter().zip(&idx.scenarios) {
        for (t, &hour) in inst.horizon.hours.iter().enumerate() {
            for &bus in &net.buses {
                let mut p = Vec::new();
                let mut q = Vec::new();
                if bus == net.substation_bus {
                    p.push((sc.buy[t], 1.0));
                    p.push((sc.sell[t], -1.0));
                    q.push((sc.q_sub[t], 1.0));
                }
                let mut realized = 0.0;
                for (k, r) in inst.reag.iter().enumerate() {
                    if r.bus == bus {
                        p.push((idx.reag[k][t], -1.0));
                        p.push((sc.spill[k][t], -1.0));
                        realized += s.reag[k][t];
                    }
                }
                for j in 0..net.branches.len() {
                    let a = net.incidence(j, bus);
                    if a != 0.0 {
                        p.push((sc.net.pl[j][t], -a));
                        p.push((idx.network.pl[j][t], a));
                        q.push((sc.net.ql[j][t], -a));
                        q.push((idx.network.ql[j][t], a));
                    }
                }
                let (pd, qd) = inst.load(bus, t);
                let (pw, qw) = s.load(bus, t);
                rows.push(
                    ConstraintTag::in_scenario(Family::Eq60AdjP, bus, hour, s.id),
                    p,
                    Sense::Eq,
                    pw - pd - realized,
                );
                rows.push(
                    ConstraintTag::in_scenario(Family::Eq61AdjQ, bus, hour, s.id),
                    q,
                    Sense::Eq,
                    qw - qd,
                );
            }
            for (j, br) in net.branches.iter().enumerate() {
                let from = net.bus_position(br.from).expect("validated bus");
                let to = net.bus_position(br.to).expect("validated bus");
                rows.push(
                    ConstraintTag::in_scenario(Family::Eq62AdjV, br.id, hour, s.id),
                    vec![
                        (sc.net.v[to][t], 1.0),
                        (idx.network.v[to][t], -1.0),
                        (sc.net.v[from][t], -1.0),
                        (idx.network.v[from][t], 1.0),
                        (sc.net.pl[j][t], br.r / s_base),
                        (idx.network.pl[j][t], -br.r / s_base),
                        (sc.net.ql[j][t], br.x / s_base),
                        (idx.network.ql[j][t], -br.x / s_base),
                    ],
                    Sense::Eq,
                    0.0,
                );
            }
        }
    }
}
