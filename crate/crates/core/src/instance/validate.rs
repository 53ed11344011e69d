use std::fmt;

use super::types::{Instance, RegulationOffer};

/// One violated invariant, located by field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            path: path.into(),
            message: message.into(),
        });
    }

    fn check(&mut self, ok: bool, path: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.push(path, message);
        }
    }

    fn series(&mut self, path: String, values: &[f64], hours: usize) {
        if values.len() != hours {
            self.push(
                path,
                format!("series has {} entries, horizon has {hours}", values.len()),
            );
        } else if values.iter().any(|v| !v.is_finite()) {
            self.push(path, "series contains a non-finite value");
        }
    }

    fn regulation(&mut self, path: &str, reg: &RegulationOffer, hours: usize) {
        for (name, s) in reg.series() {
            self.series(format!("{path}.regulation.{name}"), s, hours);
        }
    }

    fn bus(&mut self, inst: &Instance, path: String, kind: &str, id: u32, bus: u32) {
        if inst.network.bus_position(bus).is_none() {
            self.push(path, format!("{kind} {id} is placed on unknown bus {bus}"));
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        Ok(())
    }
}

/// Checks every domain invariant; an empty report means the instance is admissible.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let hours = inst.hours();
    let h = &inst.horizon.hours;

    rep.check(!h.is_empty(), "horizon.hours", "horizon is empty");
    rep.check(
        h.windows(2).all(|w| w[0] < w[1]),
        "horizon.hours",
        "hours must be strictly increasing",
    );

    let net = &inst.network;
    rep.check(!net.buses.is_empty(), "network.buses", "network has no buses");
    let mut sorted = net.buses.clone();
    sorted.sort_unstable();
    sorted.dedup();
    rep.check(
        sorted.len() == net.buses.len(),
        "network.buses",
        "bus ids must be unique",
    );
    rep.check(
        net.bus_position(net.substation_bus).is_some(),
        "network.substation_bus",
        format!("substation bus {} is not a network bus", net.substation_bus),
    );
    rep.check(
        net.v_min.is_finite() && net.v_max.is_finite() && net.v_min < net.v_max,
        "network.v_min",
        "v_min must be below v_max",
    );
    rep.check(
        net.s_base.is_finite() && net.s_base > 0.0,
        "network.s_base",
        "power base must be positive",
    );
    let radial =
        net.branches.len() + 1 == net.buses.len() && net.reachable_count() == net.buses.len();
    rep.check(
        radial,
        "network.branches",
        format!(
            "network is not radial: {} buses, {} branches",
            net.buses.len(),
            net.branches.len()
        ),
    );
    for (j, br) in net.branches.iter().enumerate() {
        let path = format!("network.branches[{j}]");
        rep.check(
            net.bus_position(br.from).is_some() && net.bus_position(br.to).is_some(),
            &path,
            format!("branch {} references an unknown bus", br.id),
        );
        rep.check(br.from != br.to, &path, "branch is a self-loop");
        rep.check(br.r >= 0.0 && br.x >= 0.0, &path, "impedance must be non-negative");
        rep.check(
            br.pl_max > 0.0 && br.ql_max > 0.0,
            &path,
            "flow limits must be positive",
        );
        rep.check(
            net.branches[..j].iter().all(|b| b.id != br.id),
            &path,
            format!("duplicate branch id {}", br.id),
        );
    }

    let p = &inst.prices;
    for (name, s) in p.series() {
        rep.series(format!("prices.{name}"), s, hours);
    }
    rep.check(
        p.mu_up.iter().chain(&p.mu_dn).all(|m| (0.0..=1.0).contains(m)),
        "prices.mu",
        "performance scores must lie in [0, 1]",
    );
    rep.check(
        p.s_up.iter().chain(&p.s_dn).all(|s| *s >= 0.0),
        "prices.s",
        "mileage ratios must be non-negative",
    );

    for (i, l) in inst.loads.iter().enumerate() {
        let path = format!("loads[{i}]");
        if net.bus_position(l.bus).is_none() {
            rep.push(&path, format!("load is placed on unknown bus {}", l.bus));
        }
        rep.series(format!("{path}.p"), &l.p, hours);
        rep.series(format!("{path}.q"), &l.q, hours);
        rep.check(
            l.p.iter().chain(&l.q).all(|v| *v >= 0.0),
            &path,
            "inelastic load must be non-negative",
        );
    }

    for (i, d) in inst.drag.iter().enumerate() {
        let path = format!("drag[{i}]");
        rep.bus(inst, format!("{path}.bus"), "DRAG", d.id, d.bus);
        rep.check(!d.blocks.is_empty(), &path, "DRAG has no demand blocks");
        for (a, b) in d.blocks.iter().enumerate() {
            rep.check(b.p_max > 0.0, format!("{path}.blocks[{a}].p_max"), "block size must be positive");
            rep.series(format!("{path}.blocks[{a}].bid"), &b.bid, hours);
        }
        rep.check(
            d.r_up_max >= 0.0 && d.r_dn_max >= 0.0,
            &path,
            "regulation limits must be non-negative",
        );
        rep.check(d.tan_phi.is_finite(), format!("{path}.tan_phi"), "tan_phi must be finite");
        rep.regulation(&path, &d.regulation, hours);
    }

    for (i, e) in inst.esag.iter().enumerate() {
        let path = format!("esag[{i}]");
        rep.bus(inst, format!("{path}.bus"), "ESAG", e.id, e.bus);
        rep.check(e.e_min <= e.e_init, format!("{path}.e_init"), "e_init is below e_min");
        rep.check(e.e_init <= e.e_max, format!("{path}.e_init"), "e_init exceeds e_max");
        rep.check(
            e.cr_max > 0.0 && e.dr_max > 0.0,
            &path,
            "charge and discharge rates must be positive",
        );
        rep.check(
            e.eta_ch > 0.0 && e.eta_ch <= 1.0 && e.eta_di > 0.0 && e.eta_di <= 1.0,
            &path,
            "efficiencies must lie in (0, 1]",
        );
        rep.series(format!("{path}.energy_price"), &e.energy_price, hours);
        rep.regulation(&path, &e.regulation, hours);
    }

    for (i, ev) in inst.evcs.iter().enumerate() {
        let path = format!("evcs[{i}]");
        rep.bus(inst, format!("{path}.bus"), "EVCS", ev.id, ev.bus);
        rep.check(
            ev.e_init >= 0.0 && ev.e_init <= ev.cl_max,
            format!("{path}.e_init"),
            "initial charge must lie in [0, cl_max]",
        );
        rep.check(ev.er_max > 0.0, format!("{path}.er_max"), "charging rate must be positive");
        rep.check(ev.err_max >= 0.0, format!("{path}.err_max"), "regulation limit must be non-negative");
        rep.check(
            ev.gamma_ch > 0.0 && ev.gamma_ch <= 1.0,
            format!("{path}.gamma_ch"),
            "charging efficiency must lie in (0, 1]",
        );
        let positions: Option<Vec<usize>> =
            ev.window.iter().map(|&w| inst.horizon.position(w)).collect();
        let contiguous = match positions {
            Some(pos) => !pos.is_empty() && pos.windows(2).all(|w| w[1] == w[0] + 1),
            None => false,
        };
        rep.check(
            contiguous,
            format!("{path}.window"),
            "availability window must be a non-empty contiguous run of horizon hours",
        );
        rep.series(format!("{path}.energy_price"), &ev.energy_price, hours);
        rep.regulation(&path, &ev.regulation, hours);
    }

    for (i, g) in inst.ddgag.iter().enumerate() {
        let path = format!("ddgag[{i}]");
        rep.bus(inst, format!("{path}.bus"), "DDGAG", g.id, g.bus);
        rep.check(
            g.p_min >= 0.0 && g.p_min <= g.p_max,
            &path,
            "generation limits must satisfy 0 <= p_min <= p_max",
        );
        rep.check(g.ru >= 0.0 && g.rd >= 0.0, &path, "ramp limits must be non-negative");
        rep.series(format!("{path}.energy_price"), &g.energy_price, hours);
        rep.regulation(&path, &g.regulation, hours);
    }

    for (i, r) in inst.reag.iter().enumerate() {
        let path = format!("reag[{i}]");
        rep.bus(inst, format!("{path}.bus"), "REAG", r.id, r.bus);
        rep.series(format!("{path}.p_forecast_max"), &r.p_forecast_max, hours);
        rep.check(
            r.p_forecast_max.iter().all(|v| *v >= 0.0),
            format!("{path}.p_forecast_max"),
            "forecast cap must be non-negative",
        );
        rep.series(format!("{path}.energy_price"), &r.energy_price, hours);
    }

    let f = &inst.flags;
    rep.check(
        f.rt_premium.is_finite(),
        "flags.rt_premium",
        "premium must be finite",
    );
    rep.check(
        (0.0..=1.0).contains(&f.rt_sell_ratio),
        "flags.rt_sell_ratio",
        "sell/buy ratio must lie in [0, 1]",
    );

    for (kind, ids) in [
        ("drag", inst.drag.iter().map(|a| a.id).collect::<Vec<_>>()),
        ("esag", inst.esag.iter().map(|a| a.id).collect()),
        ("evcs", inst.evcs.iter().map(|a| a.id).collect()),
        ("ddgag", inst.ddgag.iter().map(|a| a.id).collect()),
        ("reag", inst.reag.iter().map(|a| a.id).collect()),
    ] {
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                rep.push(format!("{kind}[{i}].id"), format!("duplicate {kind} id {id}"));
            }
        }
    }

    rep
}
