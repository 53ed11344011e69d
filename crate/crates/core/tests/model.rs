mod common;

use std::collections::{BTreeMap, HashSet};

use dso_core::instance::{builtin_case, CaseMode, Instance};
use dso_core::model::{
    assemble, build_objective, index_variables, read_mps, write_mps, ConstraintTag, Family,
    Model, MpsModel, Sense, VarKind,
};
use dso_core::scenario::{forecast_scenario, ScenarioSet};
use dso_core::solver::{solve_milp, SolverOptions};
use proptest::prelude::*;

const MODES: [CaseMode; 3] = [
    CaseMode::Deterministic,
    CaseMode::SingleUncertainty,
    CaseMode::MultiUncertainty,
];

fn built(mode: CaseMode) -> (Instance, ScenarioSet, Model) {
    let (inst, scen) = builtin_case(mode);
    let model = assemble(&inst, &scen).unwrap();
    (inst, scen, model)
}

fn family_counts(model: &Model) -> BTreeMap<Family, usize> {
    let mut out = BTreeMap::new();
    for r in &model.rows {
        *out.entry(r.tag.family).or_insert(0) += 1;
    }
    out
}

fn coef(model: &Model, tag: ConstraintTag, col: usize) -> f64 {
    let row = &model.rows[model.row_of(&tag).expect("row exists")];
    row.coefs
        .iter()
        .find(|&&(j, _)| j == col)
        .map_or(0.0, |&(_, a)| a)
}

#[test]
fn builtin_has_25_binaries_in_every_mode() {
    for mode in MODES {
        let (_, _, model) = built(mode);
        let bins = model.binaries();
        assert_eq!(bins.len(), 25, "{mode:?}");
        for j in bins {
            assert_eq!((model.lower(j), model.upper(j)), (0.0, 1.0));
        }
    }
}

#[test]
fn row_audit_deterministic() {
    let (_, _, model) = built(CaseMode::Deterministic);
    let c = family_counts(&model);
    let per_hour = |f: Family| c.get(&f).copied().unwrap_or(0);
    for f in [Family::Eq2DragFloor, Family::Eq3DragCeiling] {
        assert_eq!(per_hour(f), 24);
    }
    let esag = [
        Family::Eq7EsagEnergy,
        Family::Eq8EsagSplit,
        Family::Eq9EsagUpSplit,
        Family::Eq10EsagDnSplit,
        Family::Eq12EsagDiMode,
        Family::Eq13EsagUpDiMode,
        Family::Eq14EsagDnDiMode,
        Family::Eq15EsagChMode,
        Family::Eq16EsagUpChMode,
        Family::Eq17EsagDnChMode,
        Family::Eq18EsagDiFloor,
        Family::Eq18EsagDiCeiling,
        Family::Eq19EsagChFloor,
        Family::Eq19EsagChCeiling,
    ];
    assert_eq!(esag.iter().map(|&f| per_hour(f)).sum::<usize>(), 14 * 24);
    let evcs_hourly = [
        Family::Eq20_1EvcsPower,
        Family::Eq20_2EvcsUp,
        Family::Eq20_3EvcsDn,
        Family::Eq20EvcsCeiling,
        Family::Eq21EvcsFloor,
    ];
    for f in evcs_hourly {
        assert_eq!(per_hour(f), 9, "{f:?}");
    }
    assert_eq!(per_hour(Family::Eq23EvcsEnergyMin), 1);
    assert_eq!(per_hour(Family::Eq23EvcsEnergyMax), 1);
    assert_eq!(per_hour(Family::Eq24DdgCeiling) + per_hour(Family::Eq25DdgFloor), 48);
    assert_eq!(per_hour(Family::Eq52BalanceP), 5 * 24);
    assert_eq!(per_hour(Family::Eq53BalanceQ), 5 * 24);
    assert_eq!(per_hour(Family::Eq54VoltageDrop), 4 * 24);
    assert_eq!(per_hour(Family::Eq58RegUp), 24);
    assert_eq!(per_hour(Family::Eq59RegDn), 24);
    assert_eq!(per_hour(Family::Eq60AdjP), 5 * 24);
    assert_eq!(per_hour(Family::Eq62AdjV), 4 * 24);
}

#[test]
fn scenario_blocks_share_first_stage() {
    let (_, _, det) = built(CaseMode::Deterministic);
    let (_, scen, single) = built(CaseMode::SingleUncertainty);
    assert_eq!(scen.len(), 5);
    assert_eq!(single.index.scenarios.len(), 5);
    assert_eq!(det.index.first_stage, single.index.first_stage);
    let per_scenario = det.num_cols() - det.index.first_stage;
    assert_eq!(single.num_cols() - single.index.first_stage, 5 * per_scenario);
    for j in 0..single.index.first_stage {
        assert!(!single.columns()[j].key.kind.is_second_stage());
    }
    for j in single.index.first_stage..single.num_cols() {
        assert!(single.columns()[j].key.kind.is_second_stage());
    }
}

#[test]
fn first_stage_coefficients_identical_across_scenarios() {
    let (inst, scen, model) = built(CaseMode::MultiUncertainty);
    let fs = model.index.first_stage;
    for (t, &hour) in inst.horizon.hours.iter().enumerate() {
        for &bus in &inst.network.buses {
            for fam in [Family::Eq60AdjP, Family::Eq61AdjQ] {
                let pick = |w: u32| -> Vec<(usize, f64)> {
                    let tag = ConstraintTag::in_scenario(fam, bus, hour, w);
                    model.rows[model.row_of(&tag).unwrap()]
                        .coefs
                        .iter()
                        .copied()
                        .filter(|&(j, _)| j < fs)
                        .collect()
                };
                let first = pick(scen.scenarios[0].id);
                for s in &scen.scenarios[1..] {
                    assert_eq!(pick(s.id), first, "{fam:?} bus {bus} t {t}");
                }
            }
        }
    }
}

#[test]
fn rebuild_is_identical() {
    for mode in MODES {
        let (inst, scen) = builtin_case(mode);
        let a = assemble(&inst, &scen).unwrap();
        let b = assemble(&inst, &scen).unwrap();
        assert_eq!(a, b);
        assert_eq!(write_mps(&a), write_mps(&b));
    }
}

#[test]
fn model_invariants() {
    for mode in MODES {
        let (_, _, model) = built(mode);
        let names: HashSet<String> = (0..model.num_cols()).map(|j| model.column_name(j)).collect();
        assert_eq!(names.len(), model.num_cols(), "column names are a bijection");
        let tags: HashSet<_> = model.rows.iter().map(|r| r.tag).collect();
        assert_eq!(tags.len(), model.num_rows());
        for r in &model.rows {
            assert!(!r.coefs.is_empty(), "empty row {}", r.tag);
            assert!(r.rhs.is_finite());
            assert!(r.coefs.iter().all(|&(_, a)| a.is_finite() && a != 0.0));
            assert!(r.coefs.windows(2).all(|w| w[0].0 < w[1].0));
        }
        assert!(model.cost.iter().all(|c| c.is_finite()));
    }
}

#[test]
fn objective_coefficients() {
    let (inst, scen, model) = built(CaseMode::Deterministic);
    let pr = &inst.prices;
    for t in 0..inst.hours() {
        let expect_up = -(pr.cap_up[t] + pr.s_up[t] * pr.mu_up[t] * pr.mil_up[t]);
        assert_eq!(model.cost[model.index.substation.r_up[t]], expect_up);
        assert_eq!(model.cost[model.index.substation.p[t]], pr.da_energy[t]);
        assert_eq!(model.cost[model.index.evcs[0].p[t]], -inst.evcs[0].energy_price[t]);
        let w = &model.index.scenarios[0];
        assert_eq!(model.cost[w.buy[t]], scen.scenarios[0].rt_buy[t]);
        assert_eq!(model.cost[w.sell[t]], -scen.scenarios[0].rt_sell[t]);
    }
}

#[test]
fn one_scenario_rt_buy_coefficient() {
    let mut inst = common::two_bus(1, 8.0);
    inst.flags.rt_premium = 2.0;
    let scen = forecast_scenario(&inst);
    let idx = index_variables(&inst, &scen);
    let c = build_objective(&inst, &scen, &idx).unwrap();
    assert_eq!(c[idx.scenarios[0].buy[0]], 10.0);
}

#[test]
fn zero_prices_give_zero_objective_vector() {
    let (mut inst, mut scen) = builtin_case(CaseMode::SingleUncertainty);
    let zero = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x = 0.0);
    let p = &mut inst.prices;
    for v in [
        &mut p.da_energy,
        &mut p.cap_up,
        &mut p.cap_dn,
        &mut p.mil_up,
        &mut p.mil_dn,
    ] {
        zero(v);
    }
    for d in &mut inst.drag {
        d.blocks.iter_mut().for_each(|b| zero(&mut b.bid));
        let r = &mut d.regulation;
        [&mut r.cap_up, &mut r.cap_dn, &mut r.mil_up, &mut r.mil_dn].into_iter().for_each(zero);
    }
    for e in &mut inst.esag {
        zero(&mut e.energy_price);
        let r = &mut e.regulation;
        [&mut r.cap_up, &mut r.cap_dn, &mut r.mil_up, &mut r.mil_dn].into_iter().for_each(zero);
    }
    for e in &mut inst.evcs {
        zero(&mut e.energy_price);
        let r = &mut e.regulation;
        [&mut r.cap_up, &mut r.cap_dn, &mut r.mil_up, &mut r.mil_dn].into_iter().for_each(zero);
    }
    for g in &mut inst.ddgag {
        zero(&mut g.energy_price);
        let r = &mut g.regulation;
        [&mut r.cap_up, &mut r.cap_dn, &mut r.mil_up, &mut r.mil_dn].into_iter().for_each(zero);
    }
    for s in &mut scen.scenarios {
        zero(&mut s.rt_buy);
        zero(&mut s.rt_sell);
    }
    let idx = index_variables(&inst, &scen);
    let c = build_objective(&inst, &scen, &idx).unwrap();
    assert!(c.iter().all(|&v| v == 0.0));
}

#[test]
fn missing_price_series_is_an_error() {
    let (mut inst, scen) = builtin_case(CaseMode::Deterministic);
    inst.prices.mil_up.truncate(3);
    let idx = index_variables(&inst, &scen);
    assert!(build_objective(&inst, &scen, &idx).is_err());
}

#[test]
fn evcs_columns_outside_window_are_fixed() {
    let (inst, _, model) = built(CaseMode::Deterministic);
    let c = &model.index.evcs[0];
    for (t, hour) in inst.horizon.hours.iter().enumerate() {
        let inside = inst.evcs[0].window.contains(hour);
        for j in [c.p[t], c.r_up[t], c.r_dn[t]] {
            assert_eq!(model.upper(j) > 0.0, inside, "hour {hour}");
        }
    }
}

#[test]
fn rt_sell_disabled_fixes_sell_columns() {
    let (_, _, model) = built(CaseMode::SingleUncertainty);
    for w in &model.index.scenarios {
        assert!(w.sell.iter().all(|&j| model.upper(j) == 0.0));
        assert!(w.buy.iter().all(|&j| model.upper(j) == f64::INFINITY));
    }
}

#[test]
fn spill_bounded_by_realization() {
    let (_, scen, model) = built(CaseMode::SingleUncertainty);
    for (w, s) in scen.scenarios.iter().enumerate() {
        for (t, &j) in model.index.scenarios[w].spill[0].iter().enumerate() {
            assert_eq!(model.upper(j), s.reag[0][t]);
        }
    }
    let reag = &model.index.reag[0];
    assert!(reag.iter().all(|&j| model.upper(j) == 3.0));
}

#[test]
fn eq23_reading() {
    // b = 1, E_int = 2, gamma = 1, CL = 20 gives a charging sum in [16, 18].
    let (inst, _, model) = built(CaseMode::Deterministic);
    let b = model.index.evcs[0].commit;
    let last = *inst.evcs[0].window.last().unwrap();
    let lo = ConstraintTag::new(Family::Eq23EvcsEnergyMin, inst.evcs[0].id, last);
    let hi = ConstraintTag::new(Family::Eq23EvcsEnergyMax, inst.evcs[0].id, last);
    assert_eq!(coef(&model, lo, b), -16.0);
    assert_eq!(coef(&model, hi, b), -18.0);
    assert_eq!(model.rows[model.row_of(&lo).unwrap()].sense, Sense::Ge);
    assert_eq!(model.rows[model.row_of(&hi).unwrap()].sense, Sense::Le);
}

#[test]
fn eq58_structure() {
    let (inst, _, model) = built(CaseMode::Deterministic);
    let idx = &model.index;
    for (t, &hour) in inst.horizon.hours.iter().enumerate() {
        let up = ConstraintTag::new(Family::Eq58RegUp, 0, hour);
        let dn = ConstraintTag::new(Family::Eq59RegDn, 0, hour);
        assert_eq!(coef(&model, up, idx.substation.r_up[t]), 1.0);
        for j in [idx.esag[0].r_up[t], idx.ddgag[0].r_up[t], idx.drag[0].r_dn[t], idx.evcs[0].r_dn[t]] {
            assert_eq!(coef(&model, up, j), -1.0);
        }
        for j in [idx.esag[0].r_dn[t], idx.ddgag[0].r_dn[t], idx.drag[0].r_up[t], idx.evcs[0].r_up[t]] {
            assert_eq!(coef(&model, dn, j), -1.0);
        }
    }
}

proptest! {
    #[test]
    fn drag_down_reserve_feeds_system_up(t in 0usize..24, delta in 0.0f64..1.0) {
        let (inst, _, model) = built(CaseMode::Deterministic);
        let idx = &model.index;
        let tag = ConstraintTag::new(Family::Eq58RegUp, 0, inst.horizon.hours[t]);
        let row = &model.rows[model.row_of(&tag).unwrap()];
        let mut x = vec![0.0; model.num_cols()];
        x[idx.drag[0].r_dn[t]] = delta;
        x[idx.substation.r_up[t]] = delta;
        prop_assert!(row.violation(&x).abs() <= 1e-15);
        x[idx.substation.r_up[t]] = 0.0;
        prop_assert!((row.violation(&x) - delta).abs() <= 1e-15);
    }

    #[test]
    fn mps_round_trip_generic(seed in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        use rand::SeedableRng;
        let model = common::random_lp(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed), m, n);
        prop_assert_eq!(read_mps(&write_mps(&model)).unwrap(), MpsModel::from_model(&model));
    }
}

#[test]
fn mps_round_trip_builtin() {
    let (_, _, model) = built(CaseMode::SingleUncertainty);
    let text = write_mps(&model);
    assert!(text.contains("MARKER"));
    assert_eq!(read_mps(&text).unwrap(), MpsModel::from_model(&model));
}

#[test]
fn balanced_two_bus_has_no_flow() {
    let mut inst = common::two_bus(1, 30.0);
    inst.loads.push(dso_core::instance::BusLoad {
        bus: 2,
        p: vec![3.0],
        q: vec![0.0],
    });
    inst.ddgag.push(common::ddg(2, 1, 3.0, 3.0, 10.0));
    inst.ddgag[0].ru = 0.0;
    inst.ddgag[0].rd = 0.0;
    let scen = forecast_scenario(&inst);
    let model = assemble(&inst, &scen).unwrap();
    let sol = solve_milp(&model, &SolverOptions::default()).unwrap();
    let net = &model.index.network;
    assert!(sol.x[net.pl[0][0]].abs() < 1e-9);
    assert!((sol.x[net.v[1][0]] - sol.x[net.v[0][0]]).abs() < 1e-9);
}

#[test]
fn empty_instance_solves_to_zero() {
    let inst = common::two_bus(3, 30.0);
    let scen = forecast_scenario(&inst);
    let model = assemble(&inst, &scen).unwrap();
    assert!(model.binaries().is_empty());
    let sol = solve_milp(&model, &SolverOptions::default()).unwrap();
    assert!(sol.objective.abs() < 1e-9);
    for (j, col) in model.columns().iter().enumerate() {
        if col.key.kind != VarKind::Voltage && col.key.kind != VarKind::RtVoltage {
            assert!(sol.x[j].abs() < 1e-9, "{}", model.column_name(j));
        }
    }
}

/// Where each symbol of the formulation lives: a column kind or an input field.
enum Home {
    Col(VarKind),
    Field(&'static str),
    Scen(&'static str),
}

#[test]
fn symbol_coverage() {
    use Home::*;
    let table: &[(&str, Home)] = &[
        ("P^sub_t", Col(VarKind::SubP)),
        ("Q^sub_t", Col(VarKind::SubQ)),
        ("r^sub,up_t", Col(VarKind::SubRegUp)),
        ("r^sub,dn_t", Col(VarKind::SubRegDn)),
        ("P_a,t,k1", Col(VarKind::DragBlock)),
        ("r^cap,up_t,k1", Col(VarKind::DragRegUp)),
        ("r^cap,dn_t,k1", Col(VarKind::DragRegDn)),
        ("E_t,k2", Col(VarKind::EsagEnergy)),
        ("P_t,k2", Col(VarKind::EsagP)),
        ("P^ch_t,k2", Col(VarKind::EsagCh)),
        ("P^di_t,k2", Col(VarKind::EsagDi)),
        ("r^cap,up_t,k2", Col(VarKind::EsagRegUp)),
        ("r^cap,dn_t,k2", Col(VarKind::EsagRegDn)),
        ("r^cap,up,di_t,k2", Col(VarKind::EsagRegUpDi)),
        ("r^cap,dn,di_t,k2", Col(VarKind::EsagRegDnDi)),
        ("r^cap,up,ch_t,k2", Col(VarKind::EsagRegUpCh)),
        ("r^cap,dn,ch_t,k2", Col(VarKind::EsagRegDnCh)),
        ("b_t,k2", Col(VarKind::EsagMode)),
        ("P_t,k3", Col(VarKind::EvcsP)),
        ("r^cap,up_t,k3", Col(VarKind::EvcsRegUp)),
        ("r^cap,dn_t,k3", Col(VarKind::EvcsRegDn)),
        ("b_k3", Col(VarKind::EvcsCommit)),
        ("P_t,k4", Col(VarKind::DdgP)),
        ("r^cap,up_t,k4", Col(VarKind::DdgRegUp)),
        ("r^cap,dn_t,k4", Col(VarKind::DdgRegDn)),
        ("P_t,k5", Col(VarKind::ReagP)),
        ("Pl_j,t", Col(VarKind::FlowP)),
        ("Ql_j,t", Col(VarKind::FlowQ)),
        ("V_n,t", Col(VarKind::Voltage)),
        ("P^sub,b,rl_t,w", Col(VarKind::RtBuy)),
        ("P^sub,s,rl_t,w", Col(VarKind::RtSell)),
        ("Q^sub,RT_t,w", Col(VarKind::RtSubQ)),
        ("P^spill_t,k5,w", Col(VarKind::Spill)),
        ("Pl_j,t,w", Col(VarKind::RtFlowP)),
        ("Ql_j,t,w", Col(VarKind::RtFlowQ)),
        ("V_n,t,w", Col(VarKind::RtVoltage)),
        ("pi^e_t", Field("prices.da_energy")),
        ("pi^cap,up_t", Field("prices.cap_up")),
        ("pi^cap,dn_t", Field("prices.cap_dn")),
        ("pi^mil,up_t", Field("prices.mil_up")),
        ("pi^mil,dn_t", Field("prices.mil_dn")),
        ("S^up_t", Field("prices.s_up")),
        ("S^dn_t", Field("prices.s_dn")),
        ("mu^up_t", Field("prices.mu_up")),
        ("mu^dn_t", Field("prices.mu_dn")),
        ("pi^e_a,t,k1", Field("drag.blocks.bid")),
        ("P^max_a,k1", Field("drag.blocks.p_max")),
        ("r^cap,up,max_k1", Field("drag.r_up_max")),
        ("r^cap,dn,max_k1", Field("drag.r_dn_max")),
        ("pi^cap,up_t,k", Field("drag.regulation.cap_up")),
        ("pi^cap,dn_t,k", Field("drag.regulation.cap_dn")),
        ("pi^mil,up_t,k", Field("drag.regulation.mil_up")),
        ("pi^mil,dn_t,k", Field("drag.regulation.mil_dn")),
        ("E^min_k2", Field("esag.e_min")),
        ("E^max_k2", Field("esag.e_max")),
        ("E_0,k2", Field("esag.e_init")),
        ("CR^max_k2", Field("esag.cr_max")),
        ("DR^max_k2", Field("esag.dr_max")),
        ("eta^ch_k2", Field("esag.eta_ch")),
        ("eta^di_k2", Field("esag.eta_di")),
        ("pi^e_t,k2", Field("esag.energy_price")),
        ("ER^max_k3", Field("evcs.er_max")),
        ("ERR^max_k3", Field("evcs.err_max")),
        ("CL^max_k3", Field("evcs.cl_max")),
        ("E^int_k3", Field("evcs.e_init")),
        ("gamma^ch_k3", Field("evcs.gamma_ch")),
        ("T'", Field("evcs.window")),
        ("pi^e_t,k3", Field("evcs.energy_price")),
        ("P^min_k4", Field("ddgag.p_min")),
        ("P^max_k4", Field("ddgag.p_max")),
        ("RU_k4", Field("ddgag.ru")),
        ("RD_k4", Field("ddgag.rd")),
        ("tan phi_k4", Field("ddgag.tan_phi")),
        ("tan phi_k1", Field("drag.tan_phi")),
        ("pi^e_t,k4", Field("ddgag.energy_price")),
        ("P^fc,max_t,k5", Field("reag.p_forecast_max")),
        ("pi^e_t,k5", Field("reag.energy_price")),
        ("P^D_n,t", Field("loads.p")),
        ("Q^D_n,t", Field("loads.q")),
        ("H^sub_n", Field("network.substation_bus")),
        ("A_j,n", Field("network.branches.from")),
        ("C_m,n", Field("network.branches.to")),
        ("r_j", Field("network.branches.r")),
        ("x_j", Field("network.branches.x")),
        ("Pl^max_j", Field("network.branches.pl_max")),
        ("Ql^max_j", Field("network.branches.ql_max")),
        ("V^min", Field("network.v_min")),
        ("V^max", Field("network.v_max")),
        ("Omega_w", Scen("probability")),
        ("P_t,k5,w", Scen("reag")),
        ("P^D_n,t,w", Scen("loads")),
        ("pi^e,b,rl_t,w", Scen("rt_buy")),
        ("pi^e,s,rl_t,w", Scen("rt_sell")),
    ];

    let (inst, scen, model) = built(CaseMode::SingleUncertainty);
    let doc = toml::Value::try_from(&inst).unwrap();
    let scen_doc = toml::Value::try_from(&scen.scenarios[0]).unwrap();
    let resolve = |root: &toml::Value, path: &str| {
        let mut v = root.clone();
        for part in path.split('.') {
            v = match v {
                toml::Value::Array(a) => a.first().and_then(|e| e.get(part)).cloned(),
                other => other.get(part).cloned(),
            }
            .unwrap_or_else(|| panic!("{path} does not resolve"));
        }
    };
    let mut kinds = HashSet::new();
    let mut names = HashSet::new();
    for (symbol, home) in table {
        assert!(names.insert(*symbol), "{symbol} listed twice");
        match home {
            Col(kind) => {
                assert!(kinds.insert(*kind), "{symbol}: kind {kind:?} mapped twice");
                assert!(
                    model.columns().iter().any(|c| c.key.kind == *kind),
                    "{symbol}: no {kind:?} column"
                );
            }
            Field(path) => resolve(&doc, path),
            Scen(path) => resolve(&scen_doc, path),
        }
    }
    let used: HashSet<VarKind> = model.columns().iter().map(|c| c.key.kind).collect();
    assert_eq!(used, kinds, "every column kind has a symbol");
}
