mod common;

use dso_core::instance::{builtin_case, BusLoad, CaseMode};
use dso_core::pricing::{
    lmps_da_csv, lmps_rt_csv, run_case, scale_rt_prices, sensitivity_sweep, settlement_csv,
    sweep_cases, AggregatorKind, CaseResult, SweepMode,
};
use dso_core::scenario::{forecast_scenario, ScenarioSet};
use dso_core::solver::SolverOptions;
use dso_core::Error;

fn solve(mode: CaseMode) -> CaseResult {
    let (inst, scen) = builtin_case(mode);
    run_case(&inst, &scen, &SolverOptions::default()).unwrap()
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
}

#[test]
fn settlement_closes_in_every_mode() {
    for mode in [
        CaseMode::Deterministic,
        CaseMode::SingleUncertainty,
        CaseMode::MultiUncertainty,
    ] {
        let case = solve(mode);
        let dso = &case.report.dso;
        assert!((dso.objective - case.milp.objective).abs() <= 1e-6, "{mode:?}");
        assert!((dso.signed_sum() - dso.objective).abs() <= 1e-6, "{mode:?}");
    }
}

#[test]
fn deterministic_lmps_are_uniform_and_match_rt() {
    let case = solve(CaseMode::Deterministic);
    let l = &case.lmps;
    for t in 0..l.hours.len() {
        assert!(spread(l.da.iter().map(|row| row[t])) <= 1e-6, "hour {t}");
        for n in 0..l.buses.len() {
            assert!((l.rt[0][n][t] - l.da[n][t]).abs() <= 1e-6);
        }
    }
}

#[test]
fn da_lmp_equals_wholesale_price_at_substation() {
    let (inst, _) = builtin_case(CaseMode::Deterministic);
    let case = solve(CaseMode::Deterministic);
    for t in 0..inst.hours() {
        let lmp = case.lmps.da_at(inst.network.substation_bus, t).unwrap();
        assert!((lmp - inst.prices.da_energy[t]).abs() <= 1e-6);
    }
}

#[test]
fn rt_lmps_are_split_invariant() {
    let (inst, scen) = builtin_case(CaseMode::SingleUncertainty);
    let base = run_case(&inst, &scen, &SolverOptions::default()).unwrap();
    let mut split = scen.clone();
    let mut copy = split.scenarios[0].clone();
    split.scenarios[0].probability /= 2.0;
    copy.probability = split.scenarios[0].probability;
    copy.id = 99;
    split.scenarios.push(copy);
    let case = run_case(&inst, &split, &SolverOptions::default()).unwrap();
    assert!((case.milp.objective - base.milp.objective).abs() <= 1e-6);
    let first = scen.scenarios[0].id;
    for t in 0..inst.hours() {
        for &bus in &inst.network.buses {
            let want = base.lmps.rt_at(first, bus, t).unwrap();
            assert!((case.lmps.rt_at(first, bus, t).unwrap() - want).abs() <= 1e-6);
            assert!((case.lmps.rt_at(99, bus, t).unwrap() - want).abs() <= 1e-6);
        }
    }
}

#[test]
fn single_uncertainty_reag_rt_revenue_signs() {
    let case = solve(CaseMode::SingleUncertainty);
    let reag = case.report.aggregator(AggregatorKind::Reag, 5).unwrap();
    for (w, &rev) in reag.rt.iter().enumerate() {
        if w == 2 {
            assert!(rev.abs() <= 1e-6, "scenario 3 revenue {rev}");
        } else {
            assert!(rev < 0.0, "scenario {} revenue {rev}", w + 1);
        }
    }
}

#[test]
fn congestion_separates_prices() {
    let (mut inst, scen) = builtin_case(CaseMode::Deterministic);
    let base = run_case(&inst, &scen, &SolverOptions::default()).unwrap();
    let peak = (0..inst.hours())
        .map(|t| base.milp.x[base.model.index.network.pl[3][t]].abs())
        .fold(0.0, f64::max);
    assert!(peak > 0.0);
    inst.network.branches[3].pl_max = peak / 2.0;
    let case = run_case(&inst, &scen, &SolverOptions::default()).unwrap();
    let gap = (0..inst.hours())
        .map(|t| (case.lmps.da_at(5, t).unwrap() - case.lmps.da_at(1, t).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(gap > 1e-3, "bus 5 and bus 1 prices differ by at most {gap}");
}

#[test]
fn zero_prices_settle_to_zero() {
    let mut inst = common::two_bus(2, 0.0);
    inst.prices.cap_up = vec![0.0; 2];
    inst.prices.cap_dn = vec![0.0; 2];
    inst.prices.mil_up = vec![0.0; 2];
    inst.prices.mil_dn = vec![0.0; 2];
    inst.loads.push(BusLoad {
        bus: 2,
        p: vec![1.0; 2],
        q: vec![0.0; 2],
    });
    let mut g = common::ddg(2, 2, 0.0, 2.0, 0.0);
    g.regulation = dso_core::instance::RegulationOffer::flat(2, 0.0, 0.0, 0.0, 0.0);
    inst.ddgag.push(g);
    let scen = forecast_scenario(&inst);
    let case = run_case(&inst, &scen, &SolverOptions::default()).unwrap();
    for a in &case.report.aggregators {
        assert_eq!(a.total_expected.abs(), 0.0);
    }
    assert!(case.report.dso.objective.abs() <= 1e-9);
}

#[test]
fn unit_multiplier_reproduces_base_case() {
    let (inst, scen) = builtin_case(CaseMode::SingleUncertainty);
    let base = run_case(&inst, &scen, &SolverOptions::default()).unwrap();
    for mode in [SweepMode::RtPremium, SweepMode::Spread] {
        assert_eq!(scale_rt_prices(&scen, mode, 1.0), scen);
        let s = sensitivity_sweep(&inst, &scen, &[1.0], mode, &SolverOptions::default()).unwrap();
        assert!((s.records[0].objective - base.milp.objective).abs() <= 1e-9);
    }
}

#[test]
fn spread_mode_moves_prices_apart() {
    let (_, scen) = builtin_case(CaseMode::MultiUncertainty);
    let scaled = scale_rt_prices(&scen, SweepMode::Spread, 2.0);
    for (a, b) in scen.iter().zip(scaled.iter()) {
        for t in 0..a.rt_buy.len() {
            assert_eq!(b.rt_buy[t], 2.0 * a.rt_buy[t]);
            assert_eq!(b.rt_sell[t], a.rt_sell[t] / 2.0);
        }
    }
}

#[test]
fn non_positive_multiplier_is_rejected() {
    let (inst, scen) = builtin_case(CaseMode::Deterministic);
    let err = sweep_cases(&inst, &scen, &[1.0, 0.0], SweepMode::RtPremium, &SolverOptions::default());
    assert!(matches!(err, Err(Error::InvalidArgument(_))));
}

#[test]
fn failing_case_is_annotated_with_multiplier() {
    let (mut inst, _) = builtin_case(CaseMode::Deterministic);
    inst.loads[0].p = vec![100.0; inst.hours()];
    let scen: ScenarioSet = forecast_scenario(&inst);
    let out = sweep_cases(&inst, &scen, &[3.0], SweepMode::RtPremium, &SolverOptions::default()).unwrap();
    match &out[0] {
        Err(Error::Sweep { multiplier, .. }) => assert_eq!(*multiplier, 3.0),
        other => panic!("expected an annotated failure, got {other:?}"),
    }
}

#[test]
fn csv_outputs_have_headers_and_rows() {
    let case = solve(CaseMode::SingleUncertainty);
    let da = lmps_da_csv(&case.lmps);
    assert!(da.starts_with("n,t,price\n"));
    assert_eq!(da.lines().count(), 1 + 5 * 24);
    let rt = lmps_rt_csv(&case.lmps);
    assert!(rt.starts_with("n,t,w,price\n"));
    assert_eq!(rt.lines().count(), 1 + 5 * 5 * 24);
    let st = settlement_csv(&case.report);
    assert!(st.starts_with("party,id,bus,item,scenario,value\n"));
    assert!(st.lines().any(|l| l.starts_with("DSO,0,,objective,,")));
}

#[test]
fn multi_spread_sweep_trades_schedule_for_rt_revenue() {
    let (inst, scen) = builtin_case(CaseMode::MultiUncertainty);
    let s = sensitivity_sweep(&inst, &scen, &[1.0, 5.0, 13.0, 25.0], SweepMode::Spread, &SolverOptions::default())
        .unwrap();
    let r = &s.records;
    for w in r.windows(2) {
        assert!(w[1].reag_da_energy <= w[0].reag_da_energy + 1e-9);
    }
    assert!(r[3].reag_da_energy < r[0].reag_da_energy);
    assert!(r[3].reag_rt_expected > r[0].reag_rt_expected);
    assert!(r[2].reag_rt_expected > r[1].reag_rt_expected);
}
