use super::*;
use crate::instance::{builtin_case, CaseMode};
use crate::model::{assemble, Model, Sense};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn single_ge_row() {
    let m = Model::generic(&[(0.0, 10.0, 1.0, false)], vec![(vec![(0, 1.0)], Sense::Ge, 2.0)]).unwrap();
    let s = solve_lp(&m, None, &opts()).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.x[0] - 2.0).abs() < 1e-9);
    assert!((s.objective - 2.0).abs() < 1e-9);
    assert!((s.duals[0] - 1.0).abs() < 1e-9);
}

#[test]
fn symmetric_le_row() {
    let m = Model::generic(
        &[(0.0, 1.0, -1.0, false), (0.0, 1.0, -1.0, false)],
        vec![(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0)],
    )
    .unwrap();
    let s = solve_lp(&m, None, &opts()).unwrap();
    assert!((s.objective + 1.0).abs() < 1e-9);
    assert!((s.duals[0] + 1.0).abs() < 1e-9);
}

#[test]
fn infeasible_and_unbounded_lps() {
    let m = Model::generic(
        &[(0.0, 1.0, 1.0, false)],
        vec![(vec![(0, 1.0)], Sense::Ge, 2.0)],
    )
    .unwrap();
    let s = solve_lp(&m, None, &opts()).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
    assert_eq!(s.infeasible_row, Some(0));

    let m = Model::generic(
        &[(0.0, f64::INFINITY, -1.0, false), (0.0, f64::INFINITY, 0.0, false)],
        vec![(vec![(0, 1.0), (1, -1.0)], Sense::Le, 1.0)],
    )
    .unwrap();
    assert_eq!(solve_lp(&m, None, &opts()).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn free_column_and_equality() {
    // min x + 2y, x free, x + y = 3, x - y >= -1, y in [0, 5] -> y = 0, x = 3.
    let m = Model::generic(
        &[(f64::NEG_INFINITY, f64::INFINITY, 1.0, false), (0.0, 5.0, 2.0, false)],
        vec![
            (vec![(0, 1.0), (1, 1.0)], Sense::Eq, 3.0),
            (vec![(0, 1.0), (1, -1.0)], Sense::Ge, -1.0),
        ],
    )
    .unwrap();
    let s = solve_lp(&m, None, &opts()).unwrap();
    assert!((s.x[0] - 3.0).abs() < 1e-9 && s.x[1].abs() < 1e-9);
    assert!((s.duals[0] - 1.0).abs() < 1e-9);
    assert!(s.duals[1].abs() < 1e-9);
}

#[test]
fn integral_relaxation_needs_no_branching() {
    let m = Model::generic(
        &[(0.0, 1.0, -1.0, true), (0.0, 1.0, -1.0, true)],
        vec![(vec![(0, 1.0), (1, 1.0)], Sense::Le, 2.0)],
    )
    .unwrap();
    let s = solve_milp(&m, &opts()).unwrap();
    assert_eq!(s.nodes, 1);
    assert_eq!(s.assignment, vec![1.0, 1.0]);
}

#[test]
fn knapsack_matches_enumeration() {
    let w = [4.0, 3.0, 2.0];
    let v = [5.0, 4.0, 3.0];
    let cap = 6.0;
    let cols: Vec<_> = v.iter().map(|&vi| (0.0, 1.0, -vi, true)).collect();
    let m = Model::generic(
        &cols,
        vec![((0..3).map(|j| (j, w[j])).collect(), Sense::Le, cap)],
    )
    .unwrap();
    let mut best = 0.0_f64;
    for code in 0..8 {
        let pick: Vec<bool> = (0..3).map(|j| code >> j & 1 == 1).collect();
        let weight: f64 = (0..3).filter(|&j| pick[j]).map(|j| w[j]).sum();
        if weight <= cap {
            best = best.max((0..3).filter(|&j| pick[j]).map(|j| v[j]).sum());
        }
    }
    let s = solve_milp(&m, &opts()).unwrap();
    assert!((s.objective + best).abs() < 1e-9);
    let b = brute_force_milp(&m, &opts()).unwrap();
    assert!((b.objective + best).abs() < 1e-9);
    assert_eq!(b.assignment, s.assignment);
}

#[test]
fn brute_force_guards() {
    let cols = vec![(0.0, 1.0, 0.0, true); 21];
    let m = Model::generic(&cols, vec![]).unwrap();
    assert!(matches!(
        brute_force_milp(&m, &opts()),
        Err(crate::Error::TooManyBinaries { found: 21, max: 20 })
    ));
    let m = Model::generic(&[(0.0, 3.0, 1.0, false)], vec![(vec![(0, 1.0)], Sense::Ge, 1.0)]).unwrap();
    let s = brute_force_milp(&m, &opts()).unwrap();
    assert!((s.objective - 1.0).abs() < 1e-9);
    let m = Model::generic(&[(0.0, 1.0, 1.0, true)], vec![(vec![(0, 1.0)], Sense::Ge, 2.0)]).unwrap();
    assert!(matches!(brute_force_milp(&m, &opts()), Err(crate::Error::Infeasible { .. })));
}

#[test]
fn assignment_length_is_checked() {
    let (inst, scen) = builtin_case(CaseMode::Deterministic);
    let model = assemble(&inst.truncated(2), &scen_truncate(&scen, 2)).unwrap();
    assert!(matches!(
        fix_and_price(&model, &[0.0], &opts()),
        Err(crate::Error::AssignmentLength { found: 1, expected: 3 })
    ));
}

fn scen_truncate(scen: &crate::scenario::ScenarioSet, hours: usize) -> crate::scenario::ScenarioSet {
    let mut out = scen.clone();
    for s in &mut out.scenarios {
        for r in &mut s.reag {
            r.truncate(hours);
        }
        for l in &mut s.loads {
            l.p.truncate(hours);
            l.q.truncate(hours);
        }
        s.rt_buy.truncate(hours);
        s.rt_sell.truncate(hours);
    }
    out
}

#[test]
fn committing_an_unfillable_station_is_infeasible() {
    // Two hours of charging at 5 MW cannot lift 2 MWh to 90 % of 20 MWh.
    let (inst, scen) = builtin_case(CaseMode::Deterministic);
    let inst = inst.truncated(2);
    let model = assemble(&inst, &scen_truncate(&scen, 2)).unwrap();
    let s = fix_and_price(&model, &[0.0, 0.0, 1.0], &opts()).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
    let milp = solve_milp(&model, &opts()).unwrap();
    assert_eq!(milp.assignment[2], 0.0);
}

#[test]
fn milp_matches_enumeration_on_short_horizon() {
    let (inst, scen) = builtin_case(CaseMode::SingleUncertainty);
    let model = assemble(&inst.truncated(3), &scen_truncate(&scen, 3)).unwrap();
    let a = solve_milp(&model, &opts()).unwrap();
    let b = brute_force_milp(&model, &opts()).unwrap();
    assert!((a.objective - b.objective).abs() < 1e-6);
    assert!(model.max_violation(&a.x).0 < 1e-7);
}

#[test]
fn solves_are_deterministic() {
    let (inst, scen) = builtin_case(CaseMode::Deterministic);
    let model = assemble(&inst, &scen).unwrap();
    let a = solve_milp(&model, &opts()).unwrap();
    let b = solve_milp(&model, &opts()).unwrap();
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    assert_eq!(a.pricing.basis, b.pricing.basis);
    assert_eq!(a.pricing.duals, b.pricing.duals);
}

#[test]
fn implied_rows_are_valid_for_integer_points() {
    let (inst, scen) = builtin_case(CaseMode::Deterministic);
    let model = assemble(&inst, &scen).unwrap();
    let cuts = milp::implied_bound_rows(&model);
    // One per ESAG hour for each mode ceiling, plus one per EVCS window hour.
    assert_eq!(cuts.len(), 24 * 2 + 9);
    let sol = solve_milp(&model, &opts()).unwrap();
    for c in &cuts {
        assert!(c.violation(&sol.x) < 1e-7, "{}", c.tag);
    }
}
