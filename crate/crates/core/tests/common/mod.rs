#![allow(dead_code)]

use dso_core::instance::{
    Branch, DdgagSpec, Flags, Instance, Network, PriceData, Provenance, RegulationOffer,
    TimeHorizon,
};
use dso_core::model::{Model, Sense};
use dso_core::solver::{LpSolution, LpStatus};
use rand::Rng;

/// Two-bus feeder with a substation at bus 1 and no aggregators.
pub fn two_bus(hours: usize, da: f64) -> Instance {
    Instance {
        horizon: TimeHorizon {
            hours: (1..=hours as u32).collect(),
        },
        network: Network {
            buses: vec![1, 2],
            substation_bus: 1,
            v_min: 0.9,
            v_max: 1.1,
            s_base: 100.0,
            branches: vec![Branch {
                id: 1,
                from: 1,
                to: 2,
                r: 0.01,
                x: 0.02,
                pl_max: 50.0,
                ql_max: 50.0,
            }],
        },
        prices: PriceData {
            da_energy: vec![da; hours],
            cap_up: vec![5.0; hours],
            cap_dn: vec![4.0; hours],
            mil_up: vec![1.0; hours],
            mil_dn: vec![1.0; hours],
            s_up: vec![1.0; hours],
            s_dn: vec![1.0; hours],
            mu_up: vec![0.9; hours],
            mu_dn: vec![0.9; hours],
        },
        flags: Flags::default(),
        loads: Vec::new(),
        drag: Vec::new(),
        esag: Vec::new(),
        evcs: Vec::new(),
        ddgag: Vec::new(),
        reag: Vec::new(),
        provenance: Provenance::default(),
    }
}

pub fn ddg(bus: u32, hours: usize, p_min: f64, p_max: f64, price: f64) -> DdgagSpec {
    DdgagSpec {
        id: 1,
        bus,
        p_min,
        p_max,
        ru: 1.0,
        rd: 1.0,
        tan_phi: 0.0,
        energy_price: vec![price; hours],
        regulation: RegulationOffer::flat(hours, 1.0, 1.0, 0.1, 0.1),
    }
}

/// Random LP with finite bounds that is feasible by construction: the right-hand
/// sides are placed around the activity of a point inside the box.
pub fn random_lp<R: Rng>(rng: &mut R, m: usize, n: usize) -> Model {
    let mut cols = Vec::with_capacity(n);
    let mut x0 = Vec::with_capacity(n);
    for _ in 0..n {
        let lo: f64 = rng.gen_range(-5.0..2.0);
        let hi = lo + rng.gen_range(0.5..8.0);
        x0.push(rng.gen_range(lo..=hi));
        cols.push((lo, hi, rng.gen_range(-10.0..10.0), false));
    }
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let mut coefs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.5) {
                coefs.push((j, rng.gen_range(-5.0..5.0)));
            }
        }
        if coefs.is_empty() {
            coefs.push((rng.gen_range(0..n), 1.0));
        }
        let act: f64 = coefs.iter().map(|&(j, a)| a * x0[j]).sum();
        let (sense, rhs) = match rng.gen_range(0..3) {
            0 => (Sense::Le, act + rng.gen_range(0.0..3.0)),
            1 => (Sense::Ge, act - rng.gen_range(0.0..3.0)),
            _ => (Sense::Eq, act),
        };
        rows.push((coefs, sense, rhs));
    }
    Model::generic(&cols, rows).expect("valid generic model")
}

pub struct DualCheck {
    pub gap: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
}

/// Strong-duality and complementary-slackness residuals of an optimal solution,
/// recomputing reduced costs from the returned row duals.
pub fn dual_check(model: &Model, sol: &LpSolution) -> DualCheck {
    assert_eq!(sol.status, LpStatus::Optimal);
    let n = model.num_cols();
    let mut d = model.cost.clone();
    let mut dual_inf: f64 = 0.0;
    let mut comp: f64 = 0.0;
    let mut dual_obj = 0.0;
    for (i, row) in model.rows.iter().enumerate() {
        let y = sol.duals[i];
        for &(j, a) in &row.coefs {
            d[j] -= a * y;
        }
        dual_obj += y * row.rhs;
        match row.sense {
            Sense::Le => dual_inf = dual_inf.max(y),
            Sense::Ge => dual_inf = dual_inf.max(-y),
            Sense::Eq => {}
        }
        comp = comp.max((y * (row.activity(&sol.x) - row.rhs)).abs());
    }
    for j in 0..n {
        let (lo, hi) = (model.lower(j), model.upper(j));
        let x = sol.x[j];
        if d[j] > 0.0 {
            dual_obj += d[j] * lo;
            comp = comp.max(d[j] * (x - lo));
        } else {
            dual_obj += d[j] * hi;
            comp = comp.max(-d[j] * (hi - x));
        }
    }
    DualCheck {
        gap: (sol.objective - dual_obj).abs(),
        dual_infeasibility: dual_inf,
        complementarity: comp,
    }
}

/// Brute-force LP optimum by enumerating every basic solution: choose `n` of the
/// row and bound hyperplanes, solve the square system, keep feasible points.
/// Returns `None` when no vertex is feasible.
pub fn vertex_oracle(model: &Model) -> Option<f64> {
    let n = model.num_cols();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &model.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coefs {
            a[j] = v;
        }
        planes.push((a, row.rhs));
    }
    for j in 0..n {
        for b in [model.lower(j), model.upper(j)] {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push((a, b));
        }
    }
    let feasible = |x: &[f64]| {
        let tol = 1e-7;
        (0..n).all(|j| x[j] >= model.lower(j) - tol && x[j] <= model.upper(j) + tol)
            && model.rows.iter().all(|r| r.violation(x) <= tol * (1.0 + r.rhs.abs()))
    };
    let mut best: Option<f64> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        if let Some(x) = solve_square(&planes, &pick, n) {
            if feasible(&x) {
                let obj = model.objective(&x);
                if best.map_or(true, |b| obj < b) {
                    best = Some(obj);
                }
            }
        }
        if !next_combination(&mut pick, planes.len()) {
            break;
        }
    }
    best
}

fn next_combination(pick: &mut [usize], total: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < total - k + i {
            pick[i] += 1;
            for l in i + 1..k {
                pick[l] = pick[l - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn solve_square(planes: &[(Vec<f64>, f64)], pick: &[usize], n: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = pick
        .iter()
        .map(|&p| {
            let mut r = planes[p].0.clone();
            r.push(planes[p].1);
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-9 {
            return None;
        }
        a.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..=n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Prints a pass/fail line and returns whether it passed.
pub fn report(id: u32, name: &str, pass: bool, detail: impl AsRef<str>) -> bool {
    println!(
        "criterion {id} [{}] {name}: {}",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    pass
}
