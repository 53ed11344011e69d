//! Branch and bound over binary columns, fixed-binary pricing and the
//! enumeration oracle.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Model, Row, Sense};

use super::simplex::{Basis, BoundedLp, LpSolution, LpStatus};
use super::SolverOptions;

/// Largest binary count accepted by [`brute_force_milp`].
pub const BRUTE_FORCE_MAX_BINARIES: usize = 20;

#[derive(Clone, Debug)]
pub struct MilpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Binary columns in model order, with their values.
    pub binaries: Vec<usize>,
    pub assignment: Vec<f64>,
    pub nodes: usize,
    pub lp_iterations: usize,
    /// Fixed-binary LP whose duals price the schedule.
    pub pricing: LpSolution,
    /// Solve trace: root bound, incumbent updates and the final summary.
    pub log: Vec<String>,
}

struct Node {
    bound: f64,
    id: usize,
    fixings: Vec<(usize, f64)>,
    warm: Arc<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Reversed so the max-heap pops the lowest bound, then the oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn bounds(model: &Model) -> (Vec<f64>, Vec<f64>) {
    (
        model.columns().iter().map(|c| c.lo).collect(),
        model.columns().iter().map(|c| c.hi).collect(),
    )
}

fn infeasible_error(model: &Model, lp: &LpSolution) -> Error {
    let hint = lp
        .infeasible_row
        .map(|i| model.rows[i].tag.to_string())
        .unwrap_or_else(|| "no row isolated".to_string());
    Error::Infeasible { hint }
}

/// Most fractional binary, ties broken by lowest column id.
fn branching_column(binaries: &[usize], x: &[f64], tol: f64) -> Option<usize> {
    let mut best = None;
    let mut best_frac = tol;
    for &j in binaries {
        let f = x[j] - x[j].floor();
        let frac = f.min(1.0 - f);
        if frac > best_frac {
            best_frac = frac;
            best = Some(j);
        }
    }
    best
}

/// Variable-upper-bound rows `x - M b <= 0` (`on` polarity) or `x + M b <= M`
/// (`off` polarity): column `x` is forced to zero by binary `b`.
fn vub_map(model: &Model) -> HashMap<usize, Vec<(usize, bool)>> {
    let mut map: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
    for r in &model.rows {
        if r.sense != Sense::Le || r.coefs.len() != 2 {
            continue;
        }
        for (xi, bi) in [(0, 1), (1, 0)] {
            let (x, ax) = r.coefs[xi];
            let (b, ab) = r.coefs[bi];
            if !model.columns()[b].binary || model.columns()[x].binary || ax <= 0.0 || model.lower(x) != 0.0 {
                continue;
            }
            if ab < 0.0 && r.rhs == 0.0 {
                map.entry(x).or_default().push((b, true));
            } else if ab > 0.0 && (r.rhs - ab).abs() <= 1e-12 * ab.max(1.0) {
                map.entry(x).or_default().push((b, false));
            }
        }
    }
    map
}

/// Valid inequalities for the relaxation: a row `sum a_j x_j <= U` with
/// `a_j > 0` whose every column is switched off by the same binary `b` also
/// holds as `sum a_j x_j <= U b` (or `<= U (1 - b)` for the opposite polarity).
pub(crate) fn implied_bound_rows(model: &Model) -> Vec<Row> {
    let vub = vub_map(model);
    let mut out = Vec::new();
    for r in &model.rows {
        if r.sense != Sense::Le || r.rhs <= 0.0 || r.coefs.len() < 2 {
            continue;
        }
        if r.coefs.iter().any(|&(j, a)| a <= 0.0 || model.columns()[j].binary) {
            continue;
        }
        let first = match vub.get(&r.coefs[0].0) {
            Some(v) => v.clone(),
            None => continue,
        };
        for (b, on) in first {
            let shared = r.coefs.iter().all(|&(j, _)| {
                vub.get(&j).is_some_and(|v| v.contains(&(b, on)))
            });
            if !shared {
                continue;
            }
            let mut coefs = r.coefs.clone();
            let (cb, rhs) = if on { (-r.rhs, 0.0) } else { (r.rhs, r.rhs) };
            coefs.push((b, cb));
            coefs.sort_by_key(|&(j, _)| j);
            out.push(Row {
                tag: r.tag,
                coefs,
                sense: Sense::Le,
                rhs,
            });
        }
    }
    out
}

/// Solves the MILP to global optimality within the absolute gap, then prices
/// the incumbent with [`fix_and_price`].
pub fn solve_milp(model: &Model, opts: &SolverOptions) -> Result<MilpSolution> {
    let mut rows = model.rows.clone();
    rows.extend(implied_bound_rows(model));
    let lp = BoundedLp::with_rows(model, &rows);
    let (lo0, hi0) = bounds(model);
    let binaries = model.binaries();
    let mut log = Vec::new();
    let mut lp_iterations = 0;

    let root = lp.solve(&lo0, &hi0, None, false, opts)?;
    lp_iterations += root.iterations;
    match root.status {
        LpStatus::Infeasible => return Err(infeasible_error(model, &root)),
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::Optimal => {}
    }
    log.push(format!(
        "root relaxation objective {:.9} after {} pivots",
        root.objective, root.iterations
    ));

    let mut heap = BinaryHeap::new();
    let mut next_id = 1;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    heap.push(Node {
        bound: root.objective,
        id: 0,
        fixings: Vec::new(),
        warm: Arc::new(root.basis.clone()),
    });
    let mut root_solution = Some(root);

    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            if node.bound >= best - opts.gap_tol {
                break;
            }
        }
        if nodes >= opts.max_nodes {
            return Err(Error::NumericalBreakdown(format!(
                "branch-and-bound node limit {} reached",
                opts.max_nodes
            )));
        }
        nodes += 1;
        let sol = match root_solution.take() {
            Some(s) => s,
            None => {
                let (mut lo, mut hi) = (lo0.clone(), hi0.clone());
                for &(j, v) in &node.fixings {
                    lo[j] = v;
                    hi[j] = v;
                }
                let s = lp.solve(&lo, &hi, Some(&node.warm), false, opts)?;
                lp_iterations += s.iterations;
                s
            }
        };
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => return Err(Error::Unbounded),
            LpStatus::Optimal => {}
        }
        if let Some((best, _)) = &incumbent {
            if sol.objective >= best - opts.gap_tol {
                continue;
            }
        }
        match branching_column(&binaries, &sol.x, opts.int_tol) {
            None => {
                log.push(format!(
                    "node {} depth {}: incumbent {:.9}",
                    node.id,
                    node.fixings.len(),
                    sol.objective
                ));
                let values = binaries.iter().map(|&j| sol.x[j].round()).collect();
                incumbent = Some((sol.objective, values));
            }
            Some(j) => {
                let warm = Arc::new(sol.basis);
                for v in [0.0, 1.0] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v));
                    heap.push(Node {
                        bound: sol.objective,
                        id: next_id,
                        fixings,
                        warm: Arc::clone(&warm),
                    });
                    next_id += 1;
                }
            }
        }
    }

    let Some((best, assignment)) = incumbent else {
        return Err(Error::Infeasible {
            hint: "no binary assignment admits a feasible schedule".to_string(),
        });
    };
    log.push(format!(
        "optimal objective {best:.9}: {nodes} nodes, {lp_iterations} pivots"
    ));
    let pricing = fix_and_price(model, &assignment, opts)?;
    if pricing.status != LpStatus::Optimal {
        return Err(Error::NumericalBreakdown(
            "fixed-binary re-solve of the incumbent is not optimal".to_string(),
        ));
    }
    lp_iterations += pricing.iterations;
    Ok(MilpSolution {
        status: LpStatus::Optimal,
        x: pricing.x.clone(),
        objective: pricing.objective,
        binaries,
        assignment,
        nodes,
        lp_iterations,
        pricing,
        log,
    })
}

/// Re-solves with every binary fixed to `assignment` (model binary order) and
/// returns the duals of the resulting LP. Ties among optimal schedules are
/// broken toward the least real-time trade and spill.
pub fn fix_and_price(model: &Model, assignment: &[f64], opts: &SolverOptions) -> Result<LpSolution> {
    fix_and_solve(model, &BoundedLp::new(model), assignment, None, true, opts)
}

fn fix_and_solve(
    model: &Model,
    lp: &BoundedLp,
    assignment: &[f64],
    warm: Option<&Basis>,
    tie_break: bool,
    opts: &SolverOptions,
) -> Result<LpSolution> {
    let binaries = model.binaries();
    if assignment.len() != binaries.len() {
        return Err(Error::AssignmentLength {
            found: assignment.len(),
            expected: binaries.len(),
        });
    }
    let (mut lo, mut hi) = bounds(model);
    for (&j, &v) in binaries.iter().zip(assignment) {
        if (v - v.round()).abs() > opts.int_tol || !(0.0..=1.0).contains(&v.round()) {
            return Err(Error::InvalidArgument(format!(
                "binary {} assigned non-binary value {v}",
                model.column_name(j)
            )));
        }
        lo[j] = v.round();
        hi[j] = v.round();
    }
    lp.solve(&lo, &hi, warm, tie_break, opts)
}

/// Exhaustive enumeration of binary assignments in lexicographic order (first
/// binary most significant); the first assignment attaining the minimum wins.
pub fn brute_force_milp(model: &Model, opts: &SolverOptions) -> Result<MilpSolution> {
    let binaries = model.binaries();
    let k = binaries.len();
    if k > BRUTE_FORCE_MAX_BINARIES {
        return Err(Error::TooManyBinaries {
            found: k,
            max: BRUTE_FORCE_MAX_BINARIES,
        });
    }
    let lp = BoundedLp::new(model);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut warm: Option<Basis> = None;
    let mut lp_iterations = 0;
    let mut last_infeasible = None;
    for code in 0u32..(1u32 << k) {
        let assignment: Vec<f64> = (0..k)
            .map(|b| ((code >> (k - 1 - b)) & 1) as f64)
            .collect();
        let sol = fix_and_solve(model, &lp, &assignment, warm.as_ref(), false, opts)?;
        lp_iterations += sol.iterations;
        match sol.status {
            LpStatus::Optimal => {
                if best.as_ref().map_or(true, |(b, _)| sol.objective < b - 1e-9) {
                    best = Some((sol.objective, assignment));
                }
            }
            LpStatus::Unbounded => return Err(Error::Unbounded),
            LpStatus::Infeasible => last_infeasible = Some(sol.clone()),
        }
        warm = Some(sol.basis);
    }
    let Some((_, assignment)) = best else {
        return Err(match last_infeasible {
            Some(sol) => infeasible_error(model, &sol),
            None => Error::Infeasible {
                hint: "no assignment".to_string(),
            },
        });
    };
    let pricing = fix_and_price(model, &assignment, opts)?;
    lp_iterations += pricing.iterations;
    Ok(MilpSolution {
        status: LpStatus::Optimal,
        x: pricing.x.clone(),
        objective: pricing.objective,
        binaries,
        assignment,
        nodes: 1 << k,
        lp_iterations,
        pricing,
        log: vec![format!("enumerated {} assignments", 1u64 << k)],
    })
}
