//! Bounded revised primal simplex.
//!
//! Every row `i` gets a logical variable `r_i` with `A x - r = 0`, bounded by
//! the row sense: `(-inf, b]` for `<=`, `[b, inf)` for `>=` and `[b, b]` for `=`.
//! The starting basis is all-logical unless a warm basis is supplied. Phase 1
//! minimizes the sum of bound violations of basic variables, phase 2 the cost.
//! An optional third phase minimizes a secondary cost over the face of optimal
//! solutions without moving the primary duals.

use crate::error::{Error, Result};
use crate::model::{Model, Row, Sense};

use super::lu::{Factor, SparseCol};
use super::SolverOptions;

const REFACTOR_EVERY: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable held at zero.
    Zero,
}

/// Status of every structural column followed by every row logical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub status: Vec<VarStatus>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals as the derivative of the optimal cost with respect to the row's
    /// right-hand side: nonpositive on binding `<=` rows, nonnegative on `>=` rows.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
    /// Row whose logical is still out of bounds when phase 1 stalls.
    pub infeasible_row: Option<usize>,
}

/// Scaled column-major copy of a model's constraint matrix.
#[derive(Clone, Debug)]
pub struct BoundedLp {
    m: usize,
    n: usize,
    start: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    cost: Vec<f64>,
    tie: Vec<f64>,
    row_lo: Vec<f64>,
    row_hi: Vec<f64>,
}

fn pow2(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        1.0
    } else {
        2f64.powi(v.log2().round() as i32)
    }
}

impl BoundedLp {
    pub fn new(model: &Model) -> Self {
        Self::with_rows(model, &model.rows)
    }

    /// Builds the LP from the model's columns and objective with `rows` as
    /// the constraint set.
    pub fn with_rows(model: &Model, rows_in: &[Row]) -> Self {
        let m = rows_in.len();
        let n = model.num_cols();
        let mut counts = vec![0usize; n + 1];
        for r in rows_in {
            for &(j, _) in &r.coefs {
                counts[j + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let start = counts.clone();
        let mut fill = counts;
        let nnz = start[n];
        let mut rows = vec![0; nnz];
        let mut vals = vec![0.0; nnz];
        for (i, r) in rows_in.iter().enumerate() {
            for &(j, a) in &r.coefs {
                rows[fill[j]] = i;
                vals[fill[j]] = a;
                fill[j] += 1;
            }
        }

        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        for _ in 0..4 {
            let mut rmin = vec![f64::INFINITY; m];
            let mut rmax = vec![0.0_f64; m];
            for j in 0..n {
                for k in start[j]..start[j + 1] {
                    let a = (vals[k] * row_scale[rows[k]] * col_scale[j]).abs();
                    rmin[rows[k]] = rmin[rows[k]].min(a);
                    rmax[rows[k]] = rmax[rows[k]].max(a);
                }
            }
            for i in 0..m {
                if rmax[i] > 0.0 {
                    row_scale[i] /= (rmin[i] * rmax[i]).sqrt();
                }
            }
            for j in 0..n {
                let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
                for k in start[j]..start[j + 1] {
                    let a = (vals[k] * row_scale[rows[k]] * col_scale[j]).abs();
                    lo = lo.min(a);
                    hi = hi.max(a);
                }
                if hi > 0.0 {
                    col_scale[j] /= (lo * hi).sqrt();
                }
            }
        }
        for s in row_scale.iter_mut().chain(col_scale.iter_mut()) {
            *s = pow2(*s);
        }
        for j in 0..n {
            for k in start[j]..start[j + 1] {
                vals[k] *= row_scale[rows[k]] * col_scale[j];
            }
        }

        let cost = (0..n).map(|j| model.cost[j] * col_scale[j]).collect();
        let tie = (0..n).map(|j| model.tie_break[j] * col_scale[j]).collect();
        let mut row_lo = vec![0.0; m];
        let mut row_hi = vec![0.0; m];
        for (i, r) in rows_in.iter().enumerate() {
            let b = r.rhs * row_scale[i];
            let (lo, hi) = match r.sense {
                Sense::Le => (f64::NEG_INFINITY, b),
                Sense::Ge => (b, f64::INFINITY),
                Sense::Eq => (b, b),
            };
            row_lo[i] = lo;
            row_hi[i] = hi;
        }
        Self {
            m,
            n,
            start,
            rows,
            vals,
            row_scale,
            col_scale,
            cost,
            tie,
            row_lo,
            row_hi,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn num_cols(&self) -> usize {
        self.n
    }

    fn column(&self, j: usize) -> SparseCol {
        if j < self.n {
            (self.start[j]..self.start[j + 1])
                .map(|k| (self.rows[k], self.vals[k]))
                .collect()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (self.start[j]..self.start[j + 1])
                .map(|k| self.vals[k] * y[self.rows[k]])
                .sum()
        } else {
            -y[j - self.n]
        }
    }

    /// Solves the LP over structural bounds `lo`/`hi` (unscaled).
    pub fn solve(
        &self,
        lo: &[f64],
        hi: &[f64],
        warm: Option<&Basis>,
        tie_break: bool,
        opts: &SolverOptions,
    ) -> Result<LpSolution> {
        let mut s = Simplex::new(self, lo, hi, warm, opts);
        s.run(tie_break)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
    Tie,
}

struct Simplex<'a> {
    d: &'a BoundedLp,
    opts: &'a SolverOptions,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    factor: Factor,
    iterations: usize,
    allowed: Vec<bool>,
}

impl<'a> Simplex<'a> {
    fn new(d: &'a BoundedLp, lo: &[f64], hi: &[f64], warm: Option<&Basis>, opts: &'a SolverOptions) -> Self {
        let (m, n) = (d.m, d.n);
        let mut slo = Vec::with_capacity(n + m);
        let mut shi = Vec::with_capacity(n + m);
        for j in 0..n {
            slo.push(lo[j] / d.col_scale[j]);
            shi.push(hi[j] / d.col_scale[j]);
        }
        slo.extend_from_slice(&d.row_lo);
        shi.extend_from_slice(&d.row_hi);

        let warm = warm.filter(|b| {
            b.status.len() == n + m && b.status.iter().filter(|&&s| s == VarStatus::Basic).count() == m
        });
        let mut status = match warm {
            Some(b) => b.status.clone(),
            None => {
                let mut s = vec![VarStatus::Lower; n + m];
                for v in s.iter_mut().skip(n) {
                    *v = VarStatus::Basic;
                }
                s
            }
        };
        let mut x = vec![0.0; n + m];
        for j in 0..n + m {
            if status[j] != VarStatus::Basic {
                status[j] = nonbasic_status(status[j], slo[j], shi[j]);
                x[j] = nonbasic_value(status[j], slo[j], shi[j]);
            }
        }
        let head: Vec<usize> = (0..n + m).filter(|&j| status[j] == VarStatus::Basic).collect();
        let mut s = Simplex {
            d,
            opts,
            lo: slo,
            hi: shi,
            x,
            status,
            head,
            factor: Factor::new(0, &[]).factor,
            iterations: 0,
            allowed: Vec::new(),
        };
        s.refactor();
        s
    }

    fn refactor(&mut self) {
        let cols: Vec<SparseCol> = self.head.iter().map(|&j| self.d.column(j)).collect();
        let fz = Factor::new(self.d.m, &cols);
        self.factor = fz.factor;
        for (pos, row) in fz.replaced {
            let out = self.head[pos];
            let st = nonbasic_status(VarStatus::Lower, self.lo[out], self.hi[out]);
            self.status[out] = st;
            self.x[out] = nonbasic_value(st, self.lo[out], self.hi[out]);
            let slack = self.d.n + row;
            self.head[pos] = slack;
            self.status[slack] = VarStatus::Basic;
        }
        self.recompute_basic();
    }

    fn recompute_basic(&mut self) {
        let m = self.d.m;
        let mut rhs = vec![0.0; m];
        for j in 0..self.d.n + m {
            if self.status[j] != VarStatus::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                if j < self.d.n {
                    for k in self.d.start[j]..self.d.start[j + 1] {
                        rhs[self.d.rows[k]] -= self.d.vals[k] * xj;
                    }
                } else {
                    rhs[j - self.d.n] += xj;
                }
            }
        }
        self.factor.ftran(&mut rhs);
        for (p, &j) in self.head.iter().enumerate() {
            self.x[j] = rhs[p];
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        (self.lo[j] - self.x[j]).max(self.x[j] - self.hi[j]).max(0.0)
    }

    fn basic_costs(&self, phase: Phase) -> Vec<f64> {
        let tol = self.opts.feas_tol;
        let n = self.d.n;
        self.head
            .iter()
            .map(|&j| match phase {
                Phase::One => {
                    if self.x[j] < self.lo[j] - tol {
                        -1.0
                    } else if self.x[j] > self.hi[j] + tol {
                        1.0
                    } else {
                        0.0
                    }
                }
                Phase::Two => {
                    if j < n {
                        self.d.cost[j]
                    } else {
                        0.0
                    }
                }
                Phase::Tie => {
                    if j < n {
                        self.d.tie[j]
                    } else {
                        0.0
                    }
                }
            })
            .collect()
    }

    fn cost_of(&self, j: usize, phase: Phase) -> f64 {
        if j >= self.d.n {
            return 0.0;
        }
        match phase {
            Phase::One => 0.0,
            Phase::Two => self.d.cost[j],
            Phase::Tie => self.d.tie[j],
        }
    }

    fn duals(&mut self, phase: Phase) -> Vec<f64> {
        let mut y = self.basic_costs(phase);
        self.factor.btran(&mut y);
        y
    }

    /// Chooses an entering column: `(column, reduced cost)`.
    fn price(&self, y: &[f64], phase: Phase, bland: bool) -> Option<(usize, f64)> {
        let tol = self.opts.opt_tol;
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.d.n + self.d.m {
            let st = self.status[j];
            if st == VarStatus::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            if phase == Phase::Tie && !self.allowed[j] {
                continue;
            }
            let dj = self.cost_of(j, phase) - self.d.dot(j, y);
            let eligible = match st {
                VarStatus::Lower => dj < -tol,
                VarStatus::Upper => dj > tol,
                VarStatus::Zero => dj.abs() > tol,
                VarStatus::Basic => false,
            };
            if !eligible {
                continue;
            }
            if bland {
                return Some((j, dj));
            }
            if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((j, dj));
            }
        }
        best
    }

    fn run(&mut self, tie_break: bool) -> Result<LpSolution> {
        let mut phase = Phase::One;
        let mut bland = false;
        let mut degenerate = 0usize;
        let mut checks = 0usize;
        let feas = self.opts.feas_tol;

        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(Error::NumericalBreakdown(format!(
                    "simplex iteration limit {} reached",
                    self.opts.max_iterations
                )));
            }
            if phase == Phase::One && self.head.iter().all(|&j| self.infeasibility(j) <= feas) {
                phase = Phase::Two;
                bland = false;
                degenerate = 0;
            }
            let y = self.duals(phase);
            let Some((q, dq)) = self.price(&y, phase, bland) else {
                match phase {
                    Phase::One => {
                        let row = self
                            .head
                            .iter()
                            .filter(|&&j| self.infeasibility(j) > feas)
                            .map(|&j| if j >= self.d.n { j - self.d.n } else { usize::MAX })
                            .min();
                        let row = row.filter(|&r| r != usize::MAX).or_else(|| self.worst_row());
                        return Ok(self.finish(LpStatus::Infeasible, row));
                    }
                    Phase::Two | Phase::Tie => {
                        // Confirm on a fresh factorization before declaring optimality.
                        self.refactor();
                        checks += 1;
                        if self.head.iter().any(|&j| self.infeasibility(j) > feas) {
                            if checks > 20 {
                                return Err(Error::NumericalBreakdown(
                                    "primal feasibility lost repeatedly after refactorization".into(),
                                ));
                            }
                            phase = Phase::One;
                            continue;
                        }
                        let y2 = self.duals(phase);
                        if self.price(&y2, phase, false).is_some() && checks <= 20 {
                            continue;
                        }
                        if phase == Phase::Two && tie_break {
                            let y = self.duals(Phase::Two);
                            let tol = self.opts.opt_tol;
                            self.allowed = (0..self.d.n + self.d.m)
                                .map(|j| {
                                    self.status[j] == VarStatus::Basic
                                        || (self.cost_of(j, Phase::Two) - self.d.dot(j, &y)).abs() <= tol
                                })
                                .collect();
                            phase = Phase::Tie;
                            bland = false;
                            degenerate = 0;
                            checks = 0;
                            continue;
                        }
                        return Ok(self.finish(LpStatus::Optimal, None));
                    }
                }
            };

            let dir = if dq < 0.0 { 1.0 } else { -1.0 };
            let mut alpha = vec![0.0; self.d.m];
            for (i, v) in self.d.column(q) {
                alpha[i] += v;
            }
            self.factor.ftran(&mut alpha);

            match self.ratio_test(q, dir, &alpha, phase) {
                Step::Unbounded => {
                    if phase == Phase::Two {
                        return Ok(self.finish(LpStatus::Unbounded, None));
                    }
                    return Err(Error::NumericalBreakdown(
                        "unbounded ray found outside the optimality phase".into(),
                    ));
                }
                Step::Flip(theta) => {
                    self.move_along(q, dir, theta, &alpha);
                    self.status[q] = if self.status[q] == VarStatus::Lower {
                        VarStatus::Upper
                    } else {
                        VarStatus::Lower
                    };
                    self.x[q] = nonbasic_value(self.status[q], self.lo[q], self.hi[q]);
                    degenerate = 0;
                    bland = false;
                }
                Step::Pivot { pos, theta, to_upper } => {
                    if alpha[pos].abs() < 1e-9 {
                        self.refactor();
                        self.iterations += 1;
                        bland = true;
                        continue;
                    }
                    self.move_along(q, dir, theta, &alpha);
                    let out = self.head[pos];
                    self.status[out] = if self.lo[out] == f64::NEG_INFINITY && self.hi[out] == f64::INFINITY {
                        VarStatus::Zero
                    } else if to_upper {
                        VarStatus::Upper
                    } else {
                        VarStatus::Lower
                    };
                    self.x[out] = nonbasic_value(self.status[out], self.lo[out], self.hi[out]);
                    if phase == Phase::Tie {
                        self.allowed[out] = true;
                    }
                    self.head[pos] = q;
                    self.status[q] = VarStatus::Basic;
                    self.factor.update(pos, &alpha);
                    if self.factor.num_updates() >= REFACTOR_EVERY {
                        self.refactor();
                    }
                    if theta * dq.abs() <= 1e-12 {
                        degenerate += 1;
                        if degenerate > 50 {
                            bland = true;
                        }
                    } else {
                        degenerate = 0;
                        bland = false;
                    }
                }
            }
            self.iterations += 1;
        }
    }

    fn move_along(&mut self, q: usize, dir: f64, theta: f64, alpha: &[f64]) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for (p, &j) in self.head.iter().enumerate() {
            if alpha[p] != 0.0 {
                self.x[j] -= dir * theta * alpha[p];
            }
        }
    }

    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], phase: Phase) -> Step {
        let tol = self.opts.feas_tol;
        let piv_tol = 1e-9;
        let flip = if self.status[q] == VarStatus::Zero {
            f64::INFINITY
        } else {
            self.hi[q] - self.lo[q]
        };

        // Each candidate: (position, exact ratio, relaxed ratio, lands on upper).
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new();
        for (p, &j) in self.head.iter().enumerate() {
            let a = alpha[p];
            if a.abs() <= piv_tol {
                continue;
            }
            let delta = -dir * a;
            let (x, lo, hi) = (self.x[j], self.lo[j], self.hi[j]);
            if phase == Phase::One && x < lo - tol {
                if delta > 0.0 {
                    let r = (lo - x) / delta;
                    cands.push((p, r, r, false));
                }
                continue;
            }
            if phase == Phase::One && x > hi + tol {
                if delta < 0.0 {
                    let r = (hi - x) / delta;
                    cands.push((p, r, r, true));
                }
                continue;
            }
            if delta < 0.0 && lo > f64::NEG_INFINITY {
                cands.push((p, ((x - lo) / -delta).max(0.0), (x - lo + tol) / -delta, false));
            } else if delta > 0.0 && hi < f64::INFINITY {
                cands.push((p, ((hi - x) / delta).max(0.0), (hi - x + tol) / delta, true));
            }
        }
        let theta_max = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        if theta_max == f64::INFINITY {
            return if flip < f64::INFINITY {
                Step::Flip(flip)
            } else {
                Step::Unbounded
            };
        }
        if flip <= theta_max {
            return Step::Flip(flip);
        }
        let mut best: Option<(usize, f64, bool)> = None;
        let mut best_a = 0.0;
        for &(p, exact, _, up) in &cands {
            if exact <= theta_max {
                let a = alpha[p].abs();
                let better = a > best_a || (a == best_a && best.map_or(true, |b| self.head[p] < self.head[b.0]));
                if better {
                    best_a = a;
                    best = Some((p, exact, up));
                }
            }
        }
        let (pos, theta, to_upper) = best.expect("a candidate attains the relaxed minimum");
        Step::Pivot {
            pos,
            theta: theta.max(0.0),
            to_upper,
        }
    }

    fn worst_row(&self) -> Option<usize> {
        let n = self.d.n;
        (0..self.d.m)
            .filter(|&i| self.infeasibility(n + i) > self.opts.feas_tol)
            .min()
    }

    fn finish(&mut self, status: LpStatus, infeasible_row: Option<usize>) -> LpSolution {
        let d = self.d;
        let (n, m) = (d.n, d.m);
        let y = self.duals(Phase::Two);
        let x: Vec<f64> = (0..n).map(|j| self.x[j] * d.col_scale[j]).collect();
        let duals: Vec<f64> = (0..m).map(|i| y[i] * d.row_scale[i]).collect();
        let reduced_costs: Vec<f64> = (0..n)
            .map(|j| (d.cost[j] - d.dot(j, &y)) / d.col_scale[j])
            .collect();
        let objective = (0..n).map(|j| d.cost[j] * self.x[j]).sum();
        LpSolution {
            status,
            x,
            objective,
            duals,
            reduced_costs,
            basis: Basis {
                status: self.status.clone(),
            },
            iterations: self.iterations,
            infeasible_row,
        }
    }
}

enum Step {
    Unbounded,
    Flip(f64),
    Pivot { pos: usize, theta: f64, to_upper: bool },
}

fn nonbasic_status(wanted: VarStatus, lo: f64, hi: f64) -> VarStatus {
    match wanted {
        VarStatus::Upper if hi < f64::INFINITY => VarStatus::Upper,
        VarStatus::Lower if lo > f64::NEG_INFINITY => VarStatus::Lower,
        _ if lo > f64::NEG_INFINITY => VarStatus::Lower,
        _ if hi < f64::INFINITY => VarStatus::Upper,
        _ => VarStatus::Zero,
    }
}

fn nonbasic_value(st: VarStatus, lo: f64, hi: f64) -> f64 {
    match st {
        VarStatus::Lower => lo,
        VarStatus::Upper => hi,
        _ => 0.0,
    }
}
