//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! The basis `B` is factorized column by column (left-looking) with partial
//! pivoting as `B Q = M U`, where column `p` of `M` is `e_{piv[p]} + L_p` and
//! `L_p` is supported on rows pivoted after `p`. Columns are processed in
//! ascending nonzero count so slack columns come first and create no fill.

/// Sparse column: `(row, value)` pairs.
pub type SparseCol = Vec<(usize, f64)>;

const PIVOT_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
struct Eta {
    pos: usize,
    /// Entries of the FTRAN'd entering column, pivot excluded.
    col: SparseCol,
    pivot: f64,
}

#[derive(Clone, Debug)]
pub struct Factor {
    m: usize,
    /// Basis position of the `k`-th processed column.
    q: Vec<usize>,
    /// Original row pivoted at step `k`.
    piv: Vec<usize>,
    l: Vec<SparseCol>,
    /// Strict upper part of column `k`, indexed by step.
    u: Vec<SparseCol>,
    diag: Vec<f64>,
    etas: Vec<Eta>,
    work: Vec<f64>,
}

/// Result of factorizing: the factor plus any basis positions that were
/// linearly dependent and have been replaced by the slack of `row`.
pub struct Factorized {
    pub factor: Factor,
    pub replaced: Vec<(usize, usize)>,
}

impl Factor {
    /// Factorizes the `m x m` basis whose position `k` holds column `cols[k]`.
    pub fn new(m: usize, cols: &[SparseCol]) -> Factorized {
        debug_assert_eq!(cols.len(), m);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&k| (cols[k].len(), k));

        let mut f = Factor {
            m,
            q: Vec::with_capacity(m),
            piv: Vec::with_capacity(m),
            l: Vec::with_capacity(m),
            u: Vec::with_capacity(m),
            diag: Vec::with_capacity(m),
            etas: Vec::new(),
            work: vec![0.0; m],
        };
        let mut step_of_row: Vec<Option<usize>> = vec![None; m];
        let mut x = vec![0.0; m];
        let mut mark = vec![false; m];
        let mut pattern: Vec<usize> = Vec::new();
        let mut deferred = Vec::new();

        for &pos in &order {
            pattern.clear();
            for &(i, v) in &cols[pos] {
                if !mark[i] {
                    mark[i] = true;
                    pattern.push(i);
                }
                x[i] += v;
            }
            // Apply earlier eliminations in step order. Only steps whose pivot
            // row is in the pattern can contribute, so walk those in order.
            let mut steps: Vec<usize> = pattern.iter().filter_map(|&i| step_of_row[i]).collect();
            steps.sort_unstable();
            let mut heap = std::collections::BinaryHeap::new();
            for s in steps {
                heap.push(std::cmp::Reverse(s));
            }
            let mut ucol = Vec::new();
            let mut last = None;
            while let Some(std::cmp::Reverse(p)) = heap.pop() {
                if last == Some(p) {
                    continue;
                }
                last = Some(p);
                let vp = x[f.piv[p]];
                if vp == 0.0 {
                    continue;
                }
                ucol.push((p, vp));
                for &(i, lv) in &f.l[p] {
                    if !mark[i] {
                        mark[i] = true;
                        pattern.push(i);
                        if let Some(s) = step_of_row[i] {
                            heap.push(std::cmp::Reverse(s));
                        }
                    }
                    x[i] -= lv * vp;
                }
            }
            let mut best = None;
            let mut best_abs = PIVOT_TOL;
            for &i in &pattern {
                if step_of_row[i].is_none() && x[i].abs() > best_abs {
                    best_abs = x[i].abs();
                    best = Some(i);
                }
            }
            match best {
                Some(r) => {
                    let d = x[r];
                    let lcol: SparseCol = pattern
                        .iter()
                        .filter(|&&i| step_of_row[i].is_none() && i != r && x[i] != 0.0)
                        .map(|&i| (i, x[i] / d))
                        .collect();
                    let k = f.q.len();
                    step_of_row[r] = Some(k);
                    f.q.push(pos);
                    f.piv.push(r);
                    f.l.push(lcol);
                    f.u.push(ucol);
                    f.diag.push(d);
                }
                None => deferred.push(pos),
            }
            for &i in &pattern {
                x[i] = 0.0;
                mark[i] = false;
            }
        }

        let mut replaced = Vec::new();
        if !deferred.is_empty() {
            let free_rows: Vec<usize> = (0..m).filter(|&i| step_of_row[i].is_none()).collect();
            for (pos, r) in deferred.into_iter().zip(free_rows) {
                let k = f.q.len();
                step_of_row[r] = Some(k);
                f.q.push(pos);
                f.piv.push(r);
                f.l.push(Vec::new());
                f.u.push(Vec::new());
                f.diag.push(-1.0);
                replaced.push((pos, r));
            }
        }
        Factorized {
            factor: f,
            replaced,
        }
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B z = b` in place; `b` is indexed by row, `z` by basis position.
    pub fn ftran(&mut self, b: &mut [f64]) {
        let m = self.m;
        let v = &mut self.work;
        for p in 0..m {
            let vp = b[self.piv[p]];
            v[p] = vp;
            if vp != 0.0 {
                for &(i, lv) in &self.l[p] {
                    b[i] -= lv * vp;
                }
            }
        }
        for k in (0..m).rev() {
            let wk = v[k] / self.diag[k];
            v[k] = wk;
            if wk != 0.0 {
                for &(p, uv) in &self.u[k] {
                    v[p] -= uv * wk;
                }
            }
        }
        for k in 0..m {
            b[self.q[k]] = v[k];
        }
        for e in &self.etas {
            let zr = b[e.pos] / e.pivot;
            b[e.pos] = zr;
            if zr != 0.0 {
                for &(i, a) in &e.col {
                    b[i] -= a * zr;
                }
            }
        }
    }

    /// Solves `B^T y = c` in place; `c` is indexed by basis position, `y` by row.
    pub fn btran(&mut self, c: &mut [f64]) {
        let m = self.m;
        for e in self.etas.iter().rev() {
            let mut s = c[e.pos];
            for &(i, a) in &e.col {
                s -= c[i] * a;
            }
            c[e.pos] = s / e.pivot;
        }
        let h = &mut self.work;
        for k in 0..m {
            let mut s = c[self.q[k]];
            for &(p, uv) in &self.u[k] {
                s -= uv * h[p];
            }
            h[k] = s / self.diag[k];
        }
        for p in (0..m).rev() {
            let mut s = h[p];
            for &(i, lv) in &self.l[p] {
                s -= lv * c[i];
            }
            c[self.piv[p]] = s;
        }
    }

    /// Records the replacement of basis position `pos` by a column whose FTRAN
    /// image is `alpha` (dense, by basis position).
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let col = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a != 0.0)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            pos,
            col,
            pivot: alpha[pos],
        });
    }
}
