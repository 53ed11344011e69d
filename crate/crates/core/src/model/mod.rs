//! Sparse two-stage MILP of the DSO day-ahead scheduling problem.
//!
//! Rows are tagged with [`ConstraintTag`] keys so duals can be looked up by
//! (family, owner, hour, scenario). The active balance rows are oriented as
//! `injections - withdrawals - outflows = load`, which makes their duals equal
//! to the marginal cost of serving one more MW of load at the bus.

mod build;
mod index;
mod mps;
mod tag;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scenario::ScenarioSet;

pub use build::{
    add_day_ahead_network, add_ddgag_block, add_drag_block, add_esag_block, add_evcs_block,
    add_reag_block, add_real_time_network, build_objective, RowSink,
};
pub use index::{
    index_variables, ColumnSpec, DdgCols, DragCols, EsagCols, EvcsCols, NetworkCols,
    ScenarioCols, SubstationCols, VarKey, VarKind, VariableIndex,
};
pub use mps::{read_mps, write_mps, MpsModel};
pub use tag::{ConstraintTag, Family};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub tag: ConstraintTag,
    /// `(column, coefficient)` sorted by column, no duplicates, no zeros.
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row, zero when satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let ax = self.activity(x);
        match self.sense {
            Sense::Le => (ax - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - ax).max(0.0),
            Sense::Eq => (ax - self.rhs).abs(),
        }
    }
}

/// Minimization MILP with tagged rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub index: VariableIndex,
    pub cost: Vec<f64>,
    pub rows: Vec<Row>,
    /// Secondary objective used to break ties among optimal solutions: one unit
    /// per MW of real-time trade or spill, so exact ties settle day-ahead.
    pub tie_break: Vec<f64>,
    /// Scenario id and probability, in block order.
    pub scenarios: Vec<(u32, f64)>,
    tags: HashMap<ConstraintTag, usize>,
}

impl Model {
    pub fn from_parts(
        index: VariableIndex,
        cost: Vec<f64>,
        rows: Vec<Row>,
        tie_break: Vec<f64>,
        scenarios: Vec<(u32, f64)>,
    ) -> Result<Self> {
        let mut tags = HashMap::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if tags.insert(r.tag, i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate row tag {}", r.tag)));
            }
        }
        Ok(Self {
            index,
            cost,
            rows,
            tie_break,
            scenarios,
            tags,
        })
    }

    /// Builds a plain LP/MILP with generic column and row names, for tests and
    /// for exercising the solver outside the scheduling model.
    pub fn generic(
        columns: &[(f64, f64, f64, bool)],
        rows: Vec<(Vec<(usize, f64)>, Sense, f64)>,
    ) -> Result<Self> {
        let mut index = VariableIndex::default();
        let mut cost = Vec::with_capacity(columns.len());
        for (j, &(lo, hi, c, binary)) in columns.iter().enumerate() {
            if binary && (lo != 0.0 || hi != 1.0) {
                return Err(Error::InvalidArgument(format!("binary column {j} must have bounds [0, 1]")));
            }
            index.columns.push(ColumnSpec {
                key: VarKey {
                    kind: VarKind::FlowP,
                    owner: j as u32,
                    block: None,
                    hour: 0,
                    scenario: None,
                },
                lo,
                hi,
                binary,
            });
            cost.push(c);
        }
        index.first_stage = columns.len();
        let mut sink = RowSink::default();
        for (i, (coefs, sense, rhs)) in rows.into_iter().enumerate() {
            if coefs.iter().any(|&(j, a)| j >= columns.len() || !a.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {i} has a bad coefficient")));
            }
            sink.push(ConstraintTag::new(Family::Generic, i as u32, 0), coefs, sense, rhs);
        }
        let tie_break = vec![0.0; columns.len()];
        Self::from_parts(index, cost, sink.rows, tie_break, Vec::new())
    }

    pub fn num_cols(&self) -> usize {
        self.index.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.index.columns
    }

    pub fn lower(&self, j: usize) -> f64 {
        self.index.columns[j].lo
    }

    pub fn upper(&self, j: usize) -> f64 {
        self.index.columns[j].hi
    }

    pub fn binaries(&self) -> Vec<usize> {
        self.index.binaries()
    }

    pub fn row_of(&self, tag: &ConstraintTag) -> Option<usize> {
        self.tags.get(tag).copied()
    }

    pub fn probability(&self, scenario: u32) -> Option<f64> {
        self.scenarios
            .iter()
            .find(|&&(id, _)| id == scenario)
            .map(|&(_, p)| p)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound, row or integrality violation of `x`, with the tag of the
    /// worst row if a row is responsible.
    pub fn max_violation(&self, x: &[f64]) -> (f64, Option<ConstraintTag>) {
        let mut worst = 0.0_f64;
        let mut tag = None;
        for (j, c) in self.index.columns.iter().enumerate() {
            let v = (c.lo - x[j]).max(x[j] - c.hi).max(0.0);
            let v = if c.binary {
                v.max((x[j] - x[j].round()).abs())
            } else {
                v
            };
            worst = worst.max(v);
        }
        for r in &self.rows {
            let v = r.violation(x);
            if v > worst {
                worst = v;
                tag = Some(r.tag);
            }
        }
        (worst, tag)
    }

    /// Column values keyed by name, for reports.
    pub fn column_name(&self, j: usize) -> String {
        self.index.columns[j].key.name()
    }
}

fn build(inst: &Instance, scen: &ScenarioSet, day_ahead_only: bool) -> Result<Model> {
    let empty = ScenarioSet { scenarios: Vec::new() };
    let scen = if day_ahead_only { &empty } else { scen };
    let idx = index_variables(inst, scen);
    let cost = build_objective(inst, scen, &idx)?;
    let mut rows = RowSink::default();
    add_drag_block(inst, &idx, &mut rows);
    add_esag_block(inst, &idx, &mut rows);
    add_evcs_block(inst, &idx, &mut rows);
    add_ddgag_block(inst, &idx, &mut rows);
    add_reag_block(inst, &idx, &mut rows);
    add_day_ahead_network(inst, &idx, &mut rows);
    add_real_time_network(inst, scen, &idx, &mut rows);

    let mut tie_break = vec![0.0; idx.len()];
    for sc in &idx.scenarios {
        for &j in sc.buy.iter().chain(&sc.sell).chain(sc.spill.iter().flatten()) {
            tie_break[j] = 1.0;
        }
    }
    let scenarios = scen.iter().map(|s| (s.id, s.probability)).collect();
    Model::from_parts(idx, cost, rows.rows, tie_break, scenarios)
}

/// Builds the full two-stage model.
pub fn assemble(inst: &Instance, scen: &ScenarioSet) -> Result<Model> {
    build(inst, scen, false)
}

/// Builds the first-stage model alone, with no scenario blocks.
pub fn assemble_day_ahead(inst: &Instance) -> Result<Model> {
    build(inst, &ScenarioSet { scenarios: Vec::new() }, true)
}
