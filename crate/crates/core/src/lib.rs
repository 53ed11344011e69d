//! Day-ahead scheduling of an active distribution system operator that trades
//! energy and regulation in the wholesale market on behalf of aggregated
//! distributed energy resources.
//!
//! The crate covers the instance model and file format ([`instance`]), the
//! scenario generators ([`scenario`]), the two-stage MILP ([`model`]), an LP and
//! branch-and-bound solver ([`solver`]) and price extraction and settlement
//! ([`pricing`]).

pub mod error;
pub mod instance;
pub mod model;
pub mod pricing;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
pub use instance::{builtin_case, CaseMode, Instance};
pub use model::{assemble, Model};
pub use scenario::{Scenario, ScenarioSet};
