//! Domain data model, the TOML instance format, validation and the built-in case.

mod builtin;
mod format;
mod types;
mod validate;

pub use builtin::{
    apply_mode_flags, base_instance, builtin_case, mode_scenarios, tan_phi_pf095, CaseMode,
    DA_ENERGY, MULTI_SELL_RATIO, MULTI_SIGMA, REAG_TABLE, SINGLE_RT_PREMIUM,
};
pub use format::{parse_document, parse_instance, serialize_document, serialize_instance};
pub use types::*;
pub use validate::{validate_instance, Finding, ValidationReport};
