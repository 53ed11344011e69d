use std::fs;

use dso_core::instance::{builtin_case, mode_scenarios, parse_document, serialize_document, CaseMode};
use dso_core::{Error, Instance, ScenarioSet};
use sha2::{Digest, Sha256};

use crate::SourceArgs;

/// A resolved instance with its scenario set and where it came from.
pub struct Input {
    pub label: String,
    pub instance: Instance,
    pub scenarios: ScenarioSet,
    /// How the scenario set was obtained.
    pub scenario_source: String,
}

impl Input {
    /// SHA-256 of the canonical serialization of the instance and scenarios.
    pub fn hash(&self) -> String {
        let text = serialize_document(&self.instance, Some(&self.scenarios));
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

pub fn load(args: &SourceArgs) -> Result<Input, Error> {
    if let Some(mode) = args.select.builtin {
        let mode = CaseMode::from(mode);
        let (instance, scenarios) = builtin_case(mode);
        return Ok(Input {
            label: format!("builtin:{}", mode.as_str()),
            instance,
            scenarios,
            scenario_source: format!("builtin:{}", mode.as_str()),
        });
    }
    let path = args
        .select
        .instance
        .as_ref()
        .expect("clap requires --builtin or --instance");
    let text = fs::read_to_string(path).map_err(|e| {
        Error::InvalidArgument(format!("cannot read instance file {}: {e}", path.display()))
    })?;
    let (instance, embedded) = parse_document(&text)?;
    let (scenarios, scenario_source) = match (args.scenario_mode, embedded) {
        (Some(mode), _) => {
            let mode = CaseMode::from(mode);
            (mode_scenarios(&instance, mode), format!("generated:{}", mode.as_str()))
        }
        (None, Some(set)) => (set, "file".to_string()),
        (None, None) => (
            mode_scenarios(&instance, CaseMode::Deterministic),
            "generated:deterministic".to_string(),
        ),
    };
    scenarios.check(&instance)?;
    Ok(Input {
        label: path.display().to_string(),
        instance,
        scenarios,
        scenario_source,
    })
}
