//! The `fis/1` config document.
//!
//! The same document shape is used for TOML config files and for the JSON
//! config endpoint. Unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tsuka_core::dsl::format_rule;
use tsuka_core::loan::{ConfigError, FisConfig};
use tsuka_core::{LinguisticVariable, MembershipFunction, Shape, Term};

use super::{atomic_write, read_to_string, StoreError};

pub const FORMAT_VERSION: &str = "fis/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub version: String,
    /// Scores at or above this value are accepted.
    pub threshold: f64,
    /// One rule per entry, in rule-language syntax.
    pub rules: Vec<String>,
    pub variables: Vec<VariableDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDocument {
    pub name: String,
    pub role: Role,
    pub universe: [f64; 2],
    pub terms: Vec<TermDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub name: String,
    pub shape: Shape,
    pub x_min: f64,
    pub x_max: f64,
}

fn schema_error(field: impl Into<String>, message: impl Into<String>) -> StoreError {
    StoreError::Schema { field: field.into(), message: message.into() }
}

impl From<&FisConfig> for ConfigDocument {
    fn from(cfg: &FisConfig) -> Self {
        let schema = cfg.schema();
        let doc_var = |v: &LinguisticVariable, role: Role| {
            let (lo, hi) = v.universe();
            VariableDocument {
                name: v.name().to_owned(),
                role,
                universe: [lo, hi],
                terms: v
                    .terms()
                    .iter()
                    .map(|t| TermDocument {
                        name: t.name.clone(),
                        shape: t.function.shape(),
                        x_min: t.function.x_min(),
                        x_max: t.function.x_max(),
                    })
                    .collect(),
            }
        };
        let mut variables: Vec<_> = schema.inputs().iter().map(|v| doc_var(v, Role::Input)).collect();
        variables.push(doc_var(schema.output(), Role::Output));
        ConfigDocument {
            version: FORMAT_VERSION.to_owned(),
            threshold: cfg.threshold(),
            rules: cfg.rules().iter().map(format_rule).collect(),
            variables,
        }
    }
}

impl ConfigDocument {
    /// Validates the document and builds the model.
    pub fn to_config(&self) -> Result<FisConfig, StoreError> {
        if self.version != FORMAT_VERSION {
            return Err(schema_error(
                "version",
                format!("expected \"{FORMAT_VERSION}\", found \"{}\"", self.version),
            ));
        }
        let mut inputs = Vec::new();
        let mut output = None;
        for (i, v) in self.variables.iter().enumerate() {
            let path = format!("variables[{i}]");
            let mut terms = Vec::with_capacity(v.terms.len());
            for (j, t) in v.terms.iter().enumerate() {
                let f = MembershipFunction::new(t.shape, t.x_min, t.x_max)
                    .map_err(|e| schema_error(format!("{path}.terms[{j}]"), e.to_string()))?;
                terms.push(Term::new(t.name.clone(), f));
            }
            let var = LinguisticVariable::new(v.name.clone(), v.universe[0], v.universe[1], terms)
                .map_err(|e| schema_error(path.clone(), e.to_string()))?;
            match v.role {
                Role::Input => inputs.push(var),
                Role::Output if output.is_some() => {
                    return Err(schema_error(path, "a config has exactly one output variable"));
                }
                Role::Output => output = Some(var),
            }
        }
        let output = output.ok_or_else(|| schema_error("variables", "no variable has role \"output\""))?;
        let rules = self.rules.join("\n");
        FisConfig::from_parts(inputs, output, &rules, self.threshold).map_err(|e| match e {
            ConfigError::Invalid { path, message } => schema_error(path, message),
            ConfigError::Rules(errors) => StoreError::Rules { errors, rules: self.rules.clone() },
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, StoreError> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            schema_error(field, e.into_inner().message().trim().to_owned())
        })
    }

    pub fn from_json(text: &str) -> Result<Self, StoreError> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            schema_error(field, e.into_inner().to_string())
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config documents always serialize")
    }
}

pub fn config_to_toml(cfg: &FisConfig) -> String {
    ConfigDocument::from(cfg).to_toml()
}

pub fn config_from_toml(text: &str) -> Result<FisConfig, StoreError> {
    ConfigDocument::from_toml(text)?.to_config()
}

/// Writes the config as TOML, replacing any existing file atomically.
pub fn save_config(cfg: &FisConfig, path: &Path) -> Result<(), StoreError> {
    atomic_write(path, config_to_toml(cfg).as_bytes(), &|| Ok(()))
}

pub fn load_config(path: &Path) -> Result<FisConfig, StoreError> {
    config_from_toml(&read_to_string(path)?)
}
