//! Loan eligibility on top of the Tsukamoto engine.
//!
//! Three inputs (monthly income, requested loan, appraised collateral) are
//! scored into an eligibility value `kelayakan` in `[0, 100]`. An applicant
//! is accepted when the score reaches the configured threshold.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dsl::{parse_ruleset, ParseError};
use crate::inference::{Fis, InferenceResult, LinguisticVariable, Rule, Schema, Term};
use crate::membership::MembershipFunction;
use crate::Error;

pub const INCOME: &str = "penghasilan";
pub const LOAN: &str = "pinjaman";
pub const COLLATERAL: &str = "jaminan";
pub const ELIGIBILITY: &str = "kelayakan";

/// The rule base shipped with [`default_config`]: every combination of the
/// three inputs, concluding `tinggi` when at least two of income-high,
/// loan-low and collateral-high hold.
pub const DEFAULT_RULES: &str = "\
IF penghasilan IS rendah AND pinjaman IS rendah AND jaminan IS rendah THEN kelayakan IS rendah
IF penghasilan IS rendah AND pinjaman IS rendah AND jaminan IS tinggi THEN kelayakan IS tinggi
IF penghasilan IS rendah AND pinjaman IS tinggi AND jaminan IS rendah THEN kelayakan IS rendah
IF penghasilan IS rendah AND pinjaman IS tinggi AND jaminan IS tinggi THEN kelayakan IS rendah
IF penghasilan IS tinggi AND pinjaman IS rendah AND jaminan IS rendah THEN kelayakan IS tinggi
IF penghasilan IS tinggi AND pinjaman IS rendah AND jaminan IS tinggi THEN kelayakan IS tinggi
IF penghasilan IS tinggi AND pinjaman IS tinggi AND jaminan IS rendah THEN kelayakan IS rendah
IF penghasilan IS tinggi AND pinjaman IS tinggi AND jaminan IS tinggi THEN kelayakan IS tinggi
";

/// The applicant fields that feed the model, each bound to one input variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputField {
    Income,
    LoanAmount,
    CollateralValue,
}

impl InputField {
    pub const ALL: [InputField; 3] = [InputField::Income, InputField::LoanAmount, InputField::CollateralValue];

    /// Applicant field name, as used in CSV headers and JSON bodies.
    pub fn field_name(self) -> &'static str {
        match self {
            InputField::Income => "income",
            InputField::LoanAmount => "loan_amount",
            InputField::CollateralValue => "collateral_value",
        }
    }

    pub fn variable(self) -> &'static str {
        match self {
            InputField::Income => INCOME,
            InputField::LoanAmount => LOAN,
            InputField::CollateralValue => COLLATERAL,
        }
    }

    /// Accepts either the applicant field name or the variable name.
    pub fn lookup(name: &str) -> Option<InputField> {
        Self::ALL.into_iter().find(|f| f.field_name() == name || f.variable() == name)
    }

    pub fn get(self, a: &Applicant) -> f64 {
        match self {
            InputField::Income => a.income,
            InputField::LoanAmount => a.loan_amount,
            InputField::CollateralValue => a.collateral_value,
        }
    }

    pub fn set(self, a: &mut Applicant, value: f64) {
        match self {
            InputField::Income => a.income = value,
            InputField::LoanAmount => a.loan_amount = value,
            InputField::CollateralValue => a.collateral_value = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Applicant {
    pub id: String,
    pub name: String,
    /// Monthly income, IDR.
    pub income: f64,
    /// Requested loan, IDR.
    pub loan_amount: f64,
    /// Appraised value of the pledged vehicle, IDR.
    pub collateral_value: f64,
}

/// A validation failure on one named field.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl Applicant {
    /// Checks field invariants, reporting every offending field.
    pub fn validate(&self) -> Result<(), Vec<FieldError>> {
        let mut errors = Vec::new();
        if self.id.trim().is_empty() {
            errors.push(FieldError::new("id", "must not be empty"));
        }
        let mut check = |field: InputField, value: f64, strictly_positive: bool| {
            let name = field.field_name();
            if !value.is_finite() {
                errors.push(FieldError::new(name, "must be a finite number"));
            } else if strictly_positive && value <= 0.0 {
                errors.push(FieldError::new(name, "must be greater than 0"));
            } else if value < 0.0 {
                errors.push(FieldError::new(name, "must not be negative"));
            }
        };
        check(InputField::Income, self.income, false);
        check(InputField::LoanAmount, self.loan_amount, true);
        check(InputField::CollateralValue, self.collateral_value, false);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Decision {
    Accepted,
    Rejected,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accepted => "accepted",
            Decision::Rejected => "rejected",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A scored applicant with the full inference trace.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Assessment {
    pub applicant_id: String,
    pub score: f64,
    pub decision: Decision,
    pub trace: InferenceResult,
    pub clamped_inputs: Vec<String>,
}

/// Errors from building a [`FisConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// A field-addressed violation, e.g. `threshold` or `variables[1].universe`.
    Invalid { path: String, message: String },
    /// Rules that failed to parse, with their positions in the rule text.
    Rules(Vec<ParseError>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Invalid { path, message } => write!(f, "{path}: {message}"),
            ConfigError::Rules(errors) => {
                for (i, e) in errors.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "rules[{}] {e}", e.span.line - 1)?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for ConfigError {}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { path: path.into(), message: message.into() }
}

/// A complete loan model: variables, rules and the acceptance threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct FisConfig {
    fis: Fis,
    threshold: f64,
}

impl FisConfig {
    pub fn new(fis: Fis, threshold: f64) -> Result<Self, ConfigError> {
        let schema = fis.schema();
        for field in InputField::ALL {
            if schema.input(field.variable()).is_none() {
                return Err(invalid(
                    "variables",
                    format!("missing input variable `{}`", field.variable()),
                ));
            }
        }
        let (lo, hi) = schema.output().universe();
        if !(threshold.is_finite() && threshold >= lo && threshold <= hi) {
            return Err(invalid(
                "threshold",
                format!("{threshold} is outside the output universe [{lo}, {hi}]"),
            ));
        }
        Ok(FisConfig { fis, threshold })
    }

    /// Builds a config from variables and rule text, one rule per line.
    pub fn from_parts(
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: &str,
        threshold: f64,
    ) -> Result<Self, ConfigError> {
        let schema = Schema::new(inputs, output).map_err(|e| invalid("variables", format!("{e}")))?;
        let rules = parse_ruleset(rules, &schema).map_err(ConfigError::Rules)?;
        let fis = Fis::new(schema, rules).map_err(|e| invalid("rules", format!("{e}")))?;
        Self::new(fis, threshold)
    }

    pub fn fis(&self) -> &Fis {
        &self.fis
    }

    pub fn schema(&self) -> &Schema {
        self.fis.schema()
    }

    pub fn rules(&self) -> &[Rule] {
        self.fis.rules()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn decide(&self, score: f64) -> Decision {
        if score >= self.threshold {
            Decision::Accepted
        } else {
            Decision::Rejected
        }
    }

    fn input_variable(&self, field: InputField) -> &LinguisticVariable {
        self.schema().input(field.variable()).expect("checked in FisConfig::new")
    }
}

fn two_term(name: &str, lo: f64, hi: f64) -> LinguisticVariable {
    let terms = vec![
        Term::new("rendah", MembershipFunction::falling(lo, hi).expect("static bounds")),
        Term::new("tinggi", MembershipFunction::rising(lo, hi).expect("static bounds")),
    ];
    LinguisticVariable::new(name, lo, hi, terms).expect("static variable")
}

/// The shipped loan model.
///
/// Inputs each have `rendah` (falling) and `tinggi` (rising) across their
/// universe. The output terms meet at 50 so that a weakly fired favourable
/// rule never pulls the score below the midpoint.
pub fn default_config() -> FisConfig {
    let inputs = vec![
        two_term(INCOME, 1_000_000.0, 20_000_000.0),
        two_term(LOAN, 5_000_000.0, 200_000_000.0),
        two_term(COLLATERAL, 10_000_000.0, 300_000_000.0),
    ];
    let output = LinguisticVariable::new(
        ELIGIBILITY,
        0.0,
        100.0,
        vec![
            Term::new("rendah", MembershipFunction::falling(0.0, 50.0).expect("static bounds")),
            Term::new("tinggi", MembershipFunction::rising(50.0, 100.0).expect("static bounds")),
        ],
    )
    .expect("static variable");
    FisConfig::from_parts(inputs, output, DEFAULT_RULES, 60.0).expect("default config is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoanError {
    Invalid(Vec<FieldError>),
    UnknownVariable(String),
    Inference(Error),
}

impl fmt::Display for LoanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoanError::Invalid(fields) => {
                f.write_str("invalid applicant: ")?;
                for (i, e) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            LoanError::UnknownVariable(name) => write!(f, "`{name}` is not an input variable"),
            LoanError::Inference(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LoanError {}

impl From<Error> for LoanError {
    fn from(e: Error) -> Self {
        LoanError::Inference(e)
    }
}

/// Scores an applicant and applies the threshold.
pub fn assess(a: &Applicant, cfg: &FisConfig) -> Result<Assessment, LoanError> {
    a.validate().map_err(LoanError::Invalid)?;
    let inputs: BTreeMap<String, f64> = InputField::ALL
        .into_iter()
        .map(|f| (f.variable().to_owned(), f.get(a)))
        .collect();
    let trace = cfg.fis.infer(&inputs)?;
    let score = trace.crisp_output;
    Ok(Assessment {
        applicant_id: a.id.clone(),
        score,
        decision: cfg.decide(score),
        clamped_inputs: trace.clamped.clone(),
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub value: f64,
    pub score: f64,
    pub decision: Decision,
}

/// The `i`-th of `steps` evenly spaced points over `[lo, hi]`; the last is exactly `hi`.
pub fn sweep_value(lo: f64, hi: f64, i: usize, steps: usize) -> f64 {
    if i + 1 == steps {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (steps - 1) as f64)
    }
}

/// Scores the applicant at `steps` evenly spaced values of one input across
/// its universe, holding the others fixed.
pub fn what_if(a: &Applicant, cfg: &FisConfig, vary: &str, steps: usize) -> Result<Vec<SweepPoint>, LoanError> {
    let field = InputField::lookup(vary).ok_or_else(|| LoanError::UnknownVariable(vary.to_owned()))?;
    if steps < 2 {
        return Err(LoanError::Invalid(vec![FieldError::new("steps", "must be at least 2")]));
    }
    let (lo, hi) = cfg.input_variable(field).universe();
    let mut probe = a.clone();
    (0..steps)
        .map(|i| {
            let value = sweep_value(lo, hi, i, steps);
            field.set(&mut probe, value);
            let r = assess(&probe, cfg)?;
            Ok(SweepPoint { value, score: r.score, decision: r.decision })
        })
        .collect()
}
