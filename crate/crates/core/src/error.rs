use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors raised by membership evaluation, variable construction and inference.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A membership function with non-finite or non-increasing bounds.
    InvalidMembership { x_min: f64, x_max: f64 },
    /// A crisp input that is NaN or infinite.
    NonFiniteInput { value: f64 },
    /// A degree outside `[0, 1]`.
    DegreeOutOfRange { value: f64 },
    /// A variable definition that breaks its invariants.
    InvalidVariable { name: String, reason: String },
    /// A rule clause that does not resolve against the schema.
    UnresolvedClause { variable: String, term: String },
    /// A rule that breaks a structural invariant.
    InvalidRule { index: usize, reason: String },
    /// A rule set with no rules.
    EmptyRuleSet,
    /// An input variable referenced by the rules has no value.
    MissingInput { variable: String },
    /// Every rule fired with strength zero, so the weighted average is 0/0.
    NoRuleFired { inputs: Vec<(String, f64)> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMembership { x_min, x_max } => write!(
                f,
                "invalid membership bounds [{x_min}, {x_max}]: need finite x_min < x_max"
            ),
            Error::NonFiniteInput { value } => write!(f, "input {value} is not finite"),
            Error::DegreeOutOfRange { value } => write!(f, "degree {value} is outside [0, 1]"),
            Error::InvalidVariable { name, reason } => write!(f, "variable `{name}`: {reason}"),
            Error::UnresolvedClause { variable, term } => {
                write!(f, "clause `{variable} IS {term}` does not resolve")
            }
            Error::InvalidRule { index, reason } => write!(f, "rule {index}: {reason}"),
            Error::EmptyRuleSet => f.write_str("rule set is empty"),
            Error::MissingInput { variable } => write!(f, "no value for input `{variable}`"),
            Error::NoRuleFired { inputs } => {
                f.write_str("no rule fired for inputs")?;
                for (i, (name, value)) in inputs.iter().enumerate() {
                    let sep = if i == 0 { " " } else { ", " };
                    write!(f, "{sep}{name}={value}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for Error {}
