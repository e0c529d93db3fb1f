//! Tsukamoto fuzzy inference.
//!
//! The pipeline is: crisp inputs are fuzzified against linear membership
//! functions, each rule fires with min (AND) or max (OR) over its clause
//! degrees, the fire strength is mapped back through the rule's monotone
//! consequent to a crisp value, and the crisp output is the fire-strength
//! weighted average of those values.
//!
//! The crate is `no_std` and only needs `alloc`. The [`loan`] module carries
//! the loan-eligibility model built on top of the engine.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

mod error;

pub mod dsl;
pub mod inference;
pub mod loan;
pub mod membership;

pub use error::Error;
pub use inference::{
    combine_and, combine_or, fire_rule, fuzzify, infer, Clause, Connective, Fis, Fuzzified,
    InferenceResult, LinguisticVariable, Rule, RuleFiring, Schema, Term,
};
pub use membership::{Degree, MembershipFunction, Shape};
