//! Loan-eligibility decision service built on `tsuka-core`: config files,
//! applicant persistence, batch CSV scoring, the HTTP API, and the CLI.

pub mod cli;
pub mod service;
pub mod store;
