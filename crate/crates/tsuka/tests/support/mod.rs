#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use tsuka_core::loan::Applicant;

/// Draws values from proptest strategies with a fixed seed, so every run
/// sees the same data.
pub struct Sampler(TestRunner);

impl Sampler {
    pub fn new() -> Self {
        Sampler(TestRunner::deterministic())
    }

    pub fn draw<S: Strategy>(&mut self, strategy: S) -> S::Value {
        strategy.new_tree(&mut self.0).expect("strategy does not reject").current()
    }
}

/// Applicants spread a little past every universe edge.
pub fn applicants(n: usize) -> Vec<Applicant> {
    let mut s = Sampler::new();
    (0..n)
        .map(|i| Applicant {
            id: format!("n{i:04}"),
            name: format!("Nasabah {i}"),
            income: s.draw(0.0..25e6f64),
            loan_amount: s.draw(1.0..250e6f64),
            collateral_value: s.draw(0.0..350e6f64),
        })
        .collect()
}

/// `{}` on f64 is the shortest round-tripping form, so parsing the file back
/// yields the same bits.
pub fn write_csv(path: &Path, rows: &[Applicant]) {
    let mut text = String::from("id,name,income,loan_amount,collateral_value\n");
    for a in rows {
        writeln!(text, "{},{},{},{},{}", a.id, a.name, a.income, a.loan_amount, a.collateral_value).unwrap();
    }
    std::fs::write(path, text).unwrap();
}
