mod support;

use std::collections::BTreeMap;

use proptest::prelude::*;
use support::oracle;
use tsuka_core::loan::{assess, default_config, Applicant, Decision};
use tsuka_core::{
    combine_and, combine_or, infer, Clause, Connective, Degree, Fis, LinguisticVariable, MembershipFunction, Rule,
    Schema, Term,
};

fn applicant(income: f64, loan: f64, collateral: f64) -> Applicant {
    Applicant { id: "x".into(), name: String::new(), income, loan_amount: loan, collateral_value: collateral }
}

fn grid(range: (f64, f64), n: usize) -> Vec<f64> {
    (0..n).map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn frozen_oracle_values() {
    // Rising{20,80} at alpha 0.25, by bisection of (x - 20) / 60 - 0.25.
    let root = oracle::bisect(|x| (x - 20.0) / 60.0 - 0.25, 20.0, 80.0);
    assert!((root - 35.0).abs() < 1e-12);
    let f = MembershipFunction::rising(20.0, 80.0).unwrap();
    assert_eq!(f.invert_value(0.25).unwrap(), 35.0);

    // midpoint, all-favourable and all-unfavourable applicants
    assert_eq!(oracle::loan_score(10.5e6, 102.5e6, 155e6), Some(50.0));
    assert_eq!(oracle::loan_score(20e6, 5e6, 300e6), Some(100.0));
    assert_eq!(oracle::loan_score(1e6, 200e6, 10e6), Some(0.0));
}

#[test]
fn engine_matches_oracle_on_grid() {
    let cfg = default_config();
    let incomes = grid(oracle::INCOME, 10);
    let loans = grid(oracle::LOAN, 10);
    let collaterals = grid(oracle::COLLATERAL, 10);
    for &i in &incomes {
        for &l in &loans {
            for &c in &collaterals {
                let expected = oracle::loan_score(i, l, c).expect("complete rule base always fires");
                let got = assess(&applicant(i, l, c), &cfg).unwrap();
                assert!((got.score - expected).abs() <= 1e-9, "({i}, {l}, {c}): {} vs {expected}", got.score);
                assert_eq!(got.decision == Decision::Accepted, got.score >= oracle::THRESHOLD);
            }
        }
    }
}

// Brute-force re-evaluation of a two-rule system with fire strengths
// (0.75, 0.25) and consequent values (40, 80).
#[test]
fn two_rule_weighted_average() {
    let input = LinguisticVariable::new(
        "x",
        0.0,
        100.0,
        vec![
            Term::new("low", MembershipFunction::falling(0.0, 100.0).unwrap()),
            Term::new("high", MembershipFunction::rising(0.0, 100.0).unwrap()),
        ],
    )
    .unwrap();
    let output = LinguisticVariable::new(
        "o",
        0.0,
        120.0,
        vec![
            Term::new("first", MembershipFunction::rising(10.0, 50.0).unwrap()),
            Term::new("second", MembershipFunction::rising(70.0, 110.0).unwrap()),
        ],
    )
    .unwrap();
    let rules = vec![
        Rule { connective: Connective::And, antecedent: vec![Clause::new("x", "low")], consequent: Clause::new("o", "first") },
        Rule { connective: Connective::And, antecedent: vec![Clause::new("x", "high")], consequent: Clause::new("o", "second") },
    ];
    let fis = Fis::new(Schema::new(vec![input], output).unwrap(), rules).unwrap();

    let x = 25.0;
    let a1 = (100.0 - x) / 100.0;
    let a2 = x / 100.0;
    let z1 = 10.0 + a1 * 40.0;
    let z2 = 70.0 + a2 * 40.0;
    let expected = (a1 * z1 + a2 * z2) / (a1 + a2);
    assert_eq!((a1, a2, z1, z2, expected), (0.75, 0.25, 40.0, 80.0, 50.0));

    let r = infer(&fis, &BTreeMap::from([("x".to_string(), x)])).unwrap();
    assert_eq!(r.crisp_output, 50.0);
    assert_eq!(r.firings[0].alpha.value(), 0.75);
    assert_eq!(r.firings[1].consequent_value, 80.0);
}

#[test]
fn complete_rule_base_always_fires() {
    let cfg = default_config();
    for &i in &grid((0.0, 25e6), 7) {
        for &l in &grid((1.0, 250e6), 7) {
            for &c in &grid((0.0, 350e6), 7) {
                assess(&applicant(i, l, c), &cfg).unwrap();
            }
        }
    }
}

#[test]
fn operator_laws_on_grid() {
    let ds: Vec<Degree> = (0..=100).map(|i| Degree::new(i as f64 / 100.0).unwrap()).collect();
    for &a in &ds {
        assert_eq!(combine_and(a, a), a);
        assert_eq!(combine_or(a, a), a);
        for &b in &ds {
            assert_eq!(combine_and(a, b), combine_and(b, a));
            assert_eq!(combine_or(a, b), combine_or(b, a));
        }
    }
    for &a in ds.iter().step_by(5) {
        for &b in ds.iter().step_by(5) {
            for &c in ds.iter().step_by(5) {
                assert_eq!(combine_and(combine_and(a, b), c), combine_and(a, combine_and(b, c)));
                assert_eq!(combine_or(combine_or(a, b), c), combine_or(a, combine_or(b, c)));
            }
        }
    }
}

fn default_inputs() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..25e6f64, 1.0..250e6f64, 0.0..350e6f64)
}

proptest! {
    #[test]
    fn trace_recomputes_crisp_output((i, l, c) in default_inputs()) {
        let r = assess(&applicant(i, l, c), &default_config()).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for f in &r.trace.firings {
            num += f.alpha.value() * f.consequent_value;
            den += f.alpha.value();
        }
        prop_assert!((num / den - r.score).abs() <= 1e-12);
        prop_assert!((0.0..=100.0).contains(&r.score));
    }

    #[test]
    fn crisp_output_within_fired_consequents((i, l, c) in default_inputs()) {
        let r = assess(&applicant(i, l, c), &default_config()).unwrap();
        let fired = r.trace.firings.iter().filter(|f| f.alpha.value() > 0.0);
        let lo = fired.clone().map(|f| f.consequent_value).fold(f64::INFINITY, f64::min);
        let hi = fired.map(|f| f.consequent_value).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(r.score >= lo && r.score <= hi);
    }

    #[test]
    fn rule_order_does_not_change_output((i, l, c) in default_inputs(), seed in any::<u64>()) {
        let cfg = default_config();
        let mut rules = cfg.rules().to_vec();
        // deterministic shuffle from the seed
        let mut s = seed | 1;
        for k in (1..rules.len()).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            rules.swap(k, (s % (k as u64 + 1)) as usize);
        }
        let permuted = Fis::new(cfg.schema().clone(), rules).unwrap();
        let inputs = BTreeMap::from([
            ("penghasilan".to_string(), i),
            ("pinjaman".to_string(), l),
            ("jaminan".to_string(), c),
        ]);
        let a = infer(cfg.fis(), &inputs).unwrap();
        let b = infer(&permuted, &inputs).unwrap();
        prop_assert_eq!(a.crisp_output.to_bits(), b.crisp_output.to_bits());
    }
}
