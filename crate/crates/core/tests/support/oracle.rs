// Straight-line evaluator for the default loan model. Written against the
// documented default parameters only; it must not import anything from the
// engine so that agreement between the two is meaningful.

#![allow(dead_code, clippy::needless_range_loop)]

pub const INCOME: (f64, f64) = (1_000_000.0, 20_000_000.0);
pub const LOAN: (f64, f64) = (5_000_000.0, 200_000_000.0);
pub const COLLATERAL: (f64, f64) = (10_000_000.0, 300_000_000.0);
pub const THRESHOLD: f64 = 60.0;

fn high(range: (f64, f64), x: f64) -> f64 {
    let (lo, hi) = range;
    if x <= lo {
        0.0
    } else if x >= hi {
        1.0
    } else {
        (x - lo) / (hi - lo)
    }
}

fn low(range: (f64, f64), x: f64) -> f64 {
    let (lo, hi) = range;
    if x <= lo {
        1.0
    } else if x >= hi {
        0.0
    } else {
        (hi - x) / (hi - lo)
    }
}

/// Eligibility score for the default model, or `None` when nothing fires.
pub fn loan_score(income: f64, loan: f64, collateral: f64) -> Option<f64> {
    let inc = [low(INCOME, income), high(INCOME, income)];
    let ln = [low(LOAN, loan), high(LOAN, loan)];
    let col = [low(COLLATERAL, collateral), high(COLLATERAL, collateral)];

    let mut weighted = 0.0;
    let mut total = 0.0;
    for i in 0..2 {
        for l in 0..2 {
            for c in 0..2 {
                let mut alpha = inc[i];
                if ln[l] < alpha {
                    alpha = ln[l];
                }
                if col[c] < alpha {
                    alpha = col[c];
                }
                // favourable: income high (1), loan low (0), collateral high (1)
                let favourable = (i == 1) as u8 + (l == 0) as u8 + (c == 1) as u8;
                let z = if favourable >= 2 {
                    // Rising over [50, 100]
                    50.0 + alpha * 50.0
                } else {
                    // Falling over [0, 50]
                    50.0 - alpha * 50.0
                };
                weighted += alpha * z;
                total += alpha;
            }
        }
    }
    if total == 0.0 {
        None
    } else {
        Some(weighted / total)
    }
}

/// Bisection root finder, used to check linear inversions independently.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
