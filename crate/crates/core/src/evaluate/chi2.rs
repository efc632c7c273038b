//! Pearson's chi-square test of independence on an r x c count table.

use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Tests independence of rows and columns. With `yates`, 2x2 tables use
/// the continuity-corrected statistic; larger tables are unaffected.
pub fn chi_square(table: &[Vec<u64>], yates: bool) -> Result<ChiSquareResult, EvalError> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 || table.iter().any(|r| r.len() != cols) {
        return Err(EvalError::DegenerateTable(format!(
            "need a rectangular table of at least 2x2, got {rows} rows"
        )));
    }
    let row_totals: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_totals: Vec<f64> = (0..cols)
        .map(|c| table.iter().map(|r| r[c]).sum::<u64>() as f64)
        .collect();
    if row_totals.iter().chain(&col_totals).any(|&t| t == 0.0) {
        return Err(EvalError::DegenerateTable(
            "a row or column total is zero".into(),
        ));
    }
    let grand: f64 = row_totals.iter().sum();
    let correct = yates && rows == 2 && cols == 2;
    let mut statistic = 0.0;
    for (r, row) in table.iter().enumerate() {
        for (c, &observed) in row.iter().enumerate() {
            let expected = row_totals[r] * col_totals[c] / grand;
            let mut diff = (observed as f64 - expected).abs();
            if correct {
                diff = (diff - 0.5).max(0.0);
            }
            statistic += diff * diff / expected;
        }
    }
    let df = (rows - 1) * (cols - 1);
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: df,
        p_value: chi_square_sf(statistic, df as f64),
    })
}

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom: `Q(df/2, x/2)`.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(df / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma function Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        (1.0 - gamma_p_series(a, x)).clamp(0.0, 1.0)
    } else {
        gamma_q_continued_fraction(a, x).clamp(0.0, 1.0)
    }
}

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// modified Lentz
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_hand_value() {
        let r = chi_square(&[vec![30, 10], vec![10, 30]], false).unwrap();
        assert!((r.statistic - 20.0).abs() < 1e-9);
        assert_eq!(r.degrees_of_freedom, 1);
    }

    #[test]
    fn proportional_rows_are_independent() {
        let r = chi_square(&[vec![10, 20], vec![20, 40]], false).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn yates_shrinks_two_by_two() {
        let r = chi_square(&[vec![30, 10], vec![10, 30]], true).unwrap();
        // |O - E| = 10 -> 9.5 in every cell
        assert!((r.statistic - 4.0 * 9.5 * 9.5 / 20.0).abs() < 1e-12);
        let big = chi_square(&[vec![3, 1, 2], vec![1, 3, 2]], true).unwrap();
        let plain = chi_square(&[vec![3, 1, 2], vec![1, 3, 2]], false).unwrap();
        assert_eq!(big, plain);
    }

    #[test]
    fn degenerate_tables_rejected() {
        for t in [
            vec![vec![0, 0], vec![1, 2]],
            vec![vec![0, 3], vec![0, 2]],
            vec![vec![1, 2]],
            vec![vec![1, 2], vec![3]],
        ] {
            let err = chi_square(&t, false).unwrap_err();
            assert!(
                err.to_string().starts_with("degenerate contingency table"),
                "{err}"
            );
        }
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-13);
        assert!(ln_gamma(2.0).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn survival_function_closed_forms() {
        // df = 2: Q = exp(-x/2)
        for x in [0.1, 1.0, 5.0, 30.0] {
            assert!((chi_square_sf(x, 2.0) - (-x / 2.0f64).exp()).abs() < 1e-14);
        }
        // df = 4: Q = exp(-x/2)(1 + x/2)
        for x in [0.5, 3.0, 12.0] {
            let want = (-x / 2.0f64).exp() * (1.0 + x / 2.0);
            assert!((chi_square_sf(x, 4.0) - want).abs() < 1e-14);
        }
        assert_eq!(chi_square_sf(0.0, 3.0), 1.0);
    }

    proptest! {
        #[test]
        fn p_decreases_as_statistic_grows(x in 0.0f64..80.0, dx in 0.01f64..10.0, df in 1usize..12) {
            let a = chi_square_sf(x, df as f64);
            let b = chi_square_sf(x + dx, df as f64);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b <= a);
        }

        #[test]
        fn statistic_scales_with_sample_size(
            cells in proptest::collection::vec(1u64..50, 6),
            k in 1u64..6,
        ) {
            let t: Vec<Vec<u64>> = cells.chunks(3).map(<[u64]>::to_vec).collect();
            let scaled: Vec<Vec<u64>> = t.iter().map(|r| r.iter().map(|c| c * k).collect()).collect();
            let a = chi_square(&t, false).unwrap();
            let b = chi_square(&scaled, false).unwrap();
            prop_assert_eq!(a.degrees_of_freedom, 2);
            // the effect size statistic / N is what stays fixed
            prop_assert!((b.statistic - k as f64 * a.statistic).abs() <= 1e-9 * (1.0 + b.statistic));
        }
    }
}
