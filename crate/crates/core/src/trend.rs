//! Least-squares trend of a yearly series with a one-sided correlation test.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::beta_reg;

#[derive(Debug, Error, PartialEq)]
pub enum TrendError {
    #[error("degrees of freedom must be at least 1, got {0}")]
    InvalidDf(f64),
    #[error("all x values are equal")]
    DegenerateX,
    #[error("need at least 3 paired finite observations, got {0}")]
    InsufficientData(usize),
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64, TrendError> {
    if !(df >= 1.0) || !df.is_finite() {
        return Err(TrendError::InvalidDf(df));
    }
    if t.is_nan() {
        return Ok(f64::NAN);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + t * t));
    Ok(if t >= 0.0 { 1.0 - tail } else { tail })
}

/// Inverse of [`student_t_cdf`] by bisection, for `0 < p < 1`.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64, TrendError> {
    student_t_cdf(0.0, df)?;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while student_t_cdf(lo, df)? > p {
        lo *= 2.0;
    }
    while student_t_cdf(hi, df)? < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if student_t_cdf(mid, df)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendResult {
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation of x and y.
    pub r: f64,
    pub df: usize,
    pub t_stat: f64,
    /// P(T <= t_stat): the p-value for the alternative `r < 0`.
    pub p_one_sided_less: f64,
    pub x: Vec<f64>,
    pub fitted: Vec<f64>,
    /// 95% confidence interval of the regression mean at each x.
    pub ci_band: Vec<(f64, f64)>,
}

/// Ordinary least squares of `y` on `x`.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<TrendResult, TrendError> {
    let n = x.len().min(y.len());
    if n < 3 || x.len() != y.len() || x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(TrendError::InsufficientData(n));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(TrendError::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r = if syy == 0.0 {
        0.0
    } else {
        (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
    };
    let df = n - 2;
    let dff = df as f64;
    let t_stat = if r.abs() == 1.0 {
        r * f64::INFINITY
    } else {
        r * dff.sqrt() / (1.0 - r * r).sqrt()
    };
    let p_one_sided_less = student_t_cdf(t_stat, dff)?;

    let fitted: Vec<f64> = x.iter().map(|xi| intercept + slope * xi).collect();
    let sse: f64 = y.iter().zip(&fitted).map(|(yi, fi)| (yi - fi).powi(2)).sum();
    let s = (sse / dff).sqrt();
    let tq = student_t_quantile(0.975, dff)?;
    let ci_band = x
        .iter()
        .zip(&fitted)
        .map(|(xi, fi)| {
            let half = tq * s * (1.0 / nf + (xi - mx).powi(2) / sxx).sqrt();
            (fi - half, fi + half)
        })
        .collect();

    Ok(TrendResult {
        n,
        slope,
        intercept,
        r,
        df,
        t_stat,
        p_one_sided_less,
        x: x.to_vec(),
        fitted,
        ci_band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cdf_closed_forms() {
        for df in [1.0, 2.0, 5.0, 38.0] {
            assert_eq!(student_t_cdf(0.0, df).unwrap(), 0.5);
        }
        assert!((student_t_cdf(1.0, 1.0).unwrap() - 0.75).abs() < 1e-14);
        // df = 2: F(t) = 1/2 + t / (2 sqrt(2 + t^2))
        for t in [-3.0, -0.5, 0.7, 2.5] {
            let exact = 0.5 + t / (2.0 * (2.0f64 + t * t).sqrt());
            assert!((student_t_cdf(t, 2.0).unwrap() - exact).abs() < 1e-14);
        }
        assert_eq!(student_t_cdf(1.0, 0.5), Err(TrendError::InvalidDf(0.5)));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let q = student_t_quantile(0.975, 38.0).unwrap();
        assert!((student_t_cdf(q, 38.0).unwrap() - 0.975).abs() < 1e-12);
        assert!((q - 2.024_394_164).abs() < 1e-8);
    }

    #[test]
    fn perfect_and_flat_fits() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = ols_fit(&x, &y).unwrap();
        assert_eq!(fit.r, 1.0);
        assert_eq!(fit.p_one_sided_less, 1.0);
        assert!((fit.slope - 2.0).abs() < 1e-12);

        let flat = ols_fit(&x, &[0.3; 10]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.r, 0.0);
        assert_eq!(flat.p_one_sided_less, 0.5);
    }

    #[test]
    fn errors() {
        assert_eq!(ols_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(), TrendError::DegenerateX);
        assert_eq!(ols_fit(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err(), TrendError::InsufficientData(2));
    }

    proptest! {
        #[test]
        fn tails_are_complementary(t in -20.0f64..20.0, df in 1u32..200) {
            let a = student_t_cdf(t, df as f64).unwrap();
            let b = student_t_cdf(-t, df as f64).unwrap();
            prop_assert!((a + b - 1.0).abs() < 1e-12);
        }

        #[test]
        fn correlation_affine_invariant(
            y in proptest::collection::vec(-10.0f64..10.0, 8),
            a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
            b in -100.0f64..100.0,
            c in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
            d in -100.0f64..100.0,
        ) {
            let x: Vec<f64> = (0..8).map(|i| (i * i) as f64 * 0.5 + i as f64).collect();
            let base = ols_fit(&x, &y).unwrap();
            let x2: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let y2: Vec<f64> = y.iter().map(|v| c * v + d).collect();
            let moved = ols_fit(&x2, &y2).unwrap();
            prop_assert!((moved.r - (a * c).signum() * base.r).abs() < 1e-9);
        }

        #[test]
        fn least_squares_is_optimal(y in proptest::collection::vec(-1.0f64..1.0, 5..30)) {
            let x: Vec<f64> = (0..y.len()).map(|i| 1983.0 + i as f64).collect();
            let fit = ols_fit(&x, &y).unwrap();
            let rss = |m: f64, q: f64| -> f64 { x.iter().zip(&y).map(|(a, b)| (b - (q + m * a)).powi(2)).sum() };
            let best = rss(fit.slope, fit.intercept);
            for (dm, dq) in [(1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3)] {
                prop_assert!(rss(fit.slope + dm, fit.intercept + dq) >= best - 1e-9);
            }
            for ((lo, hi), f) in fit.ci_band.iter().zip(&fit.fitted) {
                prop_assert!(lo <= f && f <= hi);
                prop_assert!(((f - lo) - (hi - f)).abs() < 1e-9);
            }
        }
    }
}
