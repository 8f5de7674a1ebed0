//! One-sided correlation test on a yearly ratio series: is the share of
//! historical articles falling over time?
//!
//! ```bash
//! cargo run --example historical_trend
//! ```

use diachron::trend::{ols_fit, student_t_cdf, student_t_quantile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let years: Vec<f64> = (1980..2020).map(f64::from).collect();
    // a slow decline under a fixed wobble
    let ratios: Vec<f64> = years
        .iter()
        .enumerate()
        .map(|(i, y)| 0.3 - 0.0004 * (y - 1980.0) + 0.06 * ((i * 7 % 11) as f64 / 10.0 - 0.5))
        .collect();

    let fit = ols_fit(&years, &ratios)?;
    println!("n = {}, r = {:.4}, slope = {:.5} per year", fit.n, fit.r, fit.slope);
    println!("t({}) = {:.4}, one-sided p (H1: r < 0) = {:.4}", fit.df, fit.t_stat, fit.p_one_sided_less);
    println!("95% band at {}: [{:.4}, {:.4}]", years[0], fit.ci_band[0].0, fit.ci_band[0].1);

    println!("\nt quantile 0.975 with 38 df: {:.6}", student_t_quantile(0.975, 38.0)?);
    println!("P(T < 1.2583), 38 df: {:.6}", student_t_cdf(1.2583, 38.0)?);
    Ok(())
}
