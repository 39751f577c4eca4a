use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::moments::moments;
use crate::{Error, Result};

/// Outcome of a normality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    /// `A*^2` for Anderson-Darling, `K^2` for D'Agostino-Pearson.
    pub statistic: f64,
    pub p_value: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

fn check(xs: &[f64]) -> Result<()> {
    if xs.len() < 20 {
        return Err(Error::DegenerateSample(format!("normality tests need at least 20 samples, got {}", xs.len())));
    }
    Ok(())
}

fn ln_normal_cdf(z: f64) -> f64 {
    (0.5 * erfc(-z / std::f64::consts::SQRT_2)).ln()
}

/// Anderson-Darling with estimated mean and variance,
/// `A*^2 = A^2 (1 + 0.75/N + 2.25/N^2)`, and Stephens' p-value
/// approximation.
pub fn ad_normality(xs: &[f64]) -> Result<NormalityReport> {
    check(xs)?;
    let m = moments(xs)?;
    let sd = m.variance.sqrt();
    let mut z: Vec<f64> = xs.iter().map(|x| (x - m.mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len();
    let nf = n as f64;
    let s: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (ln_normal_cdf(z[i]) + ln_normal_cdf(-z[n - 1 - i])))
        .sum();
    let a2 = -nf - s / nf;
    let a = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if a >= 0.6 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else if a >= 0.34 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a >= 0.2 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    };
    Ok(NormalityReport { statistic: a, p_value: p.clamp(0.0, 1.0), skewness: m.skewness, excess_kurtosis: m.excess_kurtosis })
}

/// Skewness z-score after D'Agostino's transformation.
fn skew_z(g1: f64, n: f64) -> f64 {
    let y = g1 * ((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0))).sqrt();
    let beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    let y = if y == 0.0 { 1.0 } else { y / alpha };
    delta * (y + (y * y + 1.0).sqrt()).ln()
}

/// Kurtosis z-score after Anscombe and Glynn's transformation.
fn kurtosis_z(b2: f64, n: f64) -> f64 {
    let e = 3.0 * (n - 1.0) / (n + 1.0);
    let var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0).powi(2) * (n + 3.0) * (n + 5.0));
    let x = (b2 - e) / var.sqrt();
    let sqrt_beta1 =
        6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) * (6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0))).sqrt();
    let a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + (1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)).sqrt());
    let term1 = 1.0 - 2.0 / (9.0 * a);
    let denom = 1.0 + x * (2.0 / (a - 4.0)).sqrt();
    let term2 = denom.signum() * ((1.0 - 2.0 / a) / denom.abs()).cbrt();
    (term1 - term2) / (2.0 / (9.0 * a)).sqrt()
}

/// D'Agostino-Pearson omnibus `K^2 = Z_skew^2 + Z_kurt^2` against chi-squared
/// with 2 degrees of freedom.
pub fn dagostino(xs: &[f64]) -> Result<NormalityReport> {
    check(xs)?;
    let m = moments(xs)?;
    let n = xs.len() as f64;
    let k2 = skew_z(m.skewness, n).powi(2) + kurtosis_z(m.excess_kurtosis + 3.0, n).powi(2);
    Ok(NormalityReport { statistic: k2, p_value: (-k2 / 2.0).exp().clamp(0.0, 1.0), skewness: m.skewness, excess_kurtosis: m.excess_kurtosis })
}
