use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sample moments. Variance is unbiased; skewness and excess kurtosis use
/// central moments `m_k` without small-sample correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn moments(xs: &[f64]) -> Result<Moments> {
    if xs.len() < 4 {
        return Err(Error::DegenerateSample(format!("need at least 4 samples, got {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if !(m2 > 0.0) {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    let variance = m2 / (n - 1.0);
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    Ok(Moments { mean, variance, skewness: m3 / m2.powf(1.5), excess_kurtosis: m4 / (m2 * m2) - 3.0 })
}
