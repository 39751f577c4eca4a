use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sorted_finite;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `Pr[K > lambda]` for the Kolmogorov distribution, from whichever of the
/// two classical series converges faster.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // sqrt(2 pi)/lambda sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2)) is the cdf.
        let c = -PI * PI / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=50 {
            let j = (2 * k - 1) as f64;
            let term = (c * j * j).exp();
            cdf += term;
            if term < 1e-17 * cdf {
                break;
            }
        }
        1.0 - (2.0 * PI).sqrt() / lambda * cdf
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let k = k as f64;
            let term = (-2.0 * k * k * lambda * lambda).exp();
            s += if k as u64 % 2 == 1 { term } else { -term };
            if term < 1e-17 {
                break;
            }
        }
        2.0 * s
    };
    p.clamp(0.0, 1.0)
}

/// One-sample two-sided KS test with the asymptotic p-value at
/// `lambda = sqrt(N) D`.
pub fn ks_test(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if xs.len() < 10 {
        return Err(Error::DegenerateSample(format!("KS needs at least 10 samples, got {}", xs.len())));
    }
    let sorted = sorted_finite(xs)?;
    Ok(ks_sorted(&sorted, cdf))
}

pub(crate) fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x).clamp(0.0, 1.0);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    ks_from_statistic(d, sorted.len())
}

/// KS result for a precomputed vector of cdf values at the sorted sample.
pub(crate) fn ks_from_cdf_values(cdf_values: &[f64]) -> KsResult {
    let n = cdf_values.len() as f64;
    let d = cdf_values
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let f = f.clamp(0.0, 1.0);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    ks_from_statistic(d, cdf_values.len())
}

fn ks_from_statistic(d: f64, n: usize) -> KsResult {
    KsResult { statistic: d, p_value: kolmogorov_survival((n as f64).sqrt() * d) }
}
