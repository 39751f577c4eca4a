//! Statistics for permanent samples: moments, Kolmogorov-Smirnov machinery,
//! Rayleigh/Weibull/exponential fits, a battery of complex-Gaussian tests,
//! alpha-stable estimation, normality tests and anti-concentration curves.

mod fits;
mod gaussian;
mod ks;
mod mcculloch_tables;
mod moments;
mod normality;
mod stable;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::ensembles::EnsembleSpec;
use crate::geodesic::GeodesicTarget;
use crate::{Error, Result};

pub use fits::{fit_rayleigh, fit_weibull, squared_amplitude_exponential_check};
pub use gaussian::{complex_gaussian_battery, GaussianBattery, BOOTSTRAP_RESAMPLES};
pub use ks::{kolmogorov_survival, ks_test, KsResult};
pub use moments::{moments, Moments};
pub use normality::{ad_normality, dagostino, NormalityReport};
pub use stable::{ecf_alpha, mcculloch_alpha, stable_cdf, stable_ks, stable_quantile, StableFit, StableMethod};

/// Where a sample set came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    Ensemble(EnsembleSpec),
    Trace { n: usize, target: GeodesicTarget, steps: usize },
}

/// Complex permanent values with their provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub values: Vec<Complex64>,
    pub provenance: Provenance,
}

impl SampleSet {
    pub fn new(values: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSample("empty sample set".into()));
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DegenerateSample(format!("non-finite value at index {i}")));
        }
        Ok(SampleSet { values, provenance })
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn squared_magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

/// Outcome of fitting a distribution family and testing the fit by KS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub family: String,
    pub parameters: BTreeMap<String, f64>,
    pub ks_stat: f64,
    pub p_value: f64,
}

impl FitReport {
    pub(crate) fn new(family: &str, parameters: &[(&str, f64)], ks: KsResult) -> Self {
        FitReport {
            family: family.to_string(),
            parameters: parameters.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            ks_stat: ks.statistic,
            p_value: ks.p_value,
        }
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }
}

/// Percentage of samples strictly below `x`.
pub fn percentile_of(x: f64, xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::DegenerateSample("empty sample".into()));
    }
    let below = xs.iter().filter(|&&v| v < x).count();
    Ok(100.0 * below as f64 / xs.len() as f64)
}

/// `n! / n^n`, evaluated in log space: the second moment of a permanent whose
/// `n!` terms each have variance `n^-n` and are uncorrelated.
pub fn haar_second_moment(n: usize) -> Result<f64> {
    if !(1..=170).contains(&n) {
        return Err(Error::InvalidParameter(format!("second moment defined here for 1 <= n <= 170, got {n}")));
    }
    let n = n as f64;
    Ok((ln_gamma(n + 1.0) - n * n.ln()).exp())
}

/// `E|perm(U)|^2 = n! (n-1)! / (2n-1)!` for Haar-random `U` in U(n), the
/// value sampling converges to. It lies below [`haar_second_moment`] by a
/// factor that grows roughly like `(4/e)^n`.
pub fn haar_second_moment_exact(n: usize) -> Result<f64> {
    if !(1..=170).contains(&n) {
        return Err(Error::InvalidParameter(format!("second moment defined here for 1 <= n <= 170, got {n}")));
    }
    let n = n as f64;
    Ok((ln_gamma(n + 1.0) + ln_gamma(n) - ln_gamma(2.0 * n)).exp())
}

/// `Pr[|perm|^2 >= e_ref / n^k]` for each `k` in `k_grid`, which must be
/// nondecreasing.
pub fn anticoncentration_curve(squared_mags: &[f64], e_ref: f64, n: usize, k_grid: &[f64]) -> Result<Vec<f64>> {
    if !(e_ref > 0.0) {
        return Err(Error::InvalidParameter(format!("reference moment must be positive, got {e_ref}")));
    }
    if squared_mags.is_empty() {
        return Err(Error::DegenerateSample("empty sample".into()));
    }
    if k_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("k grid must be nondecreasing".into()));
    }
    let mut sorted = squared_mags.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len() as f64;
    let curve: Vec<f64> = k_grid
        .iter()
        .map(|&k| {
            let threshold = e_ref / (n as f64).powf(k);
            let below = sorted.partition_point(|&v| v < threshold);
            (sorted.len() - below) as f64 / total
        })
        .collect();
    assert!(curve.windows(2).all(|w| w[0] <= w[1]), "anti-concentration curve not monotone");
    Ok(curve)
}

/// Ascending copy with NaNs rejected.
pub(crate) fn sorted_finite(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Linear-interpolation quantile on sorted data (`q` in `[0, 1]`), the usual
/// `(N - 1) q` positioning.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let w = pos - lo as f64;
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}
