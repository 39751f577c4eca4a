use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ks::{ks_test, KsResult};
use crate::ensembles::RngStream;
use crate::{Error, Result};

/// Resamples used for the pseudocovariance standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Tests of circularly-symmetric complex Gaussianity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBattery {
    /// `sd(Re) / sd(Im)`.
    pub var_ratio: f64,
    pub pearson_r: f64,
    /// KS of Mahalanobis `d^2` against chi-squared with 2 degrees of freedom.
    pub mahalanobis_ks: KsResult,
    /// Mardia's `N b_{1,2} / 6`.
    pub mardia_statistic: f64,
    /// Upper tail of chi-squared with 4 degrees of freedom.
    pub mardia_p: f64,
    /// KS of `arg z` against the uniform law on `[0, 2 pi)`.
    pub phase_ks: KsResult,
    /// `|mean (z - m)^2| / mean |z - m|^2`.
    pub pseudocov_ratio: f64,
    pub pseudocov_se: f64,
}

fn pseudocov_ratio(zs: &[Complex64], idx: impl Iterator<Item = usize> + Clone) -> f64 {
    let n = zs.len() as f64;
    let mean = idx.clone().map(|i| zs[i]).sum::<Complex64>() / n;
    let (mut p, mut v) = (Complex64::new(0.0, 0.0), 0.0);
    for i in idx {
        let d = zs[i] - mean;
        p += d * d;
        v += d.norm_sqr();
    }
    p.norm() / v
}

/// Runs the battery. `rng` drives the bootstrap.
///
/// A sample whose real and imaginary parts are linearly dependent has no
/// bivariate density; it is rejected with [`Error::CollinearSample`], which
/// still carries the phase-uniformity p-value.
pub fn complex_gaussian_battery(zs: &[Complex64], rng: &mut RngStream) -> Result<GaussianBattery> {
    let n = zs.len();
    if n < 100 {
        return Err(Error::DegenerateSample(format!("battery needs at least 100 samples, got {n}")));
    }
    if zs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let phases: Vec<f64> = zs.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    let phase_ks = ks_test(&phases, |x| (x / TAU).clamp(0.0, 1.0))?;

    let nf = n as f64;
    let mean = zs.iter().sum::<Complex64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for z in zs {
        let d = z - mean;
        sxx += d.re * d.re;
        syy += d.im * d.im;
        sxy += d.re * d.im;
    }
    // Maximum-likelihood covariance.
    let (sxx, syy, sxy) = (sxx / nf, syy / nf, sxy / nf);
    let det = sxx * syy - sxy * sxy;
    if !(det > 1e-12 * sxx * syy) || !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::CollinearSample { phase_ks_p: phase_ks.p_value });
    }
    let var_ratio = (sxx / syy).sqrt();
    let pearson_r = sxy / (sxx * syy).sqrt();

    // Whitening by the inverse Cholesky factor of the covariance.
    let l11 = sxx.sqrt();
    let l21 = sxy / l11;
    let l22 = (syy - l21 * l21).sqrt();
    let white: Vec<[f64; 2]> = zs
        .iter()
        .map(|z| {
            let d = z - mean;
            let a = d.re / l11;
            [a, (d.im - l21 * a) / l22]
        })
        .collect();
    let d2: Vec<f64> = white.iter().map(|w| w[0] * w[0] + w[1] * w[1]).collect();
    let mahalanobis_ks = ks_test(&d2, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x / 2.0).exp() })?;

    // b_{1,2} = sum over (a, b, c) of the squared third moments of the
    // whitened data, equal to N^{-2} sum_{ij} (w_i . w_j)^3.
    let mut third = [[[0.0f64; 2]; 2]; 2];
    for w in &white {
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    third[a][b][c] += w[a] * w[b] * w[c];
                }
            }
        }
    }
    let b1: f64 = third.iter().flatten().flatten().map(|m| (m / nf).powi(2)).sum();
    let mardia_statistic = nf * b1 / 6.0;
    let mardia_p = ((-mardia_statistic / 2.0).exp() * (1.0 + mardia_statistic / 2.0)).clamp(0.0, 1.0);

    let ratio = pseudocov_ratio(zs, 0..n);
    let boot: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let idx: Vec<usize> = (0..n).map(|_| rng.index(n)).collect();
            pseudocov_ratio(zs, idx.into_iter())
        })
        .collect();
    let bm = boot.iter().sum::<f64>() / boot.len() as f64;
    let pseudocov_se = (boot.iter().map(|b| (b - bm).powi(2)).sum::<f64>() / (boot.len() - 1) as f64).sqrt();

    Ok(GaussianBattery {
        var_ratio,
        pearson_r,
        mahalanobis_ks,
        mardia_statistic,
        mardia_p,
        phase_ks,
        pseudocov_ratio: ratio,
        pseudocov_se,
    })
}
