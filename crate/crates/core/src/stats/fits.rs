use num_complex::Complex64;

use super::ks::ks_test;
use super::FitReport;
use crate::{Error, Result};

const NEWTON_TOLERANCE: f64 = 1e-10;
const NEWTON_MAX_ITERATIONS: usize = 100;

fn check_positive(xs: &[f64]) -> Result<()> {
    if xs.len() < 10 {
        return Err(Error::DegenerateSample(format!("need at least 10 samples, got {}", xs.len())));
    }
    if let Some(x) = xs.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!("samples must be positive and finite, found {x}")));
    }
    Ok(())
}

/// Rayleigh MLE `s^2 = sum x^2 / (2N)`, with KS against the fitted cdf.
pub fn fit_rayleigh(magnitudes: &[f64]) -> Result<FitReport> {
    check_positive(magnitudes)?;
    let s2 = magnitudes.iter().map(|x| x * x).sum::<f64>() / (2.0 * magnitudes.len() as f64);
    let ks = ks_test(magnitudes, |x| 1.0 - (-x * x / (2.0 * s2)).exp())?;
    Ok(FitReport::new("rayleigh", &[("scale", s2.sqrt())], ks))
}

/// Weibull MLE. The shape `k` solves
/// `sum x^k ln x / sum x^k - 1/k - mean(ln x) = 0` by Newton's method; the
/// scale follows in closed form.
pub fn fit_weibull(magnitudes: &[f64]) -> Result<FitReport> {
    check_positive(magnitudes)?;
    let n = magnitudes.len() as f64;
    // Work with centred logs: the shape equation is scale-invariant and this
    // keeps x^k near 1.
    let logs: Vec<f64> = magnitudes.iter().map(|x| x.ln()).collect();
    let mean_log = logs.iter().sum::<f64>() / n;
    let u: Vec<f64> = logs.iter().map(|l| l - mean_log).collect();
    let sd = (u.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample("all samples equal".into()));
    }
    // Moment estimate from Var(ln X) = pi^2 / (6 k^2).
    let mut k = std::f64::consts::PI / (6f64.sqrt() * sd);
    let mut trace = vec![k];
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &v in &u {
            let w = (k * v).exp();
            s0 += w;
            s1 += w * v;
            s2 += w * v * v;
        }
        let g = s1 / s0 - 1.0 / k;
        let dg = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k);
        let mut next = k - g / dg;
        if !(next > 0.0) || !next.is_finite() {
            next = k / 2.0;
        }
        let step = (next - k).abs();
        k = next;
        trace.push(k);
        if step <= NEWTON_TOLERANCE * k.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FitFailed { iterations: NEWTON_MAX_ITERATIONS, trace });
    }
    let mean_w = u.iter().map(|v| (k * v).exp()).sum::<f64>() / n;
    let scale = mean_log.exp() * mean_w.powf(1.0 / k);
    let ks = ks_test(magnitudes, |x| 1.0 - (-(x / scale).powf(k)).exp())?;
    Ok(FitReport::new("weibull", &[("shape", k), ("scale", scale)], ks))
}

/// KS of `|z|^2` against the exponential law with mean `sigma2`.
pub fn squared_amplitude_exponential_check(zs: &[Complex64], sigma2: f64) -> Result<FitReport> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma^2 must be positive, got {sigma2}")));
    }
    let sq: Vec<f64> = zs.iter().map(|z| z.norm_sqr()).collect();
    let ks = ks_test(&sq, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x / sigma2).exp() })?;
    Ok(FitReport::new("exponential", &[("sigma2", sigma2)], ks))
}
