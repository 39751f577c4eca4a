use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::ks::{ks_from_cdf_values, KsResult};
use super::mcculloch_tables as tables;
use super::{quantile_sorted, sorted_finite};
use crate::exec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StableMethod {
    Ecf,
    McCulloch,
}

/// Alpha-stable parameters with characteristic function
/// `exp(i t location - |scale t|^alpha)` in the symmetric case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableFit {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
    pub location: f64,
    pub method: StableMethod,
    /// The estimate sits on the boundary of the method's domain and was
    /// clamped there.
    pub clamped: bool,
}

impl StableFit {
    pub fn symmetric(alpha: f64, scale: f64, location: f64) -> Self {
        StableFit { alpha, beta: 0.0, scale, location, method: StableMethod::Ecf, clamped: false }
    }
}

/// ECF grid `t_k = ECF_STEP k`, `k = 1..=10`, in units of the sample IQR.
const ECF_STEP: f64 = 0.3;

/// Alpha from the slope of `ln(-ln |phi(t)|^2)` against `ln t`, where `phi`
/// is the empirical characteristic function of the sample standardized by
/// its median and interquartile range. The intercept gives the scale.
pub fn ecf_alpha(xs: &[f64]) -> Result<StableFit> {
    if xs.len() < 1000 {
        return Err(Error::DegenerateSample(format!("ECF needs at least 1000 samples, got {}", xs.len())));
    }
    let sorted = sorted_finite(xs)?;
    let median = quantile_sorted(&sorted, 0.5);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    if !(iqr > 0.0) {
        return Err(Error::DegenerateQuantiles);
    }
    let z: Vec<f64> = sorted.iter().map(|x| (x - median) / iqr).collect();
    let n = z.len() as f64;
    let mut pts = Vec::with_capacity(10);
    for k in 1..=10 {
        let t = ECF_STEP * k as f64;
        let phi = z.iter().map(|&v| Complex64::from_polar(1.0, t * v)).sum::<Complex64>() / n;
        let m2 = phi.norm_sqr();
        if !(m2 < 1.0 && m2 > 0.0) {
            return Err(Error::EcfDegenerate { t, modulus: m2.sqrt() });
        }
        pts.push((t.ln(), (-m2.ln()).ln()));
    }
    let (slope, intercept) = least_squares(&pts);
    let clamped = !(slope > 0.0 && slope <= 2.0);
    let alpha = slope.clamp(f64::MIN_POSITIVE, 2.0);
    // ln(-ln|phi|^2) = ln 2 + alpha ln(gamma) + alpha ln t.
    let gamma = ((intercept - LN_2) / alpha).exp();
    Ok(StableFit { alpha, beta: 0.0, scale: gamma * iqr, location: median, method: StableMethod::Ecf, clamped })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Segment index and weight of `v` on an ascending axis, clamped to its ends.
fn locate(axis: &[f64], v: f64) -> (usize, f64) {
    if v <= axis[0] {
        return (0, 0.0);
    }
    let last = axis.len() - 1;
    if v >= axis[last] {
        return (last - 1, 1.0);
    }
    let i = axis.partition_point(|&a| a <= v) - 1;
    (i, (v - axis[i]) / (axis[i + 1] - axis[i]))
}

fn bilinear<const C: usize>(table: &[[f64; C]], rows: &[f64], cols: &[f64], r: f64, c: f64) -> f64 {
    let (i, u) = locate(rows, r);
    let (j, w) = locate(cols, c);
    let a = table[i][j] * (1.0 - w) + table[i][j + 1] * w;
    let b = table[i + 1][j] * (1.0 - w) + table[i + 1][j + 1] * w;
    a * (1.0 - u) + b * u
}

/// McCulloch's quantile estimator: `nu_alpha = (q95 - q05) / (q75 - q25)`
/// and `nu_beta = (q95 + q05 - 2 q50) / (q95 - q05)` are mapped to
/// `(alpha, beta)` through his tables by bilinear interpolation. Alpha is
/// confined to the table range `[0.5, 2]`.
pub fn mcculloch_alpha(xs: &[f64]) -> Result<StableFit> {
    if xs.len() < 500 {
        return Err(Error::DegenerateSample(format!("quantile method needs at least 500 samples, got {}", xs.len())));
    }
    let sorted = sorted_finite(xs)?;
    let q = |p| quantile_sorted(&sorted, p);
    let (q05, q25, q50, q75, q95) = (q(0.05), q(0.25), q(0.5), q(0.75), q(0.95));
    if !(q75 > q25) || !(q95 > q05) {
        return Err(Error::DegenerateQuantiles);
    }
    let nu_alpha = (q95 - q05) / (q75 - q25);
    let nu_beta = (q95 + q05 - 2.0 * q50) / (q95 - q05);
    let (mut alpha, beta, mut clamped);
    if nu_alpha < tables::NU_ALPHA_AXIS[0] {
        // Lighter tails than any stable law but the Gaussian.
        alpha = 2.0;
        beta = 0.0;
        clamped = true;
    } else {
        clamped = nu_alpha > tables::NU_ALPHA_AXIS[tables::NU_ALPHA_AXIS.len() - 1];
        let nb = nu_beta.abs();
        alpha = bilinear(&tables::ALPHA, &tables::NU_ALPHA_AXIS, &tables::NU_BETA_AXIS, nu_alpha, nb);
        beta = (nu_beta.signum() * bilinear(&tables::BETA, &tables::NU_ALPHA_AXIS, &tables::NU_BETA_AXIS, nu_alpha, nb))
            .clamp(-1.0, 1.0);
    }
    if alpha < 0.5 {
        alpha = 0.5;
        clamped = true;
    }
    alpha = alpha.min(2.0);
    let nu_c = bilinear(&tables::NU_C, &tables::ALPHA_AXIS, &tables::BETA_AXIS, alpha, beta.abs());
    let nu_zeta = beta.signum() * bilinear(&tables::NU_ZETA, &tables::ALPHA_AXIS, &tables::BETA_AXIS, alpha, beta.abs());
    let scale = (q75 - q25) / nu_c;
    Ok(StableFit { alpha, beta, scale, location: q50 + scale * nu_zeta, method: StableMethod::McCulloch, clamped })
}

/// 20-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 20;
        (0..N)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=N {
                        let k = k as f64;
                        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    gauss_legendre().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Half-periods of the Gil-Pelaez integrand beyond which the tail series is
/// used instead.
const MAX_HALF_PERIODS: f64 = 4000.0;

/// `1 - F(u)` for `u > 0` and unit scale from the large-argument series
/// `(1/pi) sum_k (-1)^{k+1} Gamma(alpha k) / k! sin(k pi alpha / 2) u^{-alpha k}`.
fn tail_series(alpha: f64, u: f64) -> f64 {
    let lu = u.ln();
    let mut sum = 0.0;
    for k in 1..=400 {
        let kf = k as f64;
        let ln_mag = ln_gamma(alpha * kf) - ln_gamma(kf + 1.0) - alpha * kf * lu;
        let term = ln_mag.exp() * (kf * PI * alpha / 2.0).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if ln_mag < -40.0 {
            break;
        }
    }
    (sum / PI).clamp(0.0, 1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidStabilityIndex(alpha))
    }
}

/// Symmetric stable cdf by Gil-Pelaez inversion,
/// `F(x) = 1/2 + (1/pi) int_0^inf e^{-(g t)^alpha} sin(t (x - d)) / t dt`,
/// truncated where the envelope drops below `1e-12`. `beta` is ignored.
pub fn stable_cdf(x: f64, fit: &StableFit) -> Result<f64> {
    check_alpha(fit.alpha)?;
    if !(fit.scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {}", fit.scale)));
    }
    Ok(symmetric_cdf(fit.alpha, (x - fit.location) / fit.scale))
}

fn symmetric_cdf(alpha: f64, u: f64) -> f64 {
    if u == 0.0 {
        return 0.5;
    }
    if u.is_infinite() {
        return if u > 0.0 { 1.0 } else { 0.0 };
    }
    let a = u.abs();
    // exp(-t^alpha) < 1e-12 beyond t_max.
    let t_max = (12.0 * std::f64::consts::LN_10).powf(1.0 / alpha);
    let half_period = PI / a;
    let upper = if t_max / half_period > MAX_HALF_PERIODS {
        if alpha == 2.0 {
            // Gaussian with variance 2.
            0.5 * erfc(a / 2.0)
        } else {
            tail_series(alpha, a)
        }
    } else {
        let f = |t: f64| (-t.powf(alpha)).exp() * (t * a).sin() / t;
        let step = half_period.min(t_max / 64.0);
        let mut total = 0.0;
        // The envelope has an integrable cusp at 0 for alpha < 1; resolve the
        // first step geometrically.
        let mut lo = step;
        for _ in 0..30 {
            let hi = lo;
            lo = hi / 2.0;
            total += integrate(&f, lo, hi);
        }
        total += integrate(&f, 0.0, lo);
        let mut t = step;
        while t < t_max {
            let next = (t + step).min(t_max);
            total += integrate(&f, t, next);
            t = next;
        }
        (0.5 - total / PI).clamp(0.0, 1.0)
    };
    if u > 0.0 {
        1.0 - upper
    } else {
        upper
    }
}

/// Inverse of [`stable_cdf`] by bisection.
pub fn stable_quantile(p: f64, fit: &StableFit) -> Result<f64> {
    check_alpha(fit.alpha)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("probability must lie in (0, 1), got {p}")));
    }
    let cdf = |x: f64| stable_cdf(x, fit);
    let (mut lo, mut hi) = (fit.location - fit.scale, fit.location + fit.scale);
    while cdf(lo)? > p {
        lo = fit.location - 2.0 * (fit.location - lo);
    }
    while cdf(hi)? < p {
        hi = fit.location + 2.0 * (hi - fit.location);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * (1.0 + mid.abs()) {
            break;
        }
        if cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// KS test of `xs` against the symmetric stable law `fit`.
pub fn stable_ks(xs: &[f64], fit: &StableFit) -> Result<KsResult> {
    check_alpha(fit.alpha)?;
    if xs.len() < 10 {
        return Err(Error::DegenerateSample(format!("KS needs at least 10 samples, got {}", xs.len())));
    }
    let sorted = sorted_finite(xs)?;
    let values = exec::map_slice(&sorted, |&x| stable_cdf(x, fit)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ks_from_cdf_values(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::RngStream;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn cauchy_grid(n: usize) -> Vec<f64> {
        (1..=n).map(|k| (PI * ((k as f64 - 0.5) / n as f64 - 0.5)).tan()).collect()
    }

    fn normal_grid(n: usize) -> Vec<f64> {
        let normal = Normal::new(0.0, 1.0).unwrap();
        (1..=n).map(|k| normal.inverse_cdf((k as f64 - 0.5) / n as f64)).collect()
    }

    #[test]
    fn ecf_on_reference_laws() {
        let c = ecf_alpha(&cauchy_grid(10_000)).unwrap();
        assert!((c.alpha - 1.0).abs() < 0.05, "{c:?}");
        assert!((c.scale - 1.0).abs() < 0.05, "{c:?}");
        let g = ecf_alpha(&normal_grid(10_000)).unwrap();
        assert!((g.alpha - 2.0).abs() < 0.05, "{g:?}");
        assert!((g.scale - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.05, "{g:?}");
        assert!(ecf_alpha(&cauchy_grid(999)).is_err());
    }

    #[test]
    fn mcculloch_on_reference_laws() {
        let c = mcculloch_alpha(&cauchy_grid(10_000)).unwrap();
        assert!((c.alpha - 1.0).abs() < 0.1, "{c:?}");
        assert!(c.beta.abs() < 0.1);
        assert!((c.scale - 1.0).abs() < 0.05, "{c:?}");
        let g = mcculloch_alpha(&normal_grid(10_000)).unwrap();
        assert!(g.alpha >= 1.95, "{g:?}");
        assert!(matches!(mcculloch_alpha(&[1.0; 600]), Err(Error::DegenerateQuantiles)));
    }

    #[test]
    fn affine_equivariance() {
        let mut s = RngStream::new(40, 0);
        let xs: Vec<f64> = (0..5_000).map(|_| s.gaussian() / s.gaussian().abs().sqrt()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x - 11.0).collect();
        let (a, b) = (ecf_alpha(&xs).unwrap(), ecf_alpha(&ys).unwrap());
        assert!((a.alpha - b.alpha).abs() < 1e-6);
        assert!((3.7 * a.scale - b.scale).abs() < 1e-6 * b.scale);
        let (a, b) = (mcculloch_alpha(&xs).unwrap(), mcculloch_alpha(&ys).unwrap());
        assert!((a.alpha - b.alpha).abs() < 1e-9);
    }

    #[test]
    fn closed_form_special_cases() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let gauss = StableFit::symmetric(2.0, std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let cauchy = StableFit::symmetric(1.0, 1.0, 0.0);
        for x in [-30.0, -2.0, -1.0, -0.3, 0.0, 0.5, 1.0, 2.0, 7.0, 300.0, 1e6] {
            assert!((stable_cdf(x, &gauss).unwrap() - normal.cdf(x)).abs() < 1e-6, "x = {x}");
            let exact = 0.5 + f64::atan(x) / PI;
            assert!((stable_cdf(x, &cauchy).unwrap() - exact).abs() < 1e-6, "x = {x}");
        }
        assert!((stable_cdf(1.0, &cauchy).unwrap() - 0.75).abs() < 1e-9);
    }

    #[test]
    fn tail_series_meets_quadrature() {
        for alpha in [0.6, 1.0, 1.3, 1.7] {
            for u in [30.0, 80.0] {
                let quad = symmetric_cdf(alpha, u);
                let series = 1.0 - tail_series(alpha, u);
                assert!((quad - series).abs() < 1e-8, "alpha={alpha} u={u}: {quad} vs {series}");
            }
        }
    }

    #[test]
    fn cdf_monotone_and_bounded() {
        for alpha in [0.5, 0.9, 1.2, 1.5, 1.9, 2.0] {
            let fit = StableFit::symmetric(alpha, 1.3, 0.4);
            let mut prev = 0.0;
            for i in 0..100 {
                let x = -20.0 + 40.0 * i as f64 / 99.0;
                let f = stable_cdf(x, &fit).unwrap();
                assert!((0.0..=1.0).contains(&f));
                assert!(f >= prev - 1e-12, "alpha={alpha} x={x}");
                prev = f;
            }
        }
        assert!(matches!(stable_cdf(0.0, &StableFit::symmetric(2.5, 1.0, 0.0)), Err(Error::InvalidStabilityIndex(_))));
        assert!(stable_cdf(0.0, &StableFit::symmetric(0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn quantile_round_trip() {
        for alpha in [0.7, 1.0, 1.4, 2.0] {
            let fit = StableFit::symmetric(alpha, 0.8, -0.2);
            for p in [0.01, 0.5, 0.99] {
                let x = stable_quantile(p, &fit).unwrap();
                assert!((stable_cdf(x, &fit).unwrap() - p).abs() < 1e-6, "alpha={alpha} p={p}");
            }
        }
    }

    #[test]
    fn ks_accepts_matching_law() {
        let fit = StableFit::symmetric(1.0, 1.0, 0.0);
        let mut s = RngStream::new(41, 0);
        let xs: Vec<f64> = (0..3_000).map(|_| (PI * (s.uniform() - 0.5)).tan()).collect();
        assert!(stable_ks(&xs, &fit).unwrap().p_value > 0.01);
        let wrong = StableFit::symmetric(2.0, 1.0, 0.0);
        assert!(stable_ks(&xs, &wrong).unwrap().p_value < 1e-6);
    }
}
