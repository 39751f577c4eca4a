//! Geodesics on U(n) from the identity to the cycle matrix `C_n` and to the
//! unitary DFT matrix `F_n`, and the scaling function
//! `f(t) = -(1/n) ln |perm(gamma(t))|` along them.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec;
use crate::matrix::{build_cycle, build_schur, identity, CMatrix, Matrix};
use crate::permanent::{perm, perm_abs_entrywise, Algorithm};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeodesicTarget {
    Cycle,
    Dft,
}

impl GeodesicTarget {
    pub fn name(self) -> &'static str {
        match self {
            GeodesicTarget::Cycle => "cycle",
            GeodesicTarget::Dft => "dft",
        }
    }
}

impl fmt::Display for GeodesicTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeodesicTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle" => Ok(GeodesicTarget::Cycle),
            "dft" => Ok(GeodesicTarget::Dft),
            _ => Err(Error::InvalidParameter(format!("unknown geodesic target {s:?}"))),
        }
    }
}

fn check_t(t: f64) {
    assert!((0.0..=1.0).contains(&t), "t = {t} outside [0, 1]");
}

/// The circulant
/// `gamma(t)_{jl} = (e^{2 pi i t} - 1) / (n (e^{2 pi i (l - j + t)/n} - 1))`,
/// with the removable singularities at `t = 0` and `t = 1` replaced by `I`
/// and `C_n`.
///
/// Entries are evaluated as
/// `e^{i pi (t (n - 1) - d) / n} sin(pi t) / (n sin(pi (d + t) / n))`,
/// `d = l - j mod n`, with each sine taken at the smaller of its argument and
/// its reflection so that nothing cancels near `t = 1`.
///
/// Its permanent is `e^{i pi t (n - 1)}` times a real number.
pub fn cycle_geodesic(n: usize, t: f64) -> CMatrix {
    check_t(t);
    if t == 0.0 {
        return identity(n);
    }
    if t == 1.0 {
        return build_cycle(n);
    }
    let nf = n as f64;
    let s = 1.0 - t;
    let sin_pi = |x: f64, reflected: f64| (PI * x.min(reflected)).sin();
    let top = sin_pi(t, s);
    let row: Vec<Complex64> = (0..n)
        .map(|d| {
            let u = (d as f64 + t) / nf;
            let u_reflected = ((n - 1 - d) as f64 + s) / nf;
            let magnitude = top / (nf * sin_pi(u, u_reflected));
            Complex64::from_polar(magnitude, PI * (t * (nf - 1.0) - d as f64) / nf)
        })
        .collect();
    Matrix::from_fn(n, |j, l| row[(l + n - j) % n])
}

/// Spectral projector of `F_n` for one of its eigenvalues, with the rotation
/// angle the geodesic uses for it.
#[derive(Debug, Clone)]
pub struct DftProjector {
    pub eigenvalue: Complex64,
    pub angle: f64,
    pub projector: CMatrix,
}

/// Projectors `P_l = (1/4) sum_m l^{-m} F^m` for `l` in `{1, i, -1, -i}`,
/// using `F^4 = I`. Angles are `0, pi/2, -pi, -pi/2`: both `+pi` and `-pi`
/// reach `-1`, and `-pi` is the branch used throughout.
pub fn dft_projectors(n: usize) -> [DftProjector; 4] {
    let f = build_schur(n, true);
    // F^2 is the index reversal j -> -j, F^3 = F^{-1} = conj(F).
    let powers = |j: usize, k: usize| -> [Complex64; 4] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let f1 = *f.get(j, k);
        [if j == k { one } else { zero }, f1, if (j + k) % n == 0 { one } else { zero }, f1.conj()]
    };
    let make = |eigenvalue: Complex64, angle: f64| {
        // l^{-m} for the four unit eigenvalues is exact.
        let inv = eigenvalue.conj();
        let coeffs = [Complex64::new(1.0, 0.0), inv, inv * inv, inv * inv * inv];
        let projector = Matrix::from_fn(n, |j, k| {
            let p = powers(j, k);
            (0..4).map(|m| coeffs[m] * p[m]).sum::<Complex64>() * 0.25
        });
        DftProjector { eigenvalue, angle, projector }
    };
    [
        make(Complex64::new(1.0, 0.0), 0.0),
        make(Complex64::new(0.0, 1.0), FRAC_PI_2),
        make(Complex64::new(-1.0, 0.0), -PI),
        make(Complex64::new(0.0, -1.0), -FRAC_PI_2),
    ]
}

fn dft_geodesic_from(projectors: &[DftProjector; 4], n: usize, t: f64) -> CMatrix {
    check_t(t);
    if t == 0.0 {
        return identity(n);
    }
    let phases: Vec<Complex64> = projectors.iter().map(|p| Complex64::from_polar(1.0, t * p.angle)).collect();
    Matrix::from_fn(n, |j, k| projectors.iter().zip(&phases).map(|(p, &e)| e * *p.projector.get(j, k)).sum())
}

/// `gamma(t) = sum_l e^{i t theta_l} P_l`, from `I` to `F_n`.
pub fn dft_geodesic(n: usize, t: f64) -> CMatrix {
    dft_geodesic_from(&dft_projectors(n), n, t)
}

pub fn geodesic_matrix(target: GeodesicTarget, n: usize, t: f64) -> CMatrix {
    match target {
        GeodesicTarget::Cycle => cycle_geodesic(n, t),
        GeodesicTarget::Dft => dft_geodesic(n, t),
    }
}

/// `-(1/n) ln |p|`, or `None` when `p = 0`.
pub fn scaling_value(n: usize, p: Complex64) -> Option<f64> {
    let m = p.norm();
    (m > 0.0 && m.is_finite()).then(|| -m.ln() / n as f64)
}

/// Permanents and scaling function sampled along a geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTrace {
    pub n: usize,
    pub target: GeodesicTarget,
    pub ts: Vec<f64>,
    pub perms: Vec<Complex64>,
    /// `None` where the permanent vanishes.
    pub f_values: Vec<Option<f64>>,
}

/// Uniform grid `t_k = k / (steps - 1)`.
pub fn uniform_grid(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 grid points, got {steps}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| if k + 1 == steps { 1.0 } else { k as f64 / last }).collect())
}

/// Sweep over an explicit grid, which must be strictly increasing in `[0, 1]`.
pub fn sweep_grid(n: usize, target: GeodesicTarget, ts: Vec<f64>) -> Result<GeodesicTrace> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if ts.is_empty() || ts.windows(2).any(|w| w[0] >= w[1]) || ts[0] < 0.0 || ts[ts.len() - 1] > 1.0 {
        return Err(Error::InvalidParameter("grid must be strictly increasing within [0, 1]".into()));
    }
    let projectors = (target == GeodesicTarget::Dft).then(|| dft_projectors(n));
    let perms = exec::map_slice(&ts, |&t| {
        let m = match &projectors {
            Some(p) => dft_geodesic_from(p, n, t),
            None => cycle_geodesic(n, t),
        };
        perm(&m, Algorithm::Ryser)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let f_values = perms.iter().map(|&p| scaling_value(n, p)).collect();
    Ok(GeodesicTrace { n, target, ts, perms, f_values })
}

/// Sweep over `steps` uniformly spaced points including both endpoints.
pub fn sweep(n: usize, target: GeodesicTarget, steps: usize) -> Result<GeodesicTrace> {
    sweep_grid(n, target, uniform_grid(steps)?)
}

/// Midpoint diagnostics for the cycle geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidpointReport {
    pub n: usize,
    pub perm_mid: Complex64,
    /// `|perm| / (2 e^{-n})`.
    pub ratio: f64,
    /// Sign of the real part: `-1`, `0` or `1`.
    pub sign: i8,
    /// `n (ratio - 1)`.
    pub correction: f64,
    /// `perm(|gamma(1/2)|)^{1/n}`.
    pub cancellation_base: f64,
}

pub fn midpoint_analysis(n: usize) -> Result<MidpointReport> {
    if !(3..=23).contains(&n) {
        return Err(Error::InvalidParameter(format!("midpoint analysis needs 3 <= n <= 23, got {n}")));
    }
    let g = cycle_geodesic(n, 0.5);
    let perm_mid = perm(&g, Algorithm::Ryser)?;
    let ratio = perm_mid.norm() / (2.0 * (-(n as f64)).exp());
    let sign = if perm_mid.re.abs() < 1e-12 { 0 } else { perm_mid.re.signum() as i8 };
    let cancellation_base = perm_abs_entrywise(&g)?.powf(1.0 / n as f64);
    Ok(MidpointReport { n, perm_mid, ratio, sign, correction: n as f64 * (ratio - 1.0), cancellation_base })
}

fn check_dft_trace(trace: &GeodesicTrace) -> Result<(usize, f64)> {
    if trace.target != GeodesicTarget::Dft {
        return Err(Error::InvalidParameter("recovery ratio needs a DFT trace".into()));
    }
    let (k, min) = trace
        .perms
        .iter()
        .map(|p| p.norm())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::DegenerateTrace)?;
    if min == 0.0 || !trace.perms.last().is_some_and(|p| p.norm() > 0.0) {
        return Err(Error::DegenerateTrace);
    }
    Ok((k, min))
}

/// `|perm(F_n)| / min_t |perm(gamma(t))|` over the trace grid.
pub fn recovery_ratio(trace: &GeodesicTrace) -> Result<f64> {
    let (_, min) = check_dft_trace(trace)?;
    Ok(trace.perms.last().unwrap().norm() / min)
}

/// As [`recovery_ratio`], with the minimum refined by golden-section search
/// between the grid neighbours of the grid minimum.
pub fn recovery_ratio_refined(trace: &GeodesicTrace) -> Result<f64> {
    let (k, grid_min) = check_dft_trace(trace)?;
    let n = trace.n;
    let projectors = dft_projectors(n);
    let value = |t: f64| -> Result<f64> { Ok(perm(&dft_geodesic_from(&projectors, n, t), Algorithm::Ryser)?.norm()) };
    let mut lo = trace.ts[k.saturating_sub(1)];
    let mut hi = trace.ts[(k + 1).min(trace.ts.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (value(x1)?, value(x2)?);
    let mut best = grid_min.min(f1).min(f2);
    while hi - lo > 1e-10 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = value(x1)?;
            best = best.min(f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = value(x2)?;
            best = best.min(f2);
        }
    }
    if best == 0.0 {
        return Err(Error::DegenerateTrace);
    }
    Ok(trace.perms.last().unwrap().norm() / best)
}

/// Least-squares `a` in `f(t) = a t^2` over the defined points with
/// `0 < t <= 0.1`.
pub fn onset_coefficient(trace: &GeodesicTrace) -> Result<f64> {
    let (mut num, mut den, mut count) = (0.0, 0.0, 0);
    for (&t, f) in trace.ts.iter().zip(&trace.f_values) {
        if t > 0.0 && t <= 0.1 + 1e-12 {
            if let Some(f) = f {
                num += f * t * t;
                den += t.powi(4);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::InvalidParameter("no grid points in (0, 0.1]".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{matmul, max_abs_diff, unitarity_defect};

    #[test]
    fn cycle_endpoints_and_unitarity() {
        for n in [1usize, 2, 5, 9, 17] {
            assert_eq!(cycle_geodesic(n, 0.0), identity(n));
            assert_eq!(cycle_geodesic(n, 1.0), build_cycle(n));
            assert!(max_abs_diff(&cycle_geodesic(n, 1.0 - 1e-13), &build_cycle(n)) < 1e-12);
            for k in 0..=100 {
                let t = k as f64 / 100.0;
                assert!(unitarity_defect(&cycle_geodesic(n, t)) < 1e-10, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn cycle_entry_magnitudes() {
        let (n, t) = (7, 0.3);
        let g = cycle_geodesic(n, t);
        for j in 0..n {
            for l in 0..n {
                let d = l as f64 - j as f64;
                let expect = (PI * t).sin() / (n as f64 * (PI * (d + t) / n as f64).sin().abs());
                assert!((g.get(j, l).norm() - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dft_projector_identities() {
        for n in 1..=17 {
            let ps = dft_projectors(n);
            let sum = ps.iter().fold(Matrix::from_fn(n, |_, _| Complex64::new(0.0, 0.0)), |acc, p| {
                Matrix::from_fn(n, |j, k| acc.get(j, k) + p.projector.get(j, k))
            });
            assert!(max_abs_diff(&sum, &identity(n)) < 1e-10);
            for p in &ps {
                assert!(max_abs_diff(&matmul(&p.projector, &p.projector), &p.projector) < 1e-10);
            }
        }
        let ranks: Vec<f64> = dft_projectors(4)
            .iter()
            .map(|p| (0..4).map(|j| p.projector.get(j, j).re).sum::<f64>().round())
            .collect();
        // Eigenvalue order 1, i, -1, -i. With the e^{+2 pi i jk/n} sign the
        // multiplicities of i and -i are swapped relative to the e^{-} DFT.
        assert_eq!(ranks, vec![2.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn dft_endpoints_and_unitarity() {
        for n in [1usize, 2, 4, 7, 12, 17] {
            assert!(max_abs_diff(&dft_geodesic(n, 0.0), &identity(n)) < 1e-12);
            assert!(max_abs_diff(&dft_geodesic(n, 1.0), &build_schur(n, true)) < 1e-12);
            for k in 0..=100 {
                assert!(unitarity_defect(&dft_geodesic(n, k as f64 / 100.0)) < 1e-10);
            }
        }
    }

    #[test]
    fn sweep_endpoints() {
        let tr = sweep(5, GeodesicTarget::Cycle, 2).unwrap();
        assert_eq!(tr.perms[0], Complex64::new(1.0, 0.0));
        assert!((tr.perms[1] - 1.0).norm() < 1e-12);
        assert_eq!(tr.f_values[0], Some(-0.0));
        let tr = sweep(4, GeodesicTarget::Dft, 2).unwrap();
        let f4 = perm(&build_schur(4, true), Algorithm::Ryser).unwrap();
        assert!((tr.perms[1] - f4).norm() < 1e-12);
        assert!(sweep(4, GeodesicTarget::Dft, 1).is_err());
    }

    #[test]
    fn cycle_symmetry_and_phase() {
        let n = 9;
        let tr = sweep(n, GeodesicTarget::Cycle, 101).unwrap();
        for k in 0..101 {
            let (a, b) = (tr.perms[k].norm(), tr.perms[100 - k].norm());
            assert!((a - b).abs() <= 1e-9 * a.max(b), "k={k}: {a} vs {b}");
            let t = tr.ts[k];
            let r = tr.perms[k] * Complex64::from_polar(1.0, -PI * t * (n - 1) as f64);
            // Roundoff scales with the uncancelled magnitude, not with |perm|.
            let scale = perm_abs_entrywise(&cycle_geodesic(n, t)).unwrap();
            assert!(r.im.abs() <= 1e-12 * scale, "k={k}: {r}");
        }
        // Real at the midpoint, but not along the whole path.
        let mid = tr.perms[50];
        assert!(mid.im.abs() <= 1e-12 * perm_abs_entrywise(&cycle_geodesic(n, 0.5)).unwrap(), "{mid}");
        assert!(mid.im.abs() <= 1e-6 * mid.norm(), "{mid}");
        let p = tr.perms[10];
        assert!(p.im.abs() > 0.1 * p.norm(), "{p}");
    }

    #[test]
    fn midpoints() {
        let r5 = midpoint_analysis(5).unwrap();
        assert!((r5.perm_mid.re / 1.440e-2 - 1.0).abs() < 1e-3, "{r5:?}");
        let r7 = midpoint_analysis(7).unwrap();
        assert!((r7.perm_mid.re / -1.912e-3 - 1.0).abs() < 1e-3, "{r7:?}");
        assert!((r7.ratio - 1.0486).abs() < 1e-4);
        assert_eq!(r7.sign, -1);
        let r13 = midpoint_analysis(13).unwrap();
        assert!((r13.correction - 0.337).abs() < 0.002, "{r13:?}");
        assert!(midpoint_analysis(6).unwrap().perm_mid.norm() < 1e-12);
        for (n, sign) in [(5, 1), (7, -1), (9, 1), (11, -1), (13, 1)] {
            assert_eq!(midpoint_analysis(n).unwrap().sign, sign, "n={n}");
        }
        assert!(midpoint_analysis(2).is_err());
    }

    #[test]
    fn cancellation_base_growth() {
        let v13 = perm_abs_entrywise(&cycle_geodesic(13, 0.5)).unwrap();
        let v15 = perm_abs_entrywise(&cycle_geodesic(15, 0.5)).unwrap();
        let rate = (v15 / v13).sqrt();
        assert!((1.25..=1.40).contains(&rate), "{rate}");
    }

    #[test]
    fn onset_fit() {
        let ts = uniform_grid(201).unwrap();
        let tr = GeodesicTrace {
            n: 3,
            target: GeodesicTarget::Cycle,
            f_values: ts.iter().map(|t| Some(2.0 * t * t)).collect(),
            perms: vec![Complex64::new(1.0, 0.0); ts.len()],
            ts,
        };
        assert!((onset_coefficient(&tr).unwrap() - 2.0).abs() < 1e-9);

        let coarse = onset_coefficient(&sweep(9, GeodesicTarget::Cycle, 101).unwrap()).unwrap();
        let fine = onset_coefficient(&sweep(9, GeodesicTarget::Cycle, 201).unwrap()).unwrap();
        assert!((coarse / fine - 1.0).abs() < 0.01, "{coarse} {fine}");
    }

    #[test]
    fn recovery_invariant_under_rescaling() {
        let mut tr = sweep(5, GeodesicTarget::Dft, 101).unwrap();
        let r = recovery_ratio(&tr).unwrap();
        for p in &mut tr.perms {
            *p *= 3.5;
        }
        assert!((recovery_ratio(&tr).unwrap() / r - 1.0).abs() < 1e-12);
        let mut zero = tr.clone();
        zero.perms.iter_mut().for_each(|p| *p = Complex64::new(0.0, 0.0));
        assert_eq!(recovery_ratio(&zero), Err(Error::DegenerateTrace));
    }

    #[test]
    fn prime_versus_composite_recovery() {
        let r7 = recovery_ratio_refined(&sweep(7, GeodesicTarget::Dft, 101).unwrap()).unwrap();
        let r9 = recovery_ratio_refined(&sweep(9, GeodesicTarget::Dft, 101).unwrap()).unwrap();
        assert!(r7 >= 10.0, "{r7}");
        assert!(r9 <= 3.0, "{r9}");
        let grid7 = recovery_ratio(&sweep(7, GeodesicTarget::Dft, 101).unwrap()).unwrap();
        assert!(grid7 <= r7);
    }
}
