use std::collections::BTreeMap;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use permlab_core::ensembles::{sample_permanents, EnsembleKind, EnsembleSpec, RngStream};
use permlab_core::geodesic::{sweep, GeodesicTarget};
use permlab_core::matrix::{read_matrix_file, MatrixFile};
use permlab_core::modular::solve_schur;
use permlab_core::permanent::{perm_glynn, perm_naive, perm_ryser, Algorithm};
use permlab_core::stats::{
    ad_normality, anticoncentration_curve, complex_gaussian_battery, dagostino, ecf_alpha, fit_rayleigh, fit_weibull,
    haar_second_moment, mcculloch_alpha, moments, squared_amplitude_exponential_check, stable_ks, Provenance,
    SampleSet,
};
use permlab_core::{Error, Matrix, Scalar};
use serde_json::{json, Value};

use crate::formats::{self, RunManifest};
use crate::{CliError, Domain, Method, StatTest};

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(CliError::usage(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn parameters(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn run_method<S: Scalar>(m: &Matrix<S>, method: Method) -> Result<S, Error> {
    match method {
        Method::Naive => perm_naive(m),
        Method::Ryser => perm_ryser(m),
        Method::Glynn => perm_glynn(m),
    }
}

fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() && z.im != 0.0 { '-' } else { '+' };
    format!("{} {sign} {}i", z.re, z.im.abs())
}

fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn to_rational(file: &MatrixFile) -> Result<Matrix<BigRational>, CliError> {
    let exact = |x: f64| {
        BigRational::from_float(x).ok_or_else(|| CliError::usage(format!("entry {x} has no exact rational value")))
    };
    let entries = match file {
        MatrixFile::Integer(m) => m.entries().iter().map(|&x| Ok(BigRational::from_integer(x.into()))).collect(),
        MatrixFile::Real(m) => m.entries().iter().map(|&x| exact(x)).collect(),
        MatrixFile::Complex(m) => m
            .entries()
            .iter()
            .map(|z| if z.im == 0.0 { exact(z.re) } else { Err(CliError::usage("complex entry in a rational run")) })
            .collect::<Result<Vec<_>, _>>(),
    }?;
    Ok(Matrix::from_vec(file.n(), entries)?)
}

fn to_real(file: &MatrixFile) -> Result<Matrix<f64>, CliError> {
    match file {
        MatrixFile::Real(m) => Ok(m.clone()),
        MatrixFile::Integer(m) => Ok(m.map(|&x| x as f64)),
        MatrixFile::Complex(m) => {
            if m.entries().iter().any(|z| z.im != 0.0) {
                return Err(CliError::usage("complex entry in a real run"));
            }
            Ok(m.map(|z| z.re))
        }
    }
}

/// Integer files default to exact arithmetic, other files keep their domain.
pub fn cmd_perm(file: &Path, method: Method, domain: Domain) -> Result<(), CliError> {
    let m = read_matrix_file(file)?;
    let domain = match (domain, &m) {
        (Domain::Auto, MatrixFile::Integer(_)) => Domain::Rational,
        (Domain::Auto, MatrixFile::Real(_)) => Domain::Real,
        (Domain::Auto, MatrixFile::Complex(_)) => Domain::Complex,
        (d, _) => d,
    };
    let start = Instant::now();
    let text = match domain {
        Domain::Complex => format_complex(run_method(&m.to_complex(), method)?),
        Domain::Real => run_method(&to_real(&m)?, method)?.to_string(),
        Domain::Rational => format_rational(&run_method(&to_rational(&m)?, method)?),
        Domain::Auto => unreachable!("resolved above"),
    };
    emit(&text)?;
    eprintln!("elapsed {:.6} s", start.elapsed().as_secs_f64());
    Ok(())
}

pub fn cmd_schur(n: usize, prime_bits: u32, out: Option<&Path>) -> Result<(), CliError> {
    let start = Instant::now();
    let run = solve_schur(n, prime_bits)?;
    let elapsed = start.elapsed().as_secs_f64();
    emit(&run.value.to_string())?;
    if let Some(out) = out {
        let report = json!({
            "schema": formats::SCHUR_SCHEMA,
            "n": n,
            "prime_bits": prime_bits,
            "primes": run.basis.primes,
            "roots": run.witnesses.iter().map(|w| w.root).collect::<Vec<_>>(),
            "residues": run.witnesses.iter().map(|w| w.residue).collect::<Vec<_>>(),
            "check": run.check,
            "value": run.value.to_string(),
            "elapsed_seconds": elapsed,
            "tool_version": formats::tool_version(),
        });
        formats::write_json(out, &report)?;
    }
    Ok(())
}

fn data_name(out: &Path) -> String {
    out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn cmd_sample(
    kind: EnsembleKind,
    n: usize,
    count: usize,
    seed: u64,
    method: Method,
    out: &Path,
) -> Result<(), CliError> {
    let algorithm = match method {
        Method::Ryser => Algorithm::Ryser,
        Method::Glynn => Algorithm::Glynn,
        Method::Naive => return Err(CliError::usage("sampling supports --method ryser or glynn")),
    };
    let spec = EnsembleSpec::new(kind, n, count, seed)?;
    let started = formats::timestamp();
    let values = sample_permanents(&spec, algorithm)?;
    formats::write_samples(out, &values)?;
    let manifest = RunManifest {
        schema: formats::SAMPLES_SCHEMA.into(),
        command: "sample".into(),
        data: data_name(out),
        parameters: parameters(&[("ensemble", json!(kind.name())), ("n", json!(n)), ("count", json!(count))]),
        seed: Some(seed),
        engine: algorithm.name().into(),
        tool_version: formats::tool_version(),
        started,
        finished: formats::timestamp(),
    };
    formats::write_manifest(out, &manifest)
}

pub fn cmd_geodesic(target: GeodesicTarget, n: usize, steps: usize, out: &Path) -> Result<(), CliError> {
    let started = formats::timestamp();
    let trace = sweep(n, target, steps)?;
    formats::write_trace(out, &trace)?;
    let manifest = RunManifest {
        schema: formats::TRACE_SCHEMA.into(),
        command: "geodesic".into(),
        data: data_name(out),
        parameters: parameters(&[("target", json!(target.name())), ("n", json!(n)), ("steps", json!(steps))]),
        seed: None,
        engine: Algorithm::Ryser.name().into(),
        tool_version: formats::tool_version(),
        started,
        finished: formats::timestamp(),
    };
    formats::write_manifest(out, &manifest)
}

fn provenance(manifest: &RunManifest) -> Result<Provenance, CliError> {
    let n = manifest.parameter_u64("n")? as usize;
    match manifest.schema.as_str() {
        formats::SAMPLES_SCHEMA => {
            let kind: EnsembleKind = manifest.parameter_str("ensemble")?.parse()?;
            let count = manifest.parameter_u64("count")? as usize;
            let seed = manifest.seed.ok_or_else(|| CliError::usage("sample manifest lacks a seed"))?;
            Ok(Provenance::Ensemble(EnsembleSpec::new(kind, n, count, seed)?))
        }
        formats::TRACE_SCHEMA => {
            let target: GeodesicTarget = manifest.parameter_str("target")?.parse()?;
            let steps = manifest.parameter_u64("steps")? as usize;
            Ok(Provenance::Trace { n, target, steps })
        }
        other => Err(CliError::usage(format!("unsupported manifest schema {other:?}"))),
    }
}

fn to_value<T: serde::Serialize>(x: T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

/// Reference second moment for anti-concentration: `n!/n^n` for the Haar
/// ensembles, `n!` for the Gaussian ones.
fn reference_moment(provenance: &Provenance, n: usize) -> Result<f64, Error> {
    match provenance {
        Provenance::Ensemble(spec) if matches!(spec.kind, EnsembleKind::HaarU | EnsembleKind::HaarO) => {
            haar_second_moment(n)
        }
        _ => Ok((1..=n).map(|k| k as f64).product()),
    }
}

fn run_test(test: StatTest, set: &SampleSet, n: usize, seed: u64) -> Result<Value, Error> {
    let values = &set.values;
    match test {
        StatTest::Moments => {
            // A constant component, e.g. the imaginary part of a real
            // ensemble, is reported rather than failing the whole test.
            let component = |xs: Vec<f64>| match moments(&xs) {
                Ok(m) => Ok(to_value(m)),
                Err(Error::DegenerateSample(why)) => Ok(json!({ "degenerate": why })),
                Err(e) => Err(e),
            };
            Ok(json!({
                "re": component(set.real_parts())?,
                "im": component(values.iter().map(|z| z.im).collect())?,
                "abs": component(set.magnitudes())?,
            }))
        }
        StatTest::Rayleigh => {
            let mags = set.magnitudes();
            Ok(json!({ "rayleigh": to_value(fit_rayleigh(&mags)?), "weibull": to_value(fit_weibull(&mags)?) }))
        }
        StatTest::Exponential => {
            let sigma2 = set.squared_magnitudes().iter().sum::<f64>() / values.len() as f64;
            Ok(json!({ "sigma2": sigma2, "fit": to_value(squared_amplitude_exponential_check(values, sigma2)?) }))
        }
        StatTest::Gaussian => {
            let mut rng = RngStream::new(seed, u64::MAX);
            match complex_gaussian_battery(values, &mut rng) {
                Ok(b) => Ok(to_value(b)),
                Err(Error::CollinearSample { phase_ks_p }) => Ok(json!({ "collinear": true, "phase_ks_p": phase_ks_p })),
                Err(e) => Err(e),
            }
        }
        StatTest::Stable => {
            let xs = set.real_parts();
            let ecf = ecf_alpha(&xs)?;
            let mcc = mcculloch_alpha(&xs)?;
            Ok(json!({
                "ecf": to_value(ecf),
                "mcculloch": to_value(mcc),
                "alpha_difference": (ecf.alpha - mcc.alpha).abs(),
                "ks_ecf": to_value(stable_ks(&xs, &ecf)?),
                "ks_mcculloch": to_value(stable_ks(&xs, &mcc)?),
            }))
        }
        StatTest::Lognormal => {
            let logs: Vec<f64> = values.iter().map(|z| z.norm()).filter(|&r| r > 0.0).map(f64::ln).collect();
            Ok(json!({
                "used": logs.len(),
                "moments": to_value(moments(&logs)?),
                "anderson_darling": to_value(ad_normality(&logs)?),
                "dagostino": to_value(dagostino(&logs)?),
            }))
        }
        StatTest::Anticoncentration => {
            let e_ref = reference_moment(&set.provenance, n)?;
            let ks = [0.0, 1.0, 2.0, 3.0];
            let curve = anticoncentration_curve(&set.squared_magnitudes(), e_ref, n, &ks)?;
            Ok(json!({ "e_ref": e_ref, "k": ks, "probability": curve }))
        }
    }
}

/// Runs every requested test. Failures are recorded in the report and turn
/// into a numeric-failure exit once the report is written.
pub fn cmd_stats(input: &Path, tests: &[StatTest], out: Option<&PathBuf>) -> Result<(), CliError> {
    if tests.is_empty() {
        return Err(CliError::usage("no tests requested"));
    }
    let manifest = formats::read_manifest(input)?;
    let provenance = provenance(&manifest)?;
    let n = manifest.parameter_u64("n")? as usize;
    let values = formats::read_values(input)?;
    let set = SampleSet::new(values, provenance)?;
    let started = formats::timestamp();
    let mut results = serde_json::Map::new();
    let mut failures = Vec::new();
    for &test in tests {
        let entry = match run_test(test, &set, n, manifest.seed.unwrap_or(0)) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{}: {e}", test.name()));
                json!({ "error": e.to_string() })
            }
        };
        results.insert(test.name().to_string(), entry);
    }
    let report = json!({
        "schema": formats::REPORT_SCHEMA,
        "input": input.display().to_string(),
        "manifest": to_value(&manifest),
        "provenance": to_value(&set.provenance),
        "count": set.values.len(),
        "tests": results,
        "tool_version": formats::tool_version(),
        "started": started,
        "finished": formats::timestamp(),
    });
    match out {
        Some(path) => formats::write_json(path, &report)?,
        None => emit(&serde_json::to_string_pretty(&report).expect("report serializes"))?,
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::numeric(failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex64::new(1.0, 0.0)), "1 + 0i");
        assert_eq!(format_complex(Complex64::new(1.0, -0.0)), "1 + 0i");
        assert_eq!(format_complex(Complex64::new(-0.5, -2.0)), "-0.5 - 2i");
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&BigRational::from_integer((-3).into())), "-3");
        assert_eq!(format_rational(&BigRational::new(1.into(), 2.into())), "1/2");
    }
}
