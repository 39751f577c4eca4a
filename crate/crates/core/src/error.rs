use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("matrix is not square: expected {expected} entries, found {found}")]
    NotSquare { expected: usize, found: usize },
    #[error("oracle dimension exceeded: n = {n} > {max}")]
    OracleDimensionExceeded { n: usize, max: usize },
    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("division by two unavailable in this domain")]
    DivisionByTwoUnavailable,
    #[error("too many blocks: requested {requested}, only {available} subsets")]
    TooManyBlocks { requested: u64, available: u64 },
    #[error("block plan does not match the matrix: {0}")]
    PlanMismatch(String),
    #[error("no primitive {n}th root of unity modulo {p}")]
    NoNthRoot { p: u64, n: usize },
    #[error("too few primes = 1 (mod {n}) below 2^{width} to cover {needed_bits} bits")]
    InsufficientPrimes { n: usize, width: u32, needed_bits: u64 },
    #[error("witness set does not match the CRT basis")]
    BasisMismatch,
    #[error("residue modulo {prime} disagrees with the reconstructed value")]
    InconsistentResidue { prime: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("fit failed after {iterations} iterations (trace: {trace:?})")]
    FitFailed { iterations: usize, trace: Vec<f64> },
    #[error("collinear sample (phase uniformity KS p = {phase_ks_p})")]
    CollinearSample { phase_ks_p: f64 },
    #[error("ecf degenerate: |phi| = {modulus} at t = {t}")]
    EcfDegenerate { t: f64, modulus: f64 },
    #[error("degenerate quantiles")]
    DegenerateQuantiles,
    #[error("invalid stability index {0}")]
    InvalidStabilityIndex(f64),
    #[error("degenerate trace")]
    DegenerateTrace,
    #[error("format error: {0}")]
    Format(String),
}
