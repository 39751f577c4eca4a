use super::{gray, KahanAccumulator};
use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::{CMatrix, Matrix, Scalar};

/// Subset indices are 64-bit, so `2^n` must fit.
pub const MAX_DIMENSION: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ryser,
    Glynn,
}

impl Algorithm {
    /// `m` such that the iteration runs over `[0, 2^m)`.
    pub fn exponent(self, n: usize) -> u32 {
        match self {
            Algorithm::Ryser => n as u32,
            Algorithm::Glynn => n.saturating_sub(1) as u32,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ryser => "ryser",
            Algorithm::Glynn => "glynn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayBlock {
    pub start: u64,
    pub length: u64,
}

impl GrayBlock {
    pub fn end(&self) -> u64 {
        self.start + self.length
    }
}

/// Contiguous, ordered cover of `[0, 2^m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPlan {
    pub n: usize,
    pub algorithm: Algorithm,
    pub blocks: Vec<GrayBlock>,
}

pub fn default_block_count(n: usize, algorithm: Algorithm, workers: usize) -> u64 {
    let available = 1u64 << algorithm.exponent(n);
    (64 * workers.max(1) as u64).min(available)
}

/// Splits `[0, 2^m)` into `block_count` contiguous blocks whose sizes differ
/// by at most one (the first `2^m mod block_count` blocks are one longer).
pub fn make_block_plan(n: usize, algorithm: Algorithm, block_count: u64) -> Result<BlockPlan> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if n > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge { n, max: MAX_DIMENSION });
    }
    let total = 1u64 << algorithm.exponent(n);
    if block_count == 0 {
        return Err(Error::InvalidParameter("block_count must be at least 1".into()));
    }
    if block_count > total {
        return Err(Error::TooManyBlocks { requested: block_count, available: total });
    }
    let base = total / block_count;
    let extra = total % block_count;
    let mut start = 0;
    let blocks = (0..block_count)
        .map(|k| {
            let length = base + u64::from(k < extra);
            let block = GrayBlock { start, length };
            start += length;
            block
        })
        .collect();
    Ok(BlockPlan { n, algorithm, blocks })
}

/// Running sums the sequential walk holds on reaching `block.start`.
///
/// Ryser: `r_i = sum_{j in S} a_ij` for the column subset `S = gray(start)`.
/// Glynn: `v_j = sum_i d_i a_ij` with `d_0 = +1` and `d_{k+1} = -1` iff bit `k`
/// of `gray(start)` is set.
pub fn block_start_state<S: Scalar>(m: &Matrix<S>, block: GrayBlock, algorithm: Algorithm) -> Vec<S> {
    let n = m.n();
    let code = gray(block.start);
    let zero = m.get(0, 0).zero_like();
    match algorithm {
        Algorithm::Ryser => (0..n)
            .map(|i| {
                let mut s = zero.clone();
                for j in (0..n).filter(|&j| code >> j & 1 == 1) {
                    s = s + m.get(i, j).clone();
                }
                s
            })
            .collect(),
        Algorithm::Glynn => (0..n)
            .map(|j| {
                let mut s = m.get(0, j).clone();
                for i in 1..n {
                    if code >> (i - 1) & 1 == 1 {
                        s = s - m.get(i, j).clone();
                    } else {
                        s = s + m.get(i, j).clone();
                    }
                }
                s
            })
            .collect(),
    }
}

#[inline]
fn product<S: Scalar>(values: &[S]) -> S {
    let mut p = values[0].clone();
    for v in &values[1..] {
        p = p * v.clone();
    }
    p
}

fn ryser_block<S: Scalar>(m: &Matrix<S>, block: GrayBlock) -> KahanAccumulator<S> {
    let n = m.n();
    let mut rows = block_start_state(m, block, Algorithm::Ryser);
    let mut code = gray(block.start);
    // Sign (-1)^(n - |S|), tracked as a parity flag.
    let mut negative = (n as u32 - code.count_ones()) % 2 == 1;
    let mut acc = KahanAccumulator::new(rows[0].zero_like());
    let signed = |p: S, negative: bool| if negative { -p } else { p };
    acc.add(signed(product(&rows), negative));
    let columns: Vec<Vec<S>> = (0..n).map(|j| (0..n).map(|i| m.get(i, j).clone()).collect()).collect();
    for b in block.start + 1..block.end() {
        let j = b.trailing_zeros() as usize;
        let bit = 1u64 << j;
        let column = &columns[j];
        if code & bit == 0 {
            for (r, c) in rows.iter_mut().zip(column) {
                *r = r.clone() + c.clone();
            }
        } else {
            for (r, c) in rows.iter_mut().zip(column) {
                *r = r.clone() - c.clone();
            }
        }
        code ^= bit;
        negative = !negative;
        acc.add(signed(product(&rows), negative));
    }
    acc
}

fn glynn_block<S: Scalar>(m: &Matrix<S>, block: GrayBlock) -> KahanAccumulator<S> {
    let n = m.n();
    let mut sums = block_start_state(m, block, Algorithm::Glynn);
    let mut code = gray(block.start);
    let mut negative = code.count_ones() % 2 == 1;
    let doubled: Vec<Vec<S>> = (0..n).map(|i| m.row(i).iter().map(|a| a.clone() + a.clone()).collect()).collect();
    let mut acc = KahanAccumulator::new(sums[0].zero_like());
    let signed = |p: S, negative: bool| if negative { -p } else { p };
    acc.add(signed(product(&sums), negative));
    for b in block.start + 1..block.end() {
        let k = b.trailing_zeros() as usize;
        let bit = 1u64 << k;
        let row = &doubled[k + 1];
        if code & bit == 0 {
            for (s, a) in sums.iter_mut().zip(row) {
                *s = s.clone() - a.clone();
            }
        } else {
            for (s, a) in sums.iter_mut().zip(row) {
                *s = s.clone() + a.clone();
            }
        }
        code ^= bit;
        negative = !negative;
        acc.add(signed(product(&sums), negative));
    }
    acc
}

fn run_block<S: Scalar>(m: &Matrix<S>, block: GrayBlock, algorithm: Algorithm) -> S {
    match algorithm {
        Algorithm::Ryser => ryser_block(m, block).total(),
        Algorithm::Glynn => glynn_block(m, block).total(),
    }
}

fn check_plan<S>(m: &Matrix<S>, plan: &BlockPlan) -> Result<()> {
    if plan.n != m.n() {
        return Err(Error::PlanMismatch(format!("plan for n = {}, matrix has n = {}", plan.n, m.n())));
    }
    let total = 1u64 << plan.algorithm.exponent(plan.n);
    let mut next = 0;
    for b in &plan.blocks {
        if b.start != next || b.length == 0 {
            return Err(Error::PlanMismatch("blocks are not contiguous".into()));
        }
        next = b.end();
    }
    if next != total {
        return Err(Error::PlanMismatch("blocks do not cover the iteration range".into()));
    }
    Ok(())
}

fn combine<S: Scalar>(partials: Vec<S>, n: usize, algorithm: Algorithm) -> Result<S> {
    let mut iter = partials.into_iter();
    let mut acc = KahanAccumulator::starting_at(iter.next().expect("at least one block"));
    for p in iter {
        acc.add(p);
    }
    let total = acc.total();
    match algorithm {
        Algorithm::Ryser => Ok(total),
        Algorithm::Glynn => total.scale_by_inv_pow2(n as u32 - 1).ok_or(Error::DivisionByTwoUnavailable),
    }
}

fn check_glynn_domain<S: Scalar>(m: &Matrix<S>, algorithm: Algorithm) -> Result<()> {
    if algorithm == Algorithm::Glynn && m.get(0, 0).one_like().scale_by_inv_pow2(1).is_none() {
        return Err(Error::DivisionByTwoUnavailable);
    }
    Ok(())
}

/// Runs `plan` on the current worker pool. Blocks execute in any order but
/// their partial sums are combined in ascending block order.
pub fn perm_with_plan<S: Scalar>(m: &Matrix<S>, plan: &BlockPlan) -> Result<S> {
    check_plan(m, plan)?;
    check_glynn_domain(m, plan.algorithm)?;
    let partials = exec::map_slice(&plan.blocks, |&b| run_block(m, b, plan.algorithm));
    combine(partials, m.n(), plan.algorithm)
}

/// [`perm_with_plan`] on a dedicated pool of `worker_count` threads. The
/// result is bit-identical for every worker count.
pub fn perm_blocked<S: Scalar>(m: &Matrix<S>, plan: &BlockPlan, worker_count: usize) -> Result<S> {
    exec::with_workers(worker_count, || perm_with_plan(m, plan))
}

fn single_block<S: Scalar>(m: &Matrix<S>, algorithm: Algorithm) -> Result<S> {
    let n = m.n();
    if n > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge { n, max: MAX_DIMENSION });
    }
    check_glynn_domain(m, algorithm)?;
    let block = GrayBlock { start: 0, length: 1u64 << algorithm.exponent(n) };
    combine(vec![run_block(m, block, algorithm)], n, algorithm)
}

/// Ryser's inclusion-exclusion formula,
/// `perm(A) = sum_S (-1)^(n-|S|) prod_i sum_{j in S} a_ij`,
/// walked sequentially in Gray-code order.
pub fn perm_ryser<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    single_block(m, Algorithm::Ryser)
}

/// Glynn's formula over sign vectors with `d_0 = +1`, walked sequentially.
/// Needs 2 to be invertible in the domain.
pub fn perm_glynn<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    single_block(m, Algorithm::Glynn)
}

/// Block count used by [`perm`]. Fixed rather than derived from the pool size
/// so that results do not depend on the number of threads.
pub const DEFAULT_BLOCK_COUNT: u64 = 512;

/// Permanent with the default plan.
pub fn perm<S: Scalar>(m: &Matrix<S>, algorithm: Algorithm) -> Result<S> {
    let n = m.n();
    if n > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge { n, max: MAX_DIMENSION });
    }
    // Small problems are cheaper without the split.
    if algorithm.exponent(n) <= 12 {
        return single_block(m, algorithm);
    }
    let blocks = DEFAULT_BLOCK_COUNT.min(1u64 << algorithm.exponent(n));
    let plan = make_block_plan(n, algorithm, blocks)?;
    perm_with_plan(m, &plan)
}

/// Permanent of the entrywise magnitudes `(|m_ij|)`.
pub fn perm_abs_entrywise(m: &CMatrix) -> Result<f64> {
    const MAX: usize = 25;
    if m.n() > MAX {
        return Err(Error::DimensionTooLarge { n: m.n(), max: MAX });
    }
    perm(&m.map(|z| z.norm()), Algorithm::Ryser)
}
