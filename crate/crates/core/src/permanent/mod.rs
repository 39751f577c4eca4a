//! Permanents via the defining sum, Ryser's formula and Glynn's formula.
//!
//! Ryser and Glynn both walk a reflected binary Gray code: index `b` visits
//! the subset (or sign pattern) `b ^ (b >> 1)`, and the bit toggled between
//! `b - 1` and `b` is the lowest set bit of `b`. The iteration range is split
//! into contiguous [`GrayBlock`]s; each block seeds its running sums directly
//! from its first code word and keeps a private Kahan accumulator, and the
//! partials are combined in block order, so the result never depends on how
//! many workers ran the blocks.

mod blocked;
mod kahan;
mod naive;

pub use blocked::{
    block_start_state, default_block_count, make_block_plan, perm, perm_abs_entrywise, perm_blocked, perm_glynn,
    perm_ryser, perm_with_plan, Algorithm, BlockPlan, GrayBlock, DEFAULT_BLOCK_COUNT, MAX_DIMENSION,
};
pub use kahan::KahanAccumulator;
pub use naive::{perm_naive, NAIVE_MAX_DIMENSION};

/// Reflected binary Gray code of `index`.
#[inline]
pub fn gray(index: u64) -> u64 {
    index ^ (index >> 1)
}
