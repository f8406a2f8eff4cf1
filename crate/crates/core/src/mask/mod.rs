//! Group-scoped attention masks.
//!
//! The allowed-attention matrix is `B = (C ∧ M) ∨ S` where `C` is the causal
//! mask, `S` grants bidirectional attention between patches of the same image
//! and `M` blocks special-token queries from image keys of another group.
//! Three independent routes produce `B`:
//!
//! * [`build_mask`] composes dense `C`, `S`, `M` with word-level bit ops,
//! * [`mask_rows`] streams each row as a short list of allowed intervals,
//! * [`oracle_mask`] evaluates the per-pair predicates straight from token
//!   fields.
//!
//! They must agree bit-for-bit.

mod bias;
mod dense;
mod oracle;
mod rows;

pub use bias::{masked_softmax, BiasValue, LogitBias};
pub use dense::{build_mask, causal_mask, compose, group_constraint_mask, intra_image_mask, MaskMatrix};
pub use oracle::oracle_mask;
pub use rows::{mask_rows, materialize, Interval, MaskRowSpec};

use crate::sequence::InterleavedSequence;

/// `(special query, image key)` pairs whose groups differ, i.e. the cells the
/// group constraint clears.
pub fn cross_group_pairs(seq: &InterleavedSequence) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for q in seq.special_positions() {
        let group = seq.group(q);
        for block in &seq.image_blocks {
            if Some(block.group) != group {
                out.extend(block.positions().map(|k| (q, k)));
            }
        }
    }
    out
}
