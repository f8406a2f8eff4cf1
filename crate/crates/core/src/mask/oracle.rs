use super::dense::MaskMatrix;
use crate::sequence::{InterleavedSequence, TokenKind};

/// Reference mask: each of the three predicates is evaluated per `(q, k)`
/// pair from the token fields alone (no image blocks, no interval or word
/// arithmetic), then combined cell by cell.
pub fn oracle_mask(seq: &InterleavedSequence) -> MaskMatrix {
    let len = seq.len();
    let mut out = MaskMatrix::zeros(len);
    for q in 0..len {
        for k in 0..len {
            let query = &seq.entries[q];
            let key = &seq.entries[k];

            let causal = k <= q;

            let same_image = query.kind == TokenKind::Image
                && key.kind == TokenKind::Image
                && query.image_id.is_some()
                && query.image_id == key.image_id;

            let group_blocked =
                query.kind == TokenKind::Special && key.kind == TokenKind::Image && query.group != key.group;

            let allowed = (causal && !group_blocked) || same_image;
            if allowed {
                out.set(q, k, true);
            }
        }
    }
    out
}
