use serde::{Deserialize, Serialize};

use super::dense::MaskMatrix;
use crate::sequence::{InterleavedSequence, TokenKind};

/// Half-open position range `[start, end)`. Serialized as `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.start <= pos && pos < self.end
    }
}

impl From<[usize; 2]> for Interval {
    fn from([start, end]: [usize; 2]) -> Self {
        Self { start, end }
    }
}

impl From<Interval> for [usize; 2] {
    fn from(iv: Interval) -> Self {
        [iv.start, iv.end]
    }
}

/// Allowed key positions of one query row as sorted, disjoint, non-adjacent
/// intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRowSpec {
    pub row: usize,
    pub allowed: Vec<Interval>,
}

impl MaskRowSpec {
    pub fn allows(&self, k: usize) -> bool {
        let idx = self.allowed.partition_point(|iv| iv.end <= k);
        self.allowed.get(idx).is_some_and(|iv| iv.contains(k))
    }

    pub fn allowed_count(&self) -> usize {
        self.allowed.iter().map(Interval::len).sum()
    }
}

/// Streams the mask row by row.
///
/// A non-special query gets the causal prefix, plus its own image block when
/// it is a patch. A special query gets the causal prefix with every
/// other-group image block cut out.
pub fn mask_rows(seq: &InterleavedSequence) -> Vec<MaskRowSpec> {
    (0..seq.len()).map(|q| row_spec(seq, q)).collect()
}

fn row_spec(seq: &InterleavedSequence, q: usize) -> MaskRowSpec {
    let prefix = Interval::new(0, q + 1);
    let allowed = match seq.kind(q) {
        TokenKind::Special => {
            let group = seq.group(q);
            let mut out = Vec::new();
            let mut cursor = 0;
            for block in seq.image_blocks.iter().filter(|b| b.start <= q && Some(b.group) != group) {
                if block.start > cursor {
                    out.push(Interval::new(cursor, block.start));
                }
                cursor = cursor.max(block.end());
            }
            if cursor <= q {
                out.push(Interval::new(cursor, q + 1));
            }
            out
        }
        TokenKind::Image => match seq.block_at(q) {
            Some(block) => union(prefix, Interval::new(block.start, block.end())),
            None => vec![prefix],
        },
        TokenKind::Text | TokenKind::Plain => vec![prefix],
    };
    MaskRowSpec { row: q, allowed }
}

fn union(a: Interval, b: Interval) -> Vec<Interval> {
    let (first, second) = if a.start <= b.start { (a, b) } else { (b, a) };
    if second.start <= first.end {
        vec![Interval::new(first.start, first.end.max(second.end))]
    } else {
        vec![first, second]
    }
}

pub fn materialize(rows: &[MaskRowSpec], dim: usize) -> MaskMatrix {
    let mut m = MaskMatrix::zeros(dim);
    for spec in rows {
        for iv in &spec.allowed {
            m.fill_row(spec.row, iv.start, iv.end);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{build_sequence, Segment};
    use crate::vocab::AttributeVocabulary;

    #[test]
    fn text_only_row_is_causal_prefix() {
        let segs: Vec<_> = (0..5).map(|i| Segment::plain(format!("w{i}"))).collect();
        let seq = build_sequence(&segs, &AttributeVocabulary::default()).unwrap();
        assert_eq!(mask_rows(&seq)[2].allowed, vec![Interval::new(0, 3)]);
    }

    #[test]
    fn membership_query() {
        let spec = MaskRowSpec { row: 5, allowed: vec![Interval::new(0, 3), Interval::new(5, 6)] };
        let allowed: Vec<usize> = (0..9).filter(|&k| spec.allows(k)).collect();
        assert_eq!(allowed, vec![0, 1, 2, 5]);
        assert_eq!(spec.allowed_count(), 4);
    }

    #[test]
    fn interval_serializes_as_pair() {
        assert_eq!(serde_json::to_string(&Interval::new(0, 3)).unwrap(), "[0,3]");
    }
}
