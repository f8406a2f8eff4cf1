use std::fmt;

use crate::error::MaskError;
use crate::sequence::InterleavedSequence;

const WORD: usize = 64;

/// Square binary matrix, row-major, one bit per cell (1 = attention allowed).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MaskMatrix {
    dim: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl MaskMatrix {
    pub fn zeros(dim: usize) -> Self {
        let words_per_row = dim.div_ceil(WORD);
        Self { dim, words_per_row, bits: vec![0; dim * words_per_row] }
    }

    pub fn ones(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for q in 0..dim {
            m.fill_row(q, 0, dim);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(dim);
        for q in 0..dim {
            for k in 0..dim {
                if f(q, k) {
                    m.set(q, k, true);
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, q: usize, k: usize) -> bool {
        assert!(q < self.dim && k < self.dim, "({q}, {k}) out of range for {0}x{0}", self.dim);
        let w = self.bits[q * self.words_per_row + k / WORD];
        (w >> (k % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, k: usize, value: bool) {
        assert!(q < self.dim && k < self.dim, "({q}, {k}) out of range for {0}x{0}", self.dim);
        let w = &mut self.bits[q * self.words_per_row + k / WORD];
        let bit = 1u64 << (k % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    /// Sets bits `[start, end)` of row `q`.
    pub fn fill_row(&mut self, q: usize, start: usize, end: usize) {
        self.write_range(q, start, end, true);
    }

    pub fn clear_row_range(&mut self, q: usize, start: usize, end: usize) {
        self.write_range(q, start, end, false);
    }

    fn write_range(&mut self, q: usize, start: usize, end: usize, value: bool) {
        assert!(start <= end && end <= self.dim);
        let row = &mut self.bits[q * self.words_per_row..(q + 1) * self.words_per_row];
        let mut k = start;
        while k < end {
            let word = k / WORD;
            let lo = k % WORD;
            let hi = (end - word * WORD).min(WORD);
            let span = if hi - lo == WORD { u64::MAX } else { ((1u64 << (hi - lo)) - 1) << lo };
            if value {
                row[word] |= span;
            } else {
                row[word] &= !span;
            }
            k = (word + 1) * WORD;
        }
    }

    pub fn row(&self, q: usize) -> impl Iterator<Item = bool> + '_ {
        (0..self.dim).map(move |k| self.get(q, k))
    }

    pub fn row_count(&self, q: usize) -> usize {
        self.bits[q * self.words_per_row..(q + 1) * self.words_per_row]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Rows with no allowed position.
    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.dim).filter(|&q| self.row_count(q) == 0).collect()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self, MaskError> {
        if self.dim != other.dim {
            return Err(MaskError::DimensionMismatch(self.dim, other.dim));
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| op(*a, *b)).collect();
        Ok(Self { dim: self.dim, words_per_row: self.words_per_row, bits })
    }

    pub fn and(&self, other: &Self) -> Result<Self, MaskError> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self, MaskError> {
        self.zip_with(other, |a, b| a | b)
    }
}

impl fmt::Debug for MaskMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MaskMatrix({0}x{0})", self.dim)?;
        for q in 0..self.dim {
            let row: String = self.row(q).map(|b| if b { '1' } else { '0' }).collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

pub fn causal_mask(len: usize) -> MaskMatrix {
    let mut m = MaskMatrix::zeros(len);
    for q in 0..len {
        m.fill_row(q, 0, q + 1);
    }
    m
}

pub fn intra_image_mask(seq: &InterleavedSequence) -> MaskMatrix {
    let mut m = MaskMatrix::zeros(seq.len());
    for block in &seq.image_blocks {
        for q in block.positions() {
            m.fill_row(q, block.start, block.end());
        }
    }
    m
}

pub fn group_constraint_mask(seq: &InterleavedSequence) -> MaskMatrix {
    let mut m = MaskMatrix::ones(seq.len());
    for q in seq.special_positions() {
        let group = seq.group(q);
        for block in seq.image_blocks.iter().filter(|b| Some(b.group) != group) {
            m.clear_row_range(q, block.start, block.end());
        }
    }
    m
}

/// `(C ∧ M) ∨ S`, elementwise.
pub fn compose(causal: &MaskMatrix, intra: &MaskMatrix, group: &MaskMatrix) -> Result<MaskMatrix, MaskError> {
    causal.and(group)?.or(intra)
}

pub fn build_mask(seq: &InterleavedSequence) -> MaskMatrix {
    let b = compose(&causal_mask(seq.len()), &intra_image_mask(seq), &group_constraint_mask(seq))
        .expect("component masks share the sequence length");
    debug_assert!(b.empty_rows().is_empty(), "diagonal is always allowed");
    b
}
