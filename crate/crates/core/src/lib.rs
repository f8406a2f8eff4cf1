//! Interleaved multi-condition conditioning.
//!
//! Text spans, attribute tokens and reference-image patch blocks are laid out
//! in one sequence ([`sequence`]); annotated captions are turned into such
//! sequences by [`inject`]; [`mask`] builds the group-scoped attention mask
//! that stops an attribute token from attending to another group's image; and
//! [`toy`] is a small masked-attention denoiser used to check the mask's
//! effect numerically. [`io`] holds the file formats and command entry points
//! behind the `icond` binary.

pub mod error;
pub mod gen;
pub mod inject;
pub mod io;
pub mod mask;
pub mod sequence;
pub mod toy;
pub mod vocab;

pub use error::{AnnotationError, FormatError, MaskError, SequenceError, ToyError, VocabError};
pub use sequence::{
    assign_groups, build_sequence, validate, ImageBlock, InterleavedSequence, Segment, TokenEntry, TokenKind,
};
pub use vocab::{AttributeId, AttributeVocabulary};
