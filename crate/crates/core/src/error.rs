use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("vocabulary is empty")]
    Empty,
    #[error("vocabulary has {0} entries, more than the index type allows")]
    TooLarge(usize),
    #[error("invalid token name {0:?}: expected a non-empty lowercase identifier")]
    InvalidName(String),
    #[error("duplicate token name {0:?}")]
    Duplicate(String),
    #[error("extension entry {0:?} is not in the token list")]
    UnknownExtension(String),
    #[error("malformed vocabulary document: {0}")]
    Parse(String),
    #[error("cannot read vocabulary {0}: {1}")]
    Io(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("segment list is empty")]
    EmptySegments,
    #[error("attribute {0:?} is not in the vocabulary")]
    UnknownAttribute(String),
    #[error("image id {0:?} appears in more than one image block")]
    DuplicateImageId(String),
    #[error("image {0:?} has zero patches")]
    ZeroPatchCount(String),
    #[error("image id {0:?} is reserved for the target block")]
    ReservedImageId(String),
    #[error("special token binds to image {0:?}, which is not in the sequence")]
    UnknownBinding(String),
    #[error("special token at position {0} has no following image and no explicit group")]
    DanglingSpecialToken(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("malformed record at byte {offset}: {message}")]
    MalformedRecord { offset: usize, message: String },
    #[error("entity {entity} span [{start}, {end}) lies outside the {len}-byte caption")]
    SpanOutOfBounds { entity: usize, start: usize, end: usize, len: usize },
    #[error("entity {entity} references image {image:?}, which is not a listed reference image")]
    UnknownImageRef { entity: usize, image: String },
    #[error("entities {first} and {second} have overlapping spans")]
    OverlappingSpans { first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaskError {
    #[error("mask dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("malformed PBM: {0}")]
    Pbm(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ToyError {
    #[error("no raw patches supplied for image {0:?}")]
    MissingPatches(String),
    #[error("image {image:?} expects {expected} patches of width {width}, got {got}")]
    PatchCountMismatch { image: String, expected: usize, width: usize, got: usize },
    #[error("mask row {0} allows no positions")]
    EmptyRow(usize),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("loss diverged at step {step}: {loss}")]
    DivergedLoss { step: usize, loss: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: attribute {name:?} is not in the vocabulary")]
    UnknownAttribute { line: usize, name: String },
    #[error("line {line}: invalid sequence: {message}")]
    InvalidSequence { line: usize, message: String },
    #[error("line {line}: neither an annotation record nor a sequence record")]
    UnknownRecord { line: usize },
}
