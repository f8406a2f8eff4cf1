//! File formats and command entry points.
//!
//! * annotation records: one JSON object per line (see [`crate::inject`])
//! * sequence records: [`record`]
//! * masks: plain PBM and JSON intervals, [`maskfile`]
//! * loss traces: `step,loss` rows, [`trace`]

pub mod cli;
pub mod corpus;
pub mod maskfile;
pub mod record;
pub mod trace;

pub use cli::{run, CliError};
pub use corpus::{corpus_stats, detect_format, load_record, CorpusStats, LoadedRecord, RecordFormat};
pub use maskfile::{parse_pbm, write_pbm, IntervalExport};
pub use record::{deserialize_sequence, serialize_sequence, EntryRecord, SequenceRecord};
pub use trace::{parse_trace, write_trace};
