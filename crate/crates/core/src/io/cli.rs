//! Command entry points behind the `icond` binary.
//!
//! Each `cmd_*` function does the work and returns a typed result; [`run`]
//! parses arguments, prints, and maps errors to exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O, parse or usage failure |
//! | 2 | `inject --strict` saw a discarded record |
//! | 3 | `probe` measured nonzero leakage |
//! | 4 | training loss diverged |

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use super::corpus::{corpus_stats, load_record, record_lines, CorpusStats, LoadedRecord};
use super::maskfile::{write_pbm, IntervalExport};
use super::record::serialize_sequence;
use super::trace::write_trace;
use crate::error::{FormatError, ToyError, VocabError};
use crate::inject::synth::{generate_corpus, SynthConfig};
use crate::inject::{inject_corpus, DiscardReason, InjectionReport};
use crate::mask::{build_mask, mask_rows};
use crate::sequence::InterleavedSequence;
use crate::toy::{conflict_benchmark, leakage_probe, train, LeakageProbe, MaskMode, ModelDims, RawPatches, ToyModelParams, TrainConfig};
use crate::vocab::AttributeVocabulary;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_STRICT_DISCARD: i32 = 2;
pub const EXIT_LEAKAGE: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;

/// Seeds randomized commands when `--seed` is not given.
pub const SEED_ENV: &str = "SIGMA_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("record index {index} out of range: corpus has {len} records")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown mask format {0:?}: expected pbm or json")]
    UnknownFormat(String),
    #[error("record {index} was discarded ({reason})")]
    Discarded { index: usize, reason: DiscardReason },
    #[error("invalid {SEED_ENV} value {0:?}")]
    SeedEnv(String),
    #[error("{0} record(s) discarded in strict mode")]
    StrictDiscard(usize),
    #[error("nonzero leakage {0:e}")]
    Leakage(f64),
    #[error(transparent)]
    Toy(#[from] ToyError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::StrictDiscard(_) => EXIT_STRICT_DISCARD,
            CliError::Leakage(_) => EXIT_LEAKAGE,
            CliError::Toy(ToyError::DivergedLoss { .. }) => EXIT_DIVERGED,
            _ => EXIT_FAILURE,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), message: e.to_string() })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io { path: path.into(), message: e.to_string() })
}

/// `--seed`, then `SIGMA_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::SeedEnv(v)),
        Err(_) => Ok(0),
    }
}

pub fn load_vocab(path: Option<&Path>) -> Result<AttributeVocabulary, CliError> {
    Ok(match path {
        Some(p) => AttributeVocabulary::load(p)?,
        None => AttributeVocabulary::default(),
    })
}

/// Sequence for the `index`-th non-blank line of `input`; annotation lines
/// are injected on the fly.
pub fn load_sequence(input: &Path, index: usize, vocab: &AttributeVocabulary) -> Result<InterleavedSequence, CliError> {
    let text = read(input)?;
    let lines: Vec<_> = record_lines(&text).collect();
    let &(line_no, line) = lines.get(index).ok_or(CliError::IndexOutOfRange { index, len: lines.len() })?;
    match load_record(line, line_no, vocab)? {
        LoadedRecord::Kept { sequence, .. } => Ok(sequence),
        LoadedRecord::Discarded(reason) => Err(CliError::Discarded { index, reason }),
    }
}

/// Injects every annotation line of `input` and writes kept sequences to
/// `output`, one per line. Discards are counted in the report, never fatal
/// here; `--strict` turns them into an exit code.
pub fn cmd_inject(input: &Path, output: &Path, vocab: &AttributeVocabulary) -> Result<InjectionReport, CliError> {
    let text = read(input)?;
    let (kept, report) = inject_corpus(record_lines(&text).map(|(_, l)| l.as_bytes()), vocab);
    let mut out = String::new();
    for rec in &kept {
        out.push_str(&serialize_sequence(&rec.sequence, Some(rec.task), vocab)?);
        out.push('\n');
    }
    write(output, &out)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskFormat {
    Pbm,
    Json,
}

impl std::str::FromStr for MaskFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pbm" => Ok(MaskFormat::Pbm),
            "json" => Ok(MaskFormat::Json),
            other => Err(CliError::UnknownFormat(other.to_string())),
        }
    }
}

/// Mask of one record as PBM text or JSON intervals.
pub fn cmd_mask(input: &Path, index: usize, format: MaskFormat, vocab: &AttributeVocabulary) -> Result<String, CliError> {
    let seq = load_sequence(input, index, vocab)?;
    Ok(match format {
        MaskFormat::Pbm => write_pbm(&build_mask(&seq)),
        MaskFormat::Json => IntervalExport::new(mask_rows(&seq)).to_json() + "\n",
    })
}

/// Single-layer leakage probe with seeded random weights and patches.
pub fn cmd_probe(input: &Path, index: usize, mask_enabled: bool, seed: u64, vocab: &AttributeVocabulary) -> Result<LeakageProbe, CliError> {
    let seq = load_sequence(input, index, vocab)?;
    let dims = ModelDims { d: 8, p: 4, attributes: vocab.len(), max_positions: seq.len(), layers: 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = ToyModelParams::random(&mut rng, dims);
    let raw: RawPatches = seq
        .image_blocks
        .iter()
        .map(|b| {
            let patches = (0..b.patch_count).map(|_| (0..dims.p).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
            (b.image_id.clone(), patches)
        })
        .collect();
    Ok(leakage_probe(&seq, &raw, &params, MaskMode::from_enabled(mask_enabled))?)
}

pub fn cmd_stats(input: &Path, vocab: &AttributeVocabulary) -> Result<CorpusStats, CliError> {
    Ok(corpus_stats(&read(input)?, vocab)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub trace: Vec<(usize, f64)>,
    /// `(masked, unmasked)` held-out MSE in conflict mode.
    pub mse: Option<(f64, f64)>,
}

/// Copy task by default; in conflict mode runs both mask settings and
/// returns the trace of the one selected by `config.mask_enabled`.
pub fn cmd_train(config: &TrainConfig) -> Result<TrainOutcome, CliError> {
    if config.conflict_mode {
        let r = conflict_benchmark(config)?;
        let trace = if config.mask_enabled { r.masked_trace } else { r.unmasked_trace };
        Ok(TrainOutcome { trace, mse: Some((r.masked_mse, r.unmasked_mse)) })
    } else {
        let trained = train(config, &AttributeVocabulary::default())?;
        Ok(TrainOutcome { trace: trained.trace, mse: None })
    }
}

#[derive(Debug, Parser)]
#[command(name = "icond", version, about = "Interleaved conditioning sequences, group-scoped masks and a toy attention harness")]
pub struct Cli {
    /// Vocabulary file (defaults to the bundled 14-token vocabulary).
    #[arg(long, global = true)]
    pub vocab: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn annotation records into sequence records.
    Inject {
        input: PathBuf,
        output: PathBuf,
        /// Exit 2 if any record is discarded.
        #[arg(long)]
        strict: bool,
    },
    /// Export the attention mask of one record.
    Mask {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// pbm or json
        #[arg(long, default_value = "pbm")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure special-token sensitivity to other groups' patches.
    Probe {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Drop the group constraint (debugging aid; expect exit 3).
        #[arg(long)]
        no_mask: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Summarise a corpus of annotation or sequence records.
    Stats { input: PathBuf },
    /// Train the toy denoiser and write its loss trace.
    Train {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        /// Attribute-conflict task; trains masked and unmasked models.
        #[arg(long)]
        conflict: bool,
        #[arg(long)]
        no_mask: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic annotation corpus.
    Synth {
        #[arg(long, default_value_t = 1000)]
        records: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), message: e.to_string() }),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let vocab = load_vocab(cli.vocab.as_deref())?;
    match cli.command {
        Command::Inject { input, output, strict } => {
            let report = cmd_inject(&input, &output, &vocab)?;
            let _ = writeln!(stderr, "{report}");
            if strict && report.discarded > 0 {
                return Err(CliError::StrictDiscard(report.discarded));
            }
        }
        Command::Mask { input, index, format, out } => {
            let format: MaskFormat = format.parse()?;
            emit(out.as_deref(), stdout, &cmd_mask(&input, index, format, &vocab)?)?;
        }
        Command::Probe { input, index, no_mask, seed } => {
            let probe = cmd_probe(&input, index, !no_mask, resolve_seed(seed)?, &vocab)?;
            let _ = writeln!(stdout, "leakage={} blocked_pairs={}", probe.max_abs, probe.blocked_pairs);
            if probe.max_abs != 0.0 {
                return Err(CliError::Leakage(probe.max_abs));
            }
        }
        Command::Stats { input } => {
            let _ = writeln!(stdout, "{}", cmd_stats(&input, &vocab)?.to_json());
        }
        Command::Train { seed, steps, lr, conflict, no_mask, out } => {
            let base = if conflict { TrainConfig::conflict() } else { TrainConfig::default() };
            let config = TrainConfig {
                seed: resolve_seed(seed)?,
                steps: steps.unwrap_or(base.steps),
                learning_rate: lr.unwrap_or(base.learning_rate),
                mask_enabled: !no_mask,
                ..base
            };
            let outcome = cmd_train(&config)?;
            emit(out.as_deref(), stdout, &write_trace(&outcome.trace))?;
            if let Some((masked, unmasked)) = outcome.mse {
                let _ = writeln!(stderr, "masked_mse={masked} unmasked_mse={unmasked}");
            }
        }
        Command::Synth { records, seed, out } => {
            let cfg = SynthConfig { records, seed: resolve_seed(seed)?, ..SynthConfig::default() };
            let text: String = generate_corpus(&cfg, &vocab).iter().map(|r| r.to_line() + "\n").collect();
            emit(out.as_deref(), stdout, &text)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs one command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not errors.
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_FAILURE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
