//! Generate a synthetic annotation corpus with fixed family proportions, run
//! it through injection, and summarise it.
//!
//!     cargo run --example corpus_stats [records]

use interleaved_cond::inject::synth::{apportion, generate_corpus, SynthConfig, REFERENCE_FAMILY_WEIGHTS};
use interleaved_cond::inject::{inject_corpus, TaskFamily};
use interleaved_cond::io::{corpus_stats, serialize_sequence};
use interleaved_cond::AttributeVocabulary;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let vocab = AttributeVocabulary::default();
    let corpus = generate_corpus(&SynthConfig { records, ..Default::default() }, &vocab);
    let lines: Vec<String> = corpus.iter().map(|r| r.to_line()).collect();

    let (kept, report) = inject_corpus(&lines, &vocab);
    println!("{report}");
    let sequences = kept
        .iter()
        .map(|r| serialize_sequence(&r.sequence, Some(r.task), &vocab))
        .collect::<Result<Vec<_>, _>>()?
        .join("\n");

    let stats = corpus_stats(&sequences, &vocab)?;
    let expected = apportion(records, &REFERENCE_FAMILY_WEIGHTS);
    for (family, n) in TaskFamily::ALL.iter().zip(expected) {
        println!("{:<18} {:>6} (configured {n})", family.as_str(), stats.family_count(*family));
    }
    println!("{}", stats.to_json());
    Ok(())
}
