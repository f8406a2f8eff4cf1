//! Write a mask as plain PBM and as JSON intervals, then read both back.
//!
//!     cargo run --example export_mask [out_dir]

use std::path::PathBuf;

use interleaved_cond::inject::synth::{generate_corpus, SynthConfig};
use interleaved_cond::inject::inject;
use interleaved_cond::io::{parse_pbm, write_pbm, IntervalExport};
use interleaved_cond::mask::{build_mask, mask_rows};
use interleaved_cond::AttributeVocabulary;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let vocab = AttributeVocabulary::default();
    let record = generate_corpus(&SynthConfig { records: 1, seed: 4, ..Default::default() }, &vocab).remove(0);
    let seq = inject(&record, &vocab)?;
    println!("{}", record.caption);

    let mask = build_mask(&seq);
    let pbm_path = out_dir.join("mask.pbm");
    std::fs::write(&pbm_path, write_pbm(&mask))?;
    let json_path = out_dir.join("mask.json");
    std::fs::write(&json_path, IntervalExport::new(mask_rows(&seq)).to_json())?;

    let from_pbm = parse_pbm(&std::fs::read_to_string(&pbm_path)?)?;
    let from_json = IntervalExport::from_json(&std::fs::read_to_string(&json_path)?)?.materialize();
    assert_eq!(from_pbm, mask);
    assert_eq!(from_json, mask);
    println!("{}x{} mask, {} allowed cells", mask.dim(), mask.dim(), mask.count_ones());
    println!("wrote {} and {}", pbm_path.display(), json_path.display());
    Ok(())
}
