//! Turn an entity-annotated caption into an interleaved sequence.
//!
//!     cargo run --example inject_caption

use interleaved_cond::inject::{inject, parse_annotation, triage, Triage};
use interleaved_cond::io::serialize_sequence;
use interleaved_cond::AttributeVocabulary;

const RECORD: &str = r#"{"caption":"Make the man wear the blue jacket and stand beside the car.","entities":[{"span":[5,12],"attribute":"id","image":"portrait"},{"span":[18,33],"attribute":"clothing","image":"jacket"},{"span":[51,58],"attribute":"subject","image":"car"}],"images":[{"id":"portrait","patches":4,"role":"reference"},{"id":"jacket","patches":3,"role":"reference"},{"id":"car","patches":2,"role":"reference"},{"id":"out","patches":4,"role":"target"}],"task":"compositional"}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = AttributeVocabulary::default();
    let ann = parse_annotation(RECORD.as_bytes())?;
    for e in &ann.entities {
        println!("{:>2}..{:<2} {:<16} <{}> -> {}", e.span.start, e.span.end, &ann.caption[e.span.clone()], e.attribute, e.image_ref);
    }

    assert_eq!(triage(&ann, &vocab), Triage::Keep);
    let seq = inject(&ann, &vocab)?;
    println!();
    for seg in seq.to_segments(&vocab) {
        println!("  {seg:?}");
    }
    println!("\nm = {}, target = {:?}", seq.group_count, seq.target_ref);
    println!("{}", serialize_sequence(&seq, Some(ann.task_family), &vocab)?);
    Ok(())
}
