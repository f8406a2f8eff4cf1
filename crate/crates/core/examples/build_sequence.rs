//! Lay out text, attribute tokens and image blocks in one sequence and look
//! at the groups the builder assigns.
//!
//!     cargo run --example build_sequence

use interleaved_cond::{build_sequence, validate, AttributeVocabulary, Segment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = AttributeVocabulary::default();
    let segments = [
        Segment::plain("Put"),
        Segment::special("id"),
        Segment::text("this person"),
        Segment::image("portrait", 2),
        Segment::special("style"),
        Segment::special("lighting"),
        Segment::text("in this painting"),
        Segment::image("painting", 3),
    ];
    let seq = build_sequence(&segments, &vocab)?;

    println!("L = {}, m = {}", seq.len(), seq.group_count);
    for (pos, e) in seq.entries.iter().enumerate() {
        let detail = match (e.attribute, &e.image_id, e.text_payload()) {
            (Some(a), _, _) => format!("<{}>", vocab.name(a).unwrap_or("?")),
            (_, Some(id), _) => id.to_string(),
            (_, _, Some(t)) => format!("{t:?}"),
            _ => String::new(),
        };
        let group = e.group.map(|g| g.to_string()).unwrap_or_else(|| "-".into());
        println!("{pos:>3}  {:<8} g={group:<2} {detail}", e.kind.to_string());
    }
    for b in &seq.image_blocks {
        println!("block {} at {}..{} in group {}", b.image_id, b.start, b.end(), b.group);
    }
    assert!(validate(&seq).is_empty());
    assert_eq!(seq.to_segments(&vocab), segments);
    Ok(())
}
