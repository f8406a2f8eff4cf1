//! Build the group-scoped mask for a two-group sequence and compare it with
//! its parts and with the causal-only mask.
//!
//!     cargo run --example group_mask

use interleaved_cond::mask::{build_mask, causal_mask, group_constraint_mask, intra_image_mask, mask_rows, oracle_mask};
use interleaved_cond::{build_sequence, AttributeVocabulary, Segment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = AttributeVocabulary::default();
    let seq = build_sequence(
        &[
            Segment::plain("put"),
            Segment::special("id"),
            Segment::text("this person"),
            Segment::image("A", 2),
            Segment::special("style"),
            Segment::image("B", 2),
            Segment::text("in a garden"),
        ],
        &vocab,
    )?;

    let b = build_mask(&seq);
    println!("causal\n{:?}", causal_mask(seq.len()));
    println!("intra-image\n{:?}", intra_image_mask(&seq));
    println!("group constraint\n{:?}", group_constraint_mask(&seq));
    println!("combined\n{b:?}");
    assert_eq!(b, oracle_mask(&seq));

    // <style> at 5 may not look at image A (3, 4); patches of A see each other.
    println!("B(5,3) = {}  B(3,4) = {}  B(6,3) = {}  B(1,3) = {}", b.get(5, 3), b.get(3, 4), b.get(6, 3), b.get(1, 3));

    for row in mask_rows(&seq) {
        let spans: Vec<String> = row.allowed.iter().map(|iv| format!("[{},{})", iv.start, iv.end)).collect();
        println!("row {}: {}", row.row, spans.join(" "));
    }
    Ok(())
}
