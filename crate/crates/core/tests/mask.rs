mod common;

use common::{random_sequence, vocab, worked_sequence};
use interleaved_cond::io::{parse_pbm, write_pbm, IntervalExport};
use interleaved_cond::mask::{
    build_mask, causal_mask, compose, cross_group_pairs, group_constraint_mask, intra_image_mask, mask_rows, materialize,
    oracle_mask, Interval, LogitBias, MaskMatrix,
};
use interleaved_cond::{build_sequence, InterleavedSequence, Segment, TokenKind};
use proptest::prelude::*;

fn row_bits(m: &MaskMatrix, q: usize) -> Vec<u8> {
    m.row(q).map(u8::from).collect()
}

#[test]
fn worked_example_cells() {
    let seq = worked_sequence();
    let (c, s, m) = (causal_mask(9), intra_image_mask(&seq), group_constraint_mask(&seq));
    let b = build_mask(&seq);

    assert!(!c.get(1, 3));
    assert!(s.get(3, 4) && s.get(4, 3) && !s.get(4, 6));
    assert!(!m.get(5, 3) && m.get(5, 1));

    assert!(!b.get(5, 3));
    assert!(b.get(3, 4));
    assert!(b.get(6, 3));
    assert!(!b.get(1, 3));
    assert_eq!(b, compose(&c, &s, &m).unwrap());
    assert_eq!(b, oracle_mask(&seq));
    assert_eq!(row_bits(&b, 5), [1, 1, 1, 0, 0, 1, 0, 0, 0]);
}

#[test]
fn worked_example_rows() {
    let rows = mask_rows(&worked_sequence());
    assert_eq!(rows[5].allowed, [Interval::new(0, 3), Interval::new(5, 6)]);
    assert_eq!(rows[3].allowed, [Interval::new(0, 5)]);
    let text = build_sequence(&vec![Segment::plain("a"); 5], &vocab()).unwrap();
    assert_eq!(mask_rows(&text)[2].allowed, [Interval::new(0, 3)]);
}

#[test]
fn degenerate_sequences() {
    let v = vocab();
    let one = build_sequence(&[Segment::plain("x")], &v).unwrap();
    assert_eq!(build_mask(&one), MaskMatrix::ones(1));
    assert_eq!(oracle_mask(&one), MaskMatrix::ones(1));

    let text = build_sequence(&[Segment::plain("a"), Segment::text("b"), Segment::plain("c")], &v).unwrap();
    assert_eq!(build_mask(&text), causal_mask(3));
    assert_eq!(intra_image_mask(&text), MaskMatrix::zeros(3));
    assert_eq!(group_constraint_mask(&text), MaskMatrix::ones(3));

    let image = build_sequence(&[Segment::image("A", 4)], &v).unwrap();
    assert_eq!(build_mask(&image), MaskMatrix::ones(4));
}

#[test]
fn logit_bias_examples() {
    assert!(LogitBias::from_mask(&MaskMatrix::ones(4)).softmax_row(0, &[1.0; 4]).iter().all(|w| *w == 0.25));
    let mut b = MaskMatrix::ones(9);
    b.set(5, 3, false);
    let bias = LogitBias::from_mask(&b);
    for q in 0..9 {
        for k in 0..9 {
            assert_eq!(bias.is_blocked(q, k), (q, k) == (5, 3));
        }
    }
    let w = bias.softmax_row(5, &[0.0, 0.0, 0.0, 1e300, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(w[3], 0.0);
    assert!(w.iter().all(|x| (*x == 0.0) || (*x - 0.125).abs() < 1e-15));
}

fn remove_specials(seq: &InterleavedSequence) -> InterleavedSequence {
    let segs: Vec<Segment> = seq
        .to_segments(&vocab())
        .into_iter()
        .filter(|s| !matches!(s, Segment::Special { .. }))
        .collect();
    build_sequence(&segs, &vocab()).unwrap()
}

fn relabel_groups(seq: &InterleavedSequence, shift: u32) -> InterleavedSequence {
    let m = seq.group_count.max(1);
    let mut out = seq.clone();
    let map = |g: u32| (g - 1 + shift) % m + 1;
    for e in &mut out.entries {
        e.group = e.group.map(map);
    }
    for b in &mut out.image_blocks {
        b.group = map(b.group);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn backends_agree(seed in any::<u64>()) {
        let (_, seq) = random_sequence(seed);
        let dense = build_mask(&seq);
        prop_assert_eq!(&dense, &oracle_mask(&seq));
        prop_assert_eq!(&dense, &materialize(&mask_rows(&seq), seq.len()));
        let c = causal_mask(seq.len());
        prop_assert_eq!(&dense, &compose(&c, &intra_image_mask(&seq), &group_constraint_mask(&seq)).unwrap());
        prop_assert!(mask_rows(&seq).iter().all(|r| r.allowed.len() <= seq.image_blocks.len() + 1));
    }

    #[test]
    fn structural_invariants(seed in any::<u64>()) {
        let (_, seq) = random_sequence(seed);
        let b = build_mask(&seq);
        let s = intra_image_mask(&seq);
        for q in 0..seq.len() {
            prop_assert!(b.get(q, q));
            for k in 0..seq.len() {
                if b.get(q, k) && !s.get(q, k) {
                    prop_assert!(k <= q);
                }
                if seq.kind(q) == TokenKind::Special && b.get(q, k) {
                    prop_assert!(k <= q);
                }
                if seq.kind(q) == TokenKind::Image && seq.image_id(q) == seq.image_id(k) {
                    prop_assert!(b.get(q, k));
                }
            }
        }
        for (q, k) in cross_group_pairs(&seq) {
            prop_assert!(!b.get(q, k));
        }
    }

    #[test]
    fn without_specials_groups_do_not_matter(seed in any::<u64>(), shift in 0u32..4) {
        let (_, seq) = random_sequence(seed);
        let plain = remove_specials(&seq);
        prop_assert_eq!(group_constraint_mask(&plain), MaskMatrix::ones(plain.len()));
        prop_assert_eq!(build_mask(&relabel_groups(&plain, shift)), build_mask(&plain));
    }

    #[test]
    fn exports_round_trip(seed in any::<u64>()) {
        let (_, seq) = random_sequence(seed);
        let b = build_mask(&seq);
        prop_assert_eq!(&parse_pbm(&write_pbm(&b)).unwrap(), &b);
        let export = IntervalExport::new(mask_rows(&seq));
        let back = IntervalExport::from_json(&export.to_json()).unwrap();
        prop_assert_eq!(&back, &export);
        prop_assert_eq!(back.materialize(), b);
    }
}
