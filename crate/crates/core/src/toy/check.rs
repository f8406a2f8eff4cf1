//! Numerical checks: finite-difference gradient comparison and the
//! single-layer leakage probe.

use super::linalg::Matrix;
use super::model::{allowed_rows, attention_mask, attention_weights, embed_sequence, DenoiseExample, MaskMode, RawPatches};
use super::params::ToyModelParams;
use crate::error::ToyError;
use crate::mask::cross_group_pairs;
use crate::sequence::InterleavedSequence;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Gradient magnitudes below this are compared in absolute terms.
pub const GRAD_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// `max |analytic − numeric| / max(|numeric|, GRAD_FLOOR)`
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    /// Tensor name and flat index of the worst entry.
    pub worst: Option<(String, usize)>,
    pub checked: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error < tolerance
    }
}

/// Compares `analytic` against central differences of the example's loss,
/// entry by entry over every parameter table.
pub fn compare_gradients(example: &DenoiseExample, params: &ToyModelParams, analytic: &ToyModelParams) -> Result<GradCheckReport, ToyError> {
    let names: Vec<String> = params.tensors().into_iter().map(|(n, _)| n).collect();
    let analytic: Vec<Vec<f64>> = analytic.tensors().into_iter().map(|(_, m)| m.as_slice().to_vec()).collect();

    let mut probe = params.clone();
    let mut report = GradCheckReport { max_rel_error: 0.0, max_abs_error: 0.0, worst: None, checked: 0 };
    for (t, name) in names.iter().enumerate() {
        let len = analytic[t].len();
        for i in 0..len {
            let original = probe.tensors_mut()[t].as_slice()[i];
            probe.tensors_mut()[t].as_mut_slice()[i] = original + FD_STEP;
            let plus = example.loss(&probe)?;
            probe.tensors_mut()[t].as_mut_slice()[i] = original - FD_STEP;
            let minus = example.loss(&probe)?;
            probe.tensors_mut()[t].as_mut_slice()[i] = original;

            let numeric = (plus - minus) / (2.0 * FD_STEP);
            let abs = (analytic[t][i] - numeric).abs();
            let rel = abs / numeric.abs().max(GRAD_FLOOR);
            report.checked += 1;
            report.max_abs_error = report.max_abs_error.max(abs);
            if report.worst.is_none() || rel > report.max_rel_error {
                report.max_rel_error = rel;
                report.worst = Some((name.clone(), i));
            }
        }
    }
    Ok(report)
}

/// Analytic gradient of the denoising loss checked against finite
/// differences.
pub fn grad_check(example: &DenoiseExample, params: &ToyModelParams) -> Result<GradCheckReport, ToyError> {
    let (_, analytic) = example.loss_and_grad(params)?;
    compare_gradients(example, params, &analytic)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageProbe {
    /// Largest `|∂ output_q / ∂ v_k|` over blocked pairs.
    pub max_abs: f64,
    /// Number of `(special query, other-group image key)` pairs.
    pub blocked_pairs: usize,
}

/// Sensitivity of special-token outputs to the values of other-group image
/// patches, through one attention layer.
///
/// Each value component of each blocked key is perturbed in turn and the
/// query's output row recomputed; the change divided by the step is reported.
/// Under exclusion semantics the blocked weight is exactly zero, so the
/// result is exactly zero.
pub fn leakage_probe(seq: &InterleavedSequence, raw: &RawPatches, params: &ToyModelParams, mode: MaskMode) -> Result<LeakageProbe, ToyError> {
    let pairs = cross_group_pairs(seq);
    let layer = params
        .layers
        .first()
        .ok_or_else(|| ToyError::Config("model has no attention layers".into()))?;
    let h = embed_sequence(seq, raw, params)?;
    let mask = attention_mask(seq, mode);
    let allowed = allowed_rows(&mask)?;
    let q = h.matmul(&layer.wq);
    let k = h.matmul(&layer.wk);
    let v = h.matmul(&layer.wv);
    let weights = attention_weights(&q, &k, &allowed);

    let step = 1e-3;
    let mut max_abs: f64 = 0.0;
    for &(query, key) in &pairs {
        let base = output_row(&weights, &v, &layer.wo, query);
        for c in 0..v.cols() {
            let mut perturbed = v.clone();
            perturbed.set(key, c, v.get(key, c) + step);
            let out = output_row(&weights, &perturbed, &layer.wo, query);
            for (a, b) in out.iter().zip(&base) {
                max_abs = max_abs.max(((a - b) / step).abs());
            }
        }
    }
    Ok(LeakageProbe { max_abs, blocked_pairs: pairs.len() })
}

pub fn leakage_jacobian(seq: &InterleavedSequence, raw: &RawPatches, params: &ToyModelParams, mode: MaskMode) -> Result<f64, ToyError> {
    Ok(leakage_probe(seq, raw, params, mode)?.max_abs)
}

fn output_row(weights: &Matrix, v: &Matrix, wo: &Matrix, q: usize) -> Vec<f64> {
    let mut context = vec![0.0; v.cols()];
    for (j, &w) in weights.row(q).iter().enumerate() {
        for (c, &x) in context.iter_mut().zip(v.row(j)) {
            *c += w * x;
        }
    }
    super::linalg::vec_matmul(&context, wo)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::sequence::{build_sequence, Segment};
    use crate::toy::model::{linear_schedule, LatentState};
    use crate::toy::params::ModelDims;
    use crate::vocab::AttributeVocabulary;

    fn worked() -> InterleavedSequence {
        let segs = [
            Segment::plain("put"),
            Segment::special("id"),
            Segment::text("this person"),
            Segment::image("A", 2),
            Segment::special("style"),
            Segment::image("B", 2),
            Segment::text("in a garden"),
        ];
        build_sequence(&segs, &AttributeVocabulary::default()).unwrap()
    }

    fn raw(p: usize) -> RawPatches {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        ["A", "B"]
            .iter()
            .map(|id| (id.to_string(), (0..2).map(|_| Matrix::random(&mut rng, 1, p, 1.0).row(0).to_vec()).collect()))
            .collect()
    }

    fn dims(d: usize, layers: usize) -> ModelDims {
        ModelDims { d, p: 3, attributes: 14, max_positions: 16, layers }
    }

    fn example(params_seed: u64, d: usize, layers: usize) -> (DenoiseExample, ToyModelParams) {
        let mut rng = ChaCha8Rng::seed_from_u64(params_seed);
        let params = ToyModelParams::random(&mut rng, dims(d, layers));
        let clean = vec![vec![0.5, -0.25, 1.0]];
        let noise = vec![vec![-1.0, 0.3, 0.2]];
        let latent = LatentState::noised(&clean, &noise, 4, linear_schedule(10)).unwrap();
        let ex = DenoiseExample::new(&worked(), &raw(3), &latent, &clean, MaskMode::Grouped).unwrap();
        (ex, params)
    }

    #[test]
    fn zero_model_has_zero_gradients() {
        let (ex, _) = example(0, 4, 1);
        let zero = ToyModelParams::zeros(dims(4, 1));
        let report = grad_check(&ex, &zero).unwrap();
        assert_eq!(report.max_rel_error, 0.0);
        assert_eq!(report.checked, zero.parameter_count());
    }

    #[test]
    fn fixed_seed_instance_passes() {
        let (ex, params) = example(1, 4, 1);
        assert_eq!(ex.seq.len(), 10);
        let report = grad_check(&ex, &params).unwrap();
        assert!(report.passes(1e-6), "{report:?}");
        let (ex, params) = example(2, 4, 2);
        assert!(grad_check(&ex, &params).unwrap().passes(1e-6));
    }

    #[test]
    fn doubled_gradient_is_flagged() {
        let (ex, params) = example(3, 4, 1);
        let (_, mut analytic) = ex.loss_and_grad(&params).unwrap();
        analytic.scale(2.0);
        let report = compare_gradients(&ex, &params, &analytic).unwrap();
        assert!(!report.passes(1e-6));
        assert!((report.max_rel_error - 1.0).abs() < 1e-3, "{report:?}");
    }

    #[test]
    fn leakage_zero_under_mask() {
        let params = ToyModelParams::random(&mut ChaCha8Rng::seed_from_u64(4), dims(4, 1));
        let probe = leakage_probe(&worked(), &raw(3), &params, MaskMode::Grouped).unwrap();
        assert_eq!(probe.max_abs, 0.0);
        // Special 1 against image B (6, 7); special 5 against image A (3, 4).
        assert_eq!(probe.blocked_pairs, 4);
    }

    #[test]
    fn leakage_without_mask() {
        let params = ToyModelParams::random(&mut ChaCha8Rng::seed_from_u64(5), dims(4, 1));
        let value = leakage_jacobian(&worked(), &raw(3), &params, MaskMode::Ungrouped).unwrap();
        assert!(value > 0.0);
    }

    #[test]
    fn single_group_is_vacuous() {
        let seq = build_sequence(&[Segment::special("style"), Segment::image("A", 2)], &AttributeVocabulary::default()).unwrap();
        let params = ToyModelParams::random(&mut ChaCha8Rng::seed_from_u64(6), dims(4, 1));
        let mut patches = raw(3);
        patches.remove("B");
        let probe = leakage_probe(&seq, &patches, &params, MaskMode::Ungrouped).unwrap();
        assert_eq!(probe, LeakageProbe { max_abs: 0.0, blocked_pairs: 0 });
    }
}
