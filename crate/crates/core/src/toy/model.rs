use std::collections::HashMap;

use super::linalg::{dot, Matrix};
use super::params::{AttentionWeights, ToyModelParams};
use crate::error::ToyError;
use crate::mask::{build_mask, causal_mask, intra_image_mask, masked_softmax, MaskMatrix};
use crate::sequence::{InterleavedSequence, TokenKind, TARGET_IMAGE_ID};

/// Raw patch features per image id, one `p`-vector per patch.
pub type RawPatches = HashMap<String, Vec<Vec<f64>>>;

/// Which attention mask the model runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskMode {
    /// Causal order, intra-image bidirectionality and the group constraint.
    Grouped,
    /// Causal order and intra-image bidirectionality only.
    Ungrouped,
}

impl MaskMode {
    pub fn from_enabled(enabled: bool) -> Self {
        if enabled {
            MaskMode::Grouped
        } else {
            MaskMode::Ungrouped
        }
    }
}

pub fn attention_mask(seq: &InterleavedSequence, mode: MaskMode) -> MaskMatrix {
    match mode {
        MaskMode::Grouped => build_mask(seq),
        MaskMode::Ungrouped => causal_mask(seq.len())
            .or(&intra_image_mask(seq))
            .expect("same length"),
    }
}

fn text_class(kind: TokenKind) -> usize {
    match kind {
        TokenKind::Text => 0,
        _ => 1,
    }
}

fn check_patches(seq: &InterleavedSequence, raw: &RawPatches, p: usize) -> Result<(), ToyError> {
    for block in &seq.image_blocks {
        let patches = raw
            .get(&block.image_id)
            .ok_or_else(|| ToyError::MissingPatches(block.image_id.clone()))?;
        if patches.len() != block.patch_count as usize || patches.iter().any(|v| v.len() != p) {
            return Err(ToyError::PatchCountMismatch {
                image: block.image_id.clone(),
                expected: block.patch_count as usize,
                width: p,
                got: patches.len(),
            });
        }
    }
    Ok(())
}

fn group_attributes(seq: &InterleavedSequence) -> HashMap<u32, Vec<usize>> {
    let mut out: HashMap<u32, Vec<usize>> = HashMap::new();
    for e in &seq.entries {
        if let (TokenKind::Special, Some(g), Some(a)) = (e.kind, e.group, e.attribute) {
            out.entry(g).or_default().push(a.index());
        }
    }
    out
}

/// Input embeddings, one row per position.
///
/// * text / plain: class embedding + position
/// * special: attribute embedding + position
/// * image patch: encoded patch + position, plus the sum of the attribute
///   embeddings of every special token in the patch's group when
///   `additive_attribute` is set
pub fn embed_sequence(seq: &InterleavedSequence, raw: &RawPatches, params: &ToyModelParams) -> Result<Matrix, ToyError> {
    let dims = params.dims();
    if seq.len() > dims.max_positions {
        return Err(ToyError::Shape(format!(
            "sequence length {} exceeds {} positions",
            seq.len(),
            dims.max_positions
        )));
    }
    check_patches(seq, raw, dims.p)?;
    let group_attrs = group_attributes(seq);

    let mut h = Matrix::zeros(seq.len(), dims.d);
    for (pos, entry) in seq.entries.iter().enumerate() {
        let row = h.row_mut(pos);
        row.copy_from_slice(params.position_embed.row(pos));
        match entry.kind {
            TokenKind::Text | TokenKind::Plain => add(row, params.text_embed.row(text_class(entry.kind))),
            TokenKind::Special => {
                let a = entry.attribute.ok_or_else(|| ToyError::Shape(format!("special token at {pos} has no attribute")))?;
                add(row, attribute_row(params, a.index())?);
            }
            TokenKind::Image => {
                let block = seq
                    .block_at(pos)
                    .ok_or_else(|| ToyError::Shape(format!("image token at {pos} is outside every block")))?;
                let patch = &raw[&block.image_id][pos - block.start];
                for (j, &x) in patch.iter().enumerate() {
                    if x != 0.0 {
                        for (r, &w) in row.iter_mut().zip(params.patch_encoder.row(j)) {
                            *r += x * w;
                        }
                    }
                }
                if params.additive_attribute {
                    for &a in group_attrs.get(&block.group).map(Vec::as_slice).unwrap_or(&[]) {
                        add(row, attribute_row(params, a)?);
                    }
                }
            }
        }
    }
    Ok(h)
}

fn attribute_row(params: &ToyModelParams, a: usize) -> Result<&[f64], ToyError> {
    if a >= params.attribute_embed.rows() {
        return Err(ToyError::Shape(format!("attribute index {a} outside the embedding table")));
    }
    Ok(params.attribute_embed.row(a))
}

fn add(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Intermediate values of one attention layer.
#[derive(Debug, Clone)]
pub struct AttentionCache {
    pub q: Matrix,
    pub k: Matrix,
    pub v: Matrix,
    /// `L × L` attention weights; exactly 0 where the mask blocks.
    pub weights: Matrix,
    /// `weights · v`
    pub context: Matrix,
    /// `context · wo`
    pub output: Matrix,
}

pub(crate) fn allowed_rows(mask: &MaskMatrix) -> Result<Vec<Vec<bool>>, ToyError> {
    (0..mask.dim())
        .map(|q| {
            if mask.row_count(q) == 0 {
                Err(ToyError::EmptyRow(q))
            } else {
                Ok(mask.row(q).collect())
            }
        })
        .collect()
}

/// Attention weights from projected queries and keys. Logits are only formed
/// for allowed keys; blocked keys get weight 0.
pub(crate) fn attention_weights(q: &Matrix, k: &Matrix, allowed: &[Vec<bool>]) -> Matrix {
    let len = q.rows();
    let scale = 1.0 / (q.cols() as f64).sqrt();
    let mut weights = Matrix::zeros(len, len);
    let mut logits = vec![0.0; len];
    for (row, allow) in allowed.iter().enumerate() {
        for (j, l) in logits.iter_mut().enumerate() {
            *l = if allow[j] { dot(q.row(row), k.row(j)) * scale } else { 0.0 };
        }
        weights.row_mut(row).copy_from_slice(&masked_softmax(&logits, allow));
    }
    weights
}

pub fn attention_forward(x: &Matrix, mask: &MaskMatrix, w: &AttentionWeights) -> Result<AttentionCache, ToyError> {
    if mask.dim() != x.rows() {
        return Err(ToyError::Shape(format!("mask is {0}x{0}, input has {1} rows", mask.dim(), x.rows())));
    }
    if x.cols() != w.wq.rows() {
        return Err(ToyError::Shape(format!("input width {} vs model width {}", x.cols(), w.wq.rows())));
    }
    let allowed = allowed_rows(mask)?;
    let q = x.matmul(&w.wq);
    let k = x.matmul(&w.wk);
    let v = x.matmul(&w.wv);
    let weights = attention_weights(&q, &k, &allowed);
    let context = weights.matmul(&v);
    let output = context.matmul(&w.wo);
    Ok(AttentionCache { q, k, v, weights, context, output })
}

/// Single-head masked attention using the first layer's projections:
/// `softmax(QKᵀ/√d restricted to B) · V · Wo`.
pub fn masked_attention(h: &Matrix, mask: &MaskMatrix, params: &ToyModelParams) -> Result<Matrix, ToyError> {
    let layer = params
        .layers
        .first()
        .ok_or_else(|| ToyError::Config("model has no attention layers".into()))?;
    Ok(attention_forward(h, mask, layer)?.output)
}

/// Backpropagates `d_out` (gradient w.r.t. the layer output) through one
/// attention layer. Accumulates weight gradients into `grad` and returns the
/// gradient w.r.t. the layer input.
pub fn attention_backward(x: &Matrix, w: &AttentionWeights, cache: &AttentionCache, d_out: &Matrix, grad: &mut AttentionWeights) -> Matrix {
    let len = x.rows();
    let scale = 1.0 / (x.cols() as f64).sqrt();

    grad.wo.add_assign(&cache.context.t_matmul(d_out));
    let d_context = d_out.matmul_t(&w.wo);
    let d_v = cache.weights.t_matmul(&d_context);
    let d_weights = d_context.matmul_t(&cache.v);

    let mut d_logits = Matrix::zeros(len, len);
    for q in 0..len {
        let p = cache.weights.row(q);
        let dp = d_weights.row(q);
        let inner = dot(p, dp);
        for (k, dl) in d_logits.row_mut(q).iter_mut().enumerate() {
            *dl = p[k] * (dp[k] - inner) * scale;
        }
    }
    let d_q = d_logits.matmul(&cache.k);
    let d_k = d_logits.t_matmul(&cache.q);

    grad.wq.add_assign(&x.t_matmul(&d_q));
    grad.wk.add_assign(&x.t_matmul(&d_k));
    grad.wv.add_assign(&x.t_matmul(&d_v));

    let mut d_x = d_q.matmul_t(&w.wq);
    d_x.add_assign(&d_k.matmul_t(&w.wk));
    d_x.add_assign(&d_v.matmul_t(&w.wv));
    d_x
}

/// Noise level per timestep, linear from 0 to 1.
pub fn linear_schedule(steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|t| t as f64 / (n - 1) as f64).collect(),
    }
}

/// Noised target latent `z_t` at timestep `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentState {
    pub z: Vec<Vec<f64>>,
    pub t: usize,
    pub noise_schedule: Vec<f64>,
}

impl LatentState {
    /// `z_t = (1 − σ_t)·clean + σ_t·noise`.
    pub fn noised(clean: &[Vec<f64>], noise: &[Vec<f64>], t: usize, noise_schedule: Vec<f64>) -> Result<Self, ToyError> {
        let sigma = *noise_schedule
            .get(t)
            .ok_or_else(|| ToyError::Config(format!("timestep {t} outside a {}-step schedule", noise_schedule.len())))?;
        if clean.len() != noise.len() {
            return Err(ToyError::Shape("clean and noise patch counts differ".into()));
        }
        let z = clean
            .iter()
            .zip(noise)
            .map(|(c, n)| c.iter().zip(n).map(|(c, n)| (1.0 - sigma) * c + sigma * n).collect())
            .collect();
        Ok(Self { z, t, noise_schedule })
    }

    pub fn sigma(&self) -> f64 {
        self.noise_schedule[self.t]
    }

    pub fn is_valid(&self) -> bool {
        self.t < self.noise_schedule.len() && self.z.iter().flatten().all(|v| v.is_finite())
    }
}

/// A conditioning sequence with its target block, ready for repeated
/// forward/backward passes.
#[derive(Debug, Clone)]
pub struct DenoiseExample {
    pub seq: InterleavedSequence,
    pub raw: RawPatches,
    pub clean: Matrix,
    pub mask: MaskMatrix,
    target_start: usize,
}

impl DenoiseExample {
    /// Appends the group-0 target block (if the sequence has none) and feeds it
    /// `latent.z` as raw features.
    pub fn new(
        seq: &InterleavedSequence,
        raw: &RawPatches,
        latent: &LatentState,
        clean: &[Vec<f64>],
        mode: MaskMode,
    ) -> Result<Self, ToyError> {
        if !latent.is_valid() {
            return Err(ToyError::Config("latent state has an out-of-range timestep or non-finite values".into()));
        }
        if latent.z.len() != clean.len() || latent.z.is_empty() {
            return Err(ToyError::Shape(format!(
                "latent has {} patches, clean target has {}",
                latent.z.len(),
                clean.len()
            )));
        }
        let seq = match seq.target_block() {
            Some(block) if block.patch_count as usize == latent.z.len() => seq.clone(),
            Some(block) => {
                return Err(ToyError::PatchCountMismatch {
                    image: TARGET_IMAGE_ID.into(),
                    expected: block.patch_count as usize,
                    width: clean[0].len(),
                    got: latent.z.len(),
                })
            }
            None => seq.with_target_block(latent.z.len() as u32),
        };
        let mut raw = raw.clone();
        raw.insert(TARGET_IMAGE_ID.to_string(), latent.z.clone());
        let target_start = seq.target_block().expect("target block present").start;
        let mask = attention_mask(&seq, mode);
        Ok(Self { seq, raw, clean: Matrix::from_rows(clean), mask, target_start })
    }

    pub fn target_rows(&self) -> std::ops::Range<usize> {
        self.target_start..self.target_start + self.clean.rows()
    }

    pub fn forward(&self, params: &ToyModelParams) -> Result<ForwardPass, ToyError> {
        let embed = embed_sequence(&self.seq, &self.raw, params)?;
        let mut inputs = Vec::with_capacity(params.layers.len());
        let mut caches = Vec::with_capacity(params.layers.len());
        let mut h = embed;
        for layer in &params.layers {
            let cache = attention_forward(&h, &self.mask, layer)?;
            let mut next = h.clone();
            next.add_assign(&cache.output);
            inputs.push(h);
            caches.push(cache);
            h = next;
        }
        let rows = self.target_rows();
        let mut target_hidden = Matrix::zeros(rows.len(), h.cols());
        for (i, r) in rows.enumerate() {
            target_hidden.row_mut(i).copy_from_slice(h.row(r));
        }
        let prediction = target_hidden.matmul(&params.denoise_head);
        Ok(ForwardPass { inputs, caches, hidden: h, target_hidden, prediction })
    }

    pub fn loss(&self, params: &ToyModelParams) -> Result<f64, ToyError> {
        let pass = self.forward(params)?;
        Ok(mse(&pass.prediction, &self.clean))
    }

    /// Loss and its gradient w.r.t. every parameter table.
    pub fn loss_and_grad(&self, params: &ToyModelParams) -> Result<(f64, ToyModelParams), ToyError> {
        let pass = self.forward(params)?;
        let loss = mse(&pass.prediction, &self.clean);
        let mut grad = params.zeros_like();

        let n = (self.clean.rows() * self.clean.cols()) as f64;
        let mut d_pred = pass.prediction.clone();
        d_pred.axpy(-1.0, &self.clean);
        d_pred.scale(2.0 / n);

        grad.denoise_head.add_assign(&pass.target_hidden.t_matmul(&d_pred));
        let d_target = d_pred.matmul_t(&params.denoise_head);
        let mut d_h = Matrix::zeros(pass.hidden.rows(), pass.hidden.cols());
        for (i, r) in self.target_rows().enumerate() {
            d_h.row_mut(r).copy_from_slice(d_target.row(i));
        }

        for l in (0..params.layers.len()).rev() {
            let d_in = attention_backward(&pass.inputs[l], &params.layers[l], &pass.caches[l], &d_h, &mut grad.layers[l]);
            d_h.add_assign(&d_in);
        }

        self.embed_backward(params, &d_h, &mut grad);
        Ok((loss, grad))
    }

    fn embed_backward(&self, params: &ToyModelParams, d_embed: &Matrix, grad: &mut ToyModelParams) {
        let group_attrs = group_attributes(&self.seq);
        for (pos, entry) in self.seq.entries.iter().enumerate() {
            let d = d_embed.row(pos);
            add(grad.position_embed.row_mut(pos), d);
            match entry.kind {
                TokenKind::Text | TokenKind::Plain => add(grad.text_embed.row_mut(text_class(entry.kind)), d),
                TokenKind::Special => {
                    let a = entry.attribute.expect("checked in forward").index();
                    add(grad.attribute_embed.row_mut(a), d);
                }
                TokenKind::Image => {
                    let block = self.seq.block_at(pos).expect("checked in forward");
                    let patch = &self.raw[&block.image_id][pos - block.start];
                    for (j, &x) in patch.iter().enumerate() {
                        for (g, &dv) in grad.patch_encoder.row_mut(j).iter_mut().zip(d) {
                            *g += x * dv;
                        }
                    }
                    if params.additive_attribute {
                        for &a in group_attrs.get(&block.group).map(Vec::as_slice).unwrap_or(&[]) {
                            add(grad.attribute_embed.row_mut(a), d);
                        }
                    }
                }
            }
        }
    }
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Input to each attention layer (the first is the embedding).
    pub inputs: Vec<Matrix>,
    pub caches: Vec<AttentionCache>,
    /// Residual stream after the last layer.
    pub hidden: Matrix,
    pub target_hidden: Matrix,
    pub prediction: Matrix,
}

/// Mean squared error over all components.
pub fn mse(prediction: &Matrix, target: &Matrix) -> f64 {
    assert_eq!((prediction.rows(), prediction.cols()), (target.rows(), target.cols()));
    let n = prediction.as_slice().len() as f64;
    prediction
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / n
}

/// Denoising loss of one conditioning sequence against its clean target.
pub fn denoise_loss(
    seq: &InterleavedSequence,
    raw: &RawPatches,
    target: &LatentState,
    clean: &[Vec<f64>],
    params: &ToyModelParams,
    mode: MaskMode,
) -> Result<f64, ToyError> {
    DenoiseExample::new(seq, raw, target, clean, mode)?.loss(params)
}
