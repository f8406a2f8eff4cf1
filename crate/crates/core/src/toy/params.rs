use rand::Rng;

use super::linalg::Matrix;

/// Number of text-token classes (`text`, `plain`).
pub const TEXT_CLASSES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    /// Model width.
    pub d: usize,
    /// Raw patch feature width.
    pub p: usize,
    pub attributes: usize,
    pub max_positions: usize,
    pub layers: usize,
}

/// Query, key, value and output projections of one attention layer.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionWeights {
    pub wq: Matrix,
    pub wk: Matrix,
    pub wv: Matrix,
    pub wo: Matrix,
}

impl AttentionWeights {
    pub fn zeros(d: usize) -> Self {
        Self { wq: Matrix::zeros(d, d), wk: Matrix::zeros(d, d), wv: Matrix::zeros(d, d), wo: Matrix::zeros(d, d) }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        let std = 1.0 / (d as f64).sqrt();
        Self {
            wq: Matrix::random(rng, d, d, std),
            wk: Matrix::random(rng, d, d, std),
            wv: Matrix::random(rng, d, d, std),
            wo: Matrix::random(rng, d, d, std),
        }
    }
}

/// Every learnable table of the toy model. The same struct holds gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModelParams {
    /// `TEXT_CLASSES × d`
    pub text_embed: Matrix,
    /// `attributes × d`, the attribute projection added to special tokens and
    /// (when `additive_attribute` is set) to the patches of their group.
    pub attribute_embed: Matrix,
    /// `p × d` linear patch encoder.
    pub patch_encoder: Matrix,
    /// `max_positions × d`
    pub position_embed: Matrix,
    pub layers: Vec<AttentionWeights>,
    /// `d × p`
    pub denoise_head: Matrix,
    pub additive_attribute: bool,
}

impl ToyModelParams {
    pub fn zeros(dims: ModelDims) -> Self {
        Self {
            text_embed: Matrix::zeros(TEXT_CLASSES, dims.d),
            attribute_embed: Matrix::zeros(dims.attributes, dims.d),
            patch_encoder: Matrix::zeros(dims.p, dims.d),
            position_embed: Matrix::zeros(dims.max_positions, dims.d),
            layers: (0..dims.layers).map(|_| AttentionWeights::zeros(dims.d)).collect(),
            denoise_head: Matrix::zeros(dims.d, dims.p),
            additive_attribute: true,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, dims: ModelDims) -> Self {
        let embed_std = 0.5;
        Self {
            text_embed: Matrix::random(rng, TEXT_CLASSES, dims.d, embed_std),
            attribute_embed: Matrix::random(rng, dims.attributes, dims.d, embed_std),
            patch_encoder: Matrix::random(rng, dims.p, dims.d, 1.0 / (dims.p as f64).sqrt()),
            position_embed: Matrix::random(rng, dims.max_positions, dims.d, embed_std),
            layers: (0..dims.layers).map(|_| AttentionWeights::random(rng, dims.d)).collect(),
            denoise_head: Matrix::random(rng, dims.d, dims.p, 1.0 / (dims.d as f64).sqrt()),
            additive_attribute: true,
        }
    }

    pub fn dims(&self) -> ModelDims {
        ModelDims {
            d: self.text_embed.cols(),
            p: self.patch_encoder.rows(),
            attributes: self.attribute_embed.rows(),
            max_positions: self.position_embed.rows(),
            layers: self.layers.len(),
        }
    }

    /// Zero tensors of the same shapes, for accumulating gradients.
    pub fn zeros_like(&self) -> Self {
        let mut z = Self::zeros(self.dims());
        z.additive_attribute = self.additive_attribute;
        z
    }

    /// Named views of every tensor, in a fixed order.
    pub fn tensors(&self) -> Vec<(String, &Matrix)> {
        let mut out = vec![
            ("text_embed".to_string(), &self.text_embed),
            ("attribute_embed".to_string(), &self.attribute_embed),
            ("patch_encoder".to_string(), &self.patch_encoder),
            ("position_embed".to_string(), &self.position_embed),
        ];
        for (i, l) in self.layers.iter().enumerate() {
            out.push((format!("layer{i}.wq"), &l.wq));
            out.push((format!("layer{i}.wk"), &l.wk));
            out.push((format!("layer{i}.wv"), &l.wv));
            out.push((format!("layer{i}.wo"), &l.wo));
        }
        out.push(("denoise_head".to_string(), &self.denoise_head));
        out
    }

    /// Mutable views in the same order as [`Self::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = vec![
            &mut self.text_embed,
            &mut self.attribute_embed,
            &mut self.patch_encoder,
            &mut self.position_embed,
        ];
        for l in &mut self.layers {
            out.push(&mut l.wq);
            out.push(&mut l.wk);
            out.push(&mut l.wv);
            out.push(&mut l.wo);
        }
        out.push(&mut self.denoise_head);
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|(_, m)| m.as_slice().len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|(_, m)| m.is_finite())
    }

    /// `self += alpha * other`, tensor by tensor.
    pub fn axpy(&mut self, alpha: f64, other: &ToyModelParams) {
        for (dst, (_, src)) in self.tensors_mut().into_iter().zip(other.tensors()) {
            dst.axpy(alpha, src);
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for t in self.tensors_mut() {
            t.scale(alpha);
        }
    }
}
