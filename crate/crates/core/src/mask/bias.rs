use super::dense::MaskMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasValue {
    Zero,
    /// Excluded from the softmax support.
    Blocked,
}

impl BiasValue {
    pub fn as_f64(self) -> f64 {
        match self {
            BiasValue::Zero => 0.0,
            BiasValue::Blocked => f64::NEG_INFINITY,
        }
    }
}

/// Additive logit bias: 0 where attention is allowed, blocked elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogitBias {
    allowed: MaskMatrix,
}

impl LogitBias {
    pub fn from_mask(mask: &MaskMatrix) -> Self {
        Self { allowed: mask.clone() }
    }

    pub fn dim(&self) -> usize {
        self.allowed.dim()
    }

    pub fn value(&self, q: usize, k: usize) -> BiasValue {
        if self.allowed.get(q, k) {
            BiasValue::Zero
        } else {
            BiasValue::Blocked
        }
    }

    pub fn is_blocked(&self, q: usize, k: usize) -> bool {
        !self.allowed.get(q, k)
    }

    /// Softmax of `logits + bias` over row `q`.
    pub fn softmax_row(&self, q: usize, logits: &[f64]) -> Vec<f64> {
        assert_eq!(logits.len(), self.dim());
        let allowed: Vec<bool> = self.allowed.row(q).collect();
        masked_softmax(logits, &allowed)
    }
}

/// Softmax restricted to `allowed` entries; the rest get weight exactly 0.
///
/// Blocked logits never enter the max or the normaliser, so a blocked cell
/// cannot influence the result however large its logit. Returns all zeros
/// when nothing is allowed.
pub fn masked_softmax(logits: &[f64], allowed: &[bool]) -> Vec<f64> {
    debug_assert_eq!(logits.len(), allowed.len());
    let max = logits
        .iter()
        .zip(allowed)
        .filter(|(_, &a)| a)
        .map(|(&l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = vec![0.0; logits.len()];
    if max == f64::NEG_INFINITY {
        return out;
    }
    let mut total = 0.0;
    for ((o, &l), &a) in out.iter_mut().zip(logits).zip(allowed) {
        if a {
            *o = (l - max).exp();
            total += *o;
        }
    }
    for o in &mut out {
        *o /= total;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_mask_is_zero_bias() {
        let bias = LogitBias::from_mask(&MaskMatrix::ones(4));
        for q in 0..4 {
            for k in 0..4 {
                assert_eq!(bias.value(q, k), BiasValue::Zero);
                assert_eq!(bias.value(q, k).as_f64(), 0.0);
            }
        }
    }

    #[test]
    fn single_blocked_cell() {
        let mut m = MaskMatrix::ones(9);
        m.set(5, 3, false);
        let bias = LogitBias::from_mask(&m);
        for q in 0..9 {
            for k in 0..9 {
                let expected = if (q, k) == (5, 3) { BiasValue::Blocked } else { BiasValue::Zero };
                assert_eq!(bias.value(q, k), expected);
            }
        }
        assert_eq!(bias.value(5, 3).as_f64(), f64::NEG_INFINITY);
    }

    #[test]
    fn softmax_only_over_allowed() {
        let logits = [1.0, 1e300, 2.0, -3.0];
        let allowed = [true, false, true, false];
        let w = masked_softmax(&logits, &allowed);
        assert_eq!(w[1], 0.0);
        assert_eq!(w[3], 0.0);
        let e1 = 1.0f64.exp();
        let e2 = 2.0f64.exp();
        assert!((w[0] - e1 / (e1 + e2)).abs() < 1e-15);
        assert!((w[2] - e2 / (e1 + e2)).abs() < 1e-15);
    }

    #[test]
    fn single_allowed_gets_unit_weight() {
        assert_eq!(masked_softmax(&[5.0, -2.0, 7.0], &[false, true, false]), vec![0.0, 1.0, 0.0]);
    }
}
