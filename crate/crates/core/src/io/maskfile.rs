//! Mask export formats: plain PBM (`P1`) and a JSON interval listing.

use serde::{Deserialize, Serialize};

use crate::error::MaskError;
use crate::mask::{materialize, MaskMatrix, MaskRowSpec};

/// `P1`, then `L L`, then `L` rows of space-separated digits, 1 = allowed.
pub fn write_pbm(mask: &MaskMatrix) -> String {
    let n = mask.dim();
    let mut out = String::with_capacity(8 + n * n * 2);
    out.push_str(&format!("P1\n{n} {n}\n"));
    for q in 0..n {
        for (k, bit) in mask.row(q).enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push(if bit { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Reads any plain PBM with equal width and height. Comments and packed
/// digits are accepted as netpbm allows.
pub fn parse_pbm(text: &str) -> Result<MaskMatrix, MaskError> {
    let bad = |m: &str| MaskError::Pbm(m.to_string());
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let mut tokens = body.split_whitespace();
    if tokens.next() != Some("P1") {
        return Err(bad("missing P1 magic"));
    }
    let mut dim = || -> Result<usize, MaskError> {
        tokens
            .next()
            .ok_or_else(|| bad("missing dimensions"))?
            .parse()
            .map_err(|_| bad("dimension is not an integer"))
    };
    let (width, height) = (dim()?, dim()?);
    if width != height {
        return Err(MaskError::DimensionMismatch(width, height));
    }

    let digits: Vec<bool> = tokens
        .flat_map(str::chars)
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(bad(&format!("unexpected character {c:?}"))),
        })
        .collect::<Result<_, _>>()?;
    if digits.len() != width * height {
        return Err(bad(&format!("expected {} pixels, found {}", width * height, digits.len())));
    }
    Ok(MaskMatrix::from_fn(width, |q, k| digits[q * width + k]))
}

/// `{"dims": L, "rows": [{"row": q, "allowed": [[s, e], ...]}, ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalExport {
    pub dims: usize,
    pub rows: Vec<MaskRowSpec>,
}

impl IntervalExport {
    pub fn new(rows: Vec<MaskRowSpec>) -> Self {
        Self { dims: rows.len(), rows }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("interval exports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn materialize(&self) -> MaskMatrix {
        materialize(&self.rows, self.dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::causal_mask;

    #[test]
    fn single_cell() {
        let m = MaskMatrix::ones(1);
        assert_eq!(write_pbm(&m), "P1\n1 1\n1\n");
        assert_eq!(parse_pbm("P1\n1 1\n1\n").unwrap(), m);
    }

    #[test]
    fn causal_layout() {
        let text = write_pbm(&causal_mask(3));
        assert_eq!(text, "P1\n3 3\n1 0 0\n1 1 0\n1 1 1\n");
        assert_eq!(parse_pbm(&text).unwrap(), causal_mask(3));
    }

    #[test]
    fn lenient_reader() {
        let packed = "P1 # mask\n3 3\n100\n110 # row\n111";
        assert_eq!(parse_pbm(packed).unwrap(), causal_mask(3));
    }

    #[test]
    fn reader_errors() {
        assert!(parse_pbm("P4\n1 1\n1").is_err());
        assert!(parse_pbm("P1\n2 2\n1 0 1").is_err());
        assert!(parse_pbm("P1\n1 1\n2").is_err());
        assert_eq!(parse_pbm("P1\n2 1\n1 1"), Err(MaskError::DimensionMismatch(2, 1)));
    }
}
