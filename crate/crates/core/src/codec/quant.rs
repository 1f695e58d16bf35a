//! Quantization tables and per-block (de)quantization.

use super::coeff::CoeffBlock;

/// Annex K example luminance table (natural order).
pub const ANNEX_K_LUMA: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Annex K example chrominance table (natural order).
pub const ANNEX_K_CHROMA: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// The 192 global quantization values: one 64-entry table per component
/// (Y, Cb, Cr), every entry in the baseline range [1, 255].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantTable {
    tables: [[u16; 64]; 3],
}

impl QuantTable {
    pub fn new(tables: [[u16; 64]; 3]) -> Self {
        for t in &tables {
            for &v in t {
                assert!((1..=255).contains(&v), "quant entry {v} out of [1,255]");
            }
        }
        Self { tables }
    }

    /// Per-component table (0 = Y, 1 = Cb, 2 = Cr).
    pub fn component(&self, c: usize) -> &[u16; 64] {
        &self.tables[c]
    }

    /// Entry for component `c` at natural frequency index `k`.
    #[inline]
    pub fn entry(&self, c: usize, k: usize) -> u16 {
        self.tables[c][k]
    }

    /// True when the Cb and Cr tables are identical, which lets the encoder
    /// emit two DQT tables instead of three.
    pub fn chroma_tables_equal(&self) -> bool {
        self.tables[1] == self.tables[2]
    }

    /// Annex K base tables scaled by `factor`, entries clamped to [1, 255].
    /// `factor` 0 degenerates to the all-ones (finest legal) table.
    pub fn annex_k_scaled(factor: f64) -> Self {
        assert!(factor >= 0.0 && factor.is_finite());
        let scale = |base: &[u16; 64]| {
            let mut t = [0u16; 64];
            for (dst, &src) in t.iter_mut().zip(base.iter()) {
                *dst = ((src as f64 * factor).round() as i64).clamp(1, 255) as u16;
            }
            t
        };
        let luma = scale(&ANNEX_K_LUMA);
        let chroma = scale(&ANNEX_K_CHROMA);
        Self::new([luma, chroma, chroma])
    }

    /// Annex K tables at a libjpeg-style quality setting in [1, 100].
    pub fn from_quality(quality: u8) -> Self {
        assert!((1..=100).contains(&quality), "quality must be in 1..=100");
        let q = quality as f64;
        let percent = if q < 50.0 { 5000.0 / q } else { 200.0 - 2.0 * q };
        Self::annex_k_scaled(percent / 100.0)
    }

    /// True when every entry is elementwise >= the corresponding entry of
    /// `other` (i.e. `self` quantizes at least as coarsely).
    pub fn coarser_or_equal(&self, other: &QuantTable) -> bool {
        self.tables
            .iter()
            .zip(other.tables.iter())
            .all(|(a, b)| a.iter().zip(b.iter()).all(|(x, y)| x >= y))
    }
}

/// Rounds half away from zero, the symmetric tie-break that keeps
/// quantization odd.
#[inline]
fn round_half_away(v: f64) -> i32 {
    // f64::round already rounds half away from zero.
    v.round() as i32
}

/// Quantizes real DCT coefficients against a 64-entry table.
pub fn quantize_block(coeffs: &[f64; 64], table: &[u16; 64]) -> CoeffBlock {
    let mut out = [0i16; 64];
    for k in 0..64 {
        out[k] = round_half_away(coeffs[k] / table[k] as f64) as i16;
    }
    CoeffBlock { coeffs: out }
}

/// Expands quantized coefficients back to real values.
pub fn dequantize_block(block: &CoeffBlock, table: &[u16; 64]) -> [f64; 64] {
    let mut out = [0.0f64; 64];
    for k in 0..64 {
        out[k] = block.coeffs[k] as f64 * table[k] as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(q: u16) -> [u16; 64] {
        [q; 64]
    }

    #[test]
    fn quantize_rounds_half_away_from_zero() {
        let mut coeffs = [0.0f64; 64];
        coeffs[0] = 100.0; // 100/16 = 6.25 -> 6
        coeffs[1] = -8.0; // -8/16 = -0.5 -> -1
        let block = quantize_block(&coeffs, &flat(16));
        assert_eq!(block.coeffs[0], 6);
        assert_eq!(block.coeffs[1], -1);
        assert_eq!(block.coeffs[2], 0);
    }

    #[test]
    fn quantize_is_odd() {
        let table = flat(7);
        for v in [-3.5f64, 3.5, 10.4, -10.4, 17.5, 123.0] {
            let mut pos = [0.0f64; 64];
            let mut neg = [0.0f64; 64];
            pos[5] = v;
            neg[5] = -v;
            let qp = quantize_block(&pos, &table);
            let qn = quantize_block(&neg, &table);
            assert_eq!(qp.coeffs[5], -qn.coeffs[5], "oddness broken at {v}");
        }
    }

    #[test]
    fn dequantize_scales_by_table() {
        let block = CoeffBlock {
            coeffs: {
                let mut c = [0i16; 64];
                c[0] = 6;
                c
            },
        };
        let out = dequantize_block(&block, &flat(16));
        assert_eq!(out[0], 96.0);
        assert!(out[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn quality_scaling_hits_annex_k_at_fifty() {
        let t = QuantTable::from_quality(50);
        assert_eq!(t.component(0), &ANNEX_K_LUMA);
        assert_eq!(t.component(1), &ANNEX_K_CHROMA);
    }

    #[test]
    fn factor_zero_gives_all_ones() {
        let t = QuantTable::annex_k_scaled(0.0);
        for c in 0..3 {
            assert!(t.component(c).iter().all(|&v| v == 1));
        }
    }
}
