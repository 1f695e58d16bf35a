//! Orthonormal 2-D DCT-II on 8x8 blocks, double-precision reference path.
//!
//! The normalization matches the JPEG convention: a constant block of value
//! `v` transforms to DC = 8v with all AC terms zero.

use std::sync::OnceLock;

/// 8x8 cosine basis, `basis[k][n] = alpha(k) * cos((2n+1) k pi / 16)`.
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = [[0.0; 8]; 8];
        for (k, row) in b.iter_mut().enumerate() {
            let alpha = if k == 0 {
                (1.0f64 / 8.0).sqrt()
            } else {
                (2.0f64 / 8.0).sqrt()
            };
            for (n, v) in row.iter_mut().enumerate() {
                *v = alpha * (((2 * n + 1) as f64) * (k as f64) * std::f64::consts::PI / 16.0).cos();
            }
        }
        b
    })
}

/// Forward 2-D DCT-II of a level-shifted 8x8 block (row-major).
pub fn fdct_block(samples: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    // Rows, then columns.
    let mut tmp = [0.0f64; 64];
    for y in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                acc += samples[y * 8 + x] * b[u][x];
            }
            tmp[y * 8 + u] = acc;
        }
    }
    let mut out = [0.0f64; 64];
    for u in 0..8 {
        for v in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                acc += tmp[y * 8 + u] * b[v][y];
            }
            out[v * 8 + u] = acc;
        }
    }
    out
}

/// Inverse of [`fdct_block`]. Output is still level-shifted; re-shifting and
/// clamping happen at plane assembly.
pub fn idct_block(coeffs: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0f64; 64];
    for v in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                acc += coeffs[v * 8 + u] * b[u][x];
            }
            tmp[v * 8 + x] = acc;
        }
    }
    let mut out = [0.0f64; 64];
    for x in 0..8 {
        for y in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                acc += tmp[v * 8 + x] * b[v][y];
            }
            out[y * 8 + x] = acc;
        }
    }
    out
}
