//! Per-block perceptual error map and its max-norm aggregation.
//!
//! The pixel difference is taken in code values and scaled by sensitivity
//! factors evaluated on the reference image only (local sRGB slope, local
//! red+green level). Everything that varies with image content is frozen
//! on the reference side, so the response to a perturbation is exactly
//! symmetric in its sign and exactly linear in its amplitude; masks too
//! come from the reference alone.

use super::mask::{compute_masks, MaskMap};
use super::opponent::{blue_yellow_divisor, opponent_transform, srgb_decode_table, srgb_slope_table};
use super::{band_of, CHANNELS};
use crate::codec::dct::fdct_block;
use crate::image::{Plane, RgbImage};

/// Overall output scale; calibrated so that ordinary photographic content
/// encoded around quality 90 measures near 1.0.
const OUTPUT_SCALE: f64 = 18.0;

/// Base sensitivity per opponent channel.
const CHANNEL_BASE: [f64; CHANNELS] = [1.0, 0.7, 0.7];

/// Exponential falloff of sensitivity with frequency radius u + v. The
/// blue-yellow channel decays fastest: high-frequency blue is hard to see.
const CHANNEL_FALLOFF: [f64; CHANNELS] = [0.05, 0.15, 0.40];

/// Sensitivity weight for opponent channel `channel` at DCT frequency
/// `(u, v)`.
#[inline]
pub fn frequency_weight(channel: usize, u: usize, v: usize) -> f64 {
    CHANNEL_BASE[channel] * (-CHANNEL_FALLOFF[channel] * (u + v) as f64).exp()
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

/// Nonnegative per-block error values aligned to the luma block grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    pub blocks_w: usize,
    pub blocks_h: usize,
    values: Vec<f64>,
}

impl DistanceMap {
    /// Wraps raw per-block values; mainly for tests and tools.
    pub fn from_values(blocks_w: usize, blocks_h: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), blocks_w * blocks_h);
        Self {
            blocks_w,
            blocks_h,
            values,
        }
    }

    #[inline]
    pub fn get(&self, bx: usize, by: usize) -> f64 {
        self.values[by * self.blocks_w + bx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Maximum entry of the map: the image is only as good as its worst block.
pub fn global_distance(map: &DistanceMap) -> f64 {
    map.values.iter().copied().fold(0.0, f64::max)
}

/// Computes the error map with masks derived from `reference`.
pub fn distance_map(
    reference: &RgbImage,
    candidate: &RgbImage,
) -> Result<DistanceMap, MetricError> {
    let masks = compute_masks(&opponent_transform(reference));
    distance_map_with_masks(reference, candidate, &masks)
}

/// Computes the error map against precomputed masks. The optimizer uses
/// this to reuse one reference mask set across every candidate.
pub fn distance_map_with_masks(
    reference: &RgbImage,
    candidate: &RgbImage,
    masks: &MaskMap,
) -> Result<DistanceMap, MetricError> {
    if reference.width() != candidate.width() || reference.height() != candidate.height() {
        return Err(MetricError::DimensionMismatch(
            reference.width(),
            reference.height(),
            candidate.width(),
            candidate.height(),
        ));
    }

    let (w, h) = (reference.width() as usize, reference.height() as usize);
    let decode = srgb_decode_table();
    let slope = srgb_slope_table();

    // Per-pixel opponent differences, linear in (candidate - reference).
    let mut diff = [
        Plane::zeroed(w, h),
        Plane::zeroed(w, h),
        Plane::zeroed(w, h),
    ];
    let rs = reference.samples();
    let cs = candidate.samples();
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) * 3;
            let dr = (cs[i] as f64 - rs[i] as f64) * slope[rs[i] as usize];
            let dg = (cs[i + 1] as f64 - rs[i + 1] as f64) * slope[rs[i + 1] as usize];
            let db = (cs[i + 2] as f64 - rs[i + 2] as f64) * slope[rs[i + 2] as usize];
            let yellow = (decode[rs[i] as usize] + decode[rs[i + 1] as usize]) / 2.0;
            diff[0].set(x, y, (dr + dg + db) / 3.0);
            diff[1].set(x, y, dr - dg);
            diff[2].set(x, y, (db - (dr + dg) / 2.0) / blue_yellow_divisor(yellow));
        }
    }

    let blocks_w = w.div_ceil(8);
    let blocks_h = h.div_ceil(8);
    debug_assert_eq!((masks.blocks_w, masks.blocks_h), (blocks_w, blocks_h));

    let mut values = vec![0.0f64; blocks_w * blocks_h];
    let mut block = [0.0f64; 64];
    for by in 0..blocks_h {
        for bx in 0..blocks_w {
            let mut energy = 0.0;
            for (ch, plane) in diff.iter().enumerate() {
                plane.extract_block(bx, by, &mut block);
                let coeffs = fdct_block(&block);
                for v in 0..8 {
                    for u in 0..8 {
                        let weighted = coeffs[v * 8 + u].abs() * frequency_weight(ch, u, v)
                            / masks.entry(band_of(u, v), ch, bx, by);
                        energy += weighted * weighted;
                    }
                }
            }
            values[by * blocks_w + bx] = energy.sqrt() * OUTPUT_SCALE;
        }
    }

    Ok(DistanceMap {
        blocks_w,
        blocks_h,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_images_have_zero_map() {
        let mut img = RgbImage::filled(16, 16, [120, 60, 200]);
        img.set_pixel(3, 3, [0, 255, 0]);
        let map = distance_map(&img, &img).unwrap();
        assert!(map.values().iter().all(|&v| v == 0.0));
        assert_eq!(global_distance(&map), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = RgbImage::filled(8, 8, [0, 0, 0]);
        let b = RgbImage::filled(8, 9, [0, 0, 0]);
        assert!(matches!(
            distance_map(&a, &b),
            Err(MetricError::DimensionMismatch(..))
        ));
    }

    #[test]
    fn global_distance_is_the_maximum() {
        let map = DistanceMap {
            blocks_w: 3,
            blocks_h: 1,
            values: vec![0.1, 0.9, 0.4],
        };
        assert_eq!(global_distance(&map), 0.9);
        let permuted = DistanceMap {
            blocks_w: 3,
            blocks_h: 1,
            values: vec![0.4, 0.1, 0.9],
        };
        assert_eq!(global_distance(&permuted), global_distance(&map));
        let zero = DistanceMap {
            blocks_w: 1,
            blocks_h: 1,
            values: vec![0.0],
        };
        assert_eq!(global_distance(&zero), 0.0);
    }

    #[test]
    fn weights_fall_with_frequency_and_fastest_in_blue() {
        for ch in 0..CHANNELS {
            assert!(frequency_weight(ch, 0, 0) > frequency_weight(ch, 7, 7));
        }
        assert!(frequency_weight(2, 7, 7) < frequency_weight(1, 7, 7));
        assert!(frequency_weight(2, 7, 7) < frequency_weight(0, 7, 7));
    }
}
