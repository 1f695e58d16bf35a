//! Visual masking: per-block multipliers that shrink the perceived error
//! in regions where the reference image itself is busy.

use super::opponent::OpponentImage;
use super::CHANNELS;
use crate::codec::dct::fdct_block;

/// Upper bound on any masking multiplier.
pub const MASK_CAP: f64 = 6.0;

/// Masking gain per opponent channel for the low-frequency model.
const GAIN_LOW: [f64; CHANNELS] = [80.0, 35.0, 75.0];

/// Masking gain per opponent channel for the high-frequency model.
const GAIN_HIGH: [f64; CHANNELS] = [80.0, 35.0, 75.0];

/// Activity below this is numeric residue of the DCT, not signal.
const ACTIVITY_FLOOR: f64 = 1e-9;

/// Spatial frequency band selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Low,
    High,
}

/// Two masking models (low and high spatial frequency), each with one mask
/// per opponent color channel, at 8x8 block granularity. Entries are always
/// in [1, MASK_CAP]; a constant image yields all-ones masks.
#[derive(Debug, Clone)]
pub struct MaskMap {
    pub blocks_w: usize,
    pub blocks_h: usize,
    low: [Vec<f64>; CHANNELS],
    high: [Vec<f64>; CHANNELS],
}

impl MaskMap {
    #[inline]
    pub fn entry(&self, band: Band, channel: usize, bx: usize, by: usize) -> f64 {
        let i = by * self.blocks_w + bx;
        match band {
            Band::Low => self.low[channel][i],
            Band::High => self.high[channel][i],
        }
    }
}

/// Computes masking multipliers from the local activity of the reference
/// image. Only the reference defines masking; candidates never do.
pub fn compute_masks(reference: &OpponentImage) -> MaskMap {
    let blocks_w = (reference.width as usize).div_ceil(8);
    let blocks_h = (reference.height as usize).div_ceil(8);
    let n = blocks_w * blocks_h;
    let mut low = [vec![1.0; n], vec![1.0; n], vec![1.0; n]];
    let mut high = [vec![1.0; n], vec![1.0; n], vec![1.0; n]];

    let mut block = [0.0f64; 64];
    for ch in 0..CHANNELS {
        let plane = reference.plane(ch);
        for by in 0..blocks_h {
            for bx in 0..blocks_w {
                plane.extract_block(bx, by, &mut block);
                let coeffs = fdct_block(&block);
                let mut total_sq = 0.0;
                let mut high_sq = 0.0;
                let mut high_n = 0usize;
                for v in 0..8 {
                    for u in 0..8 {
                        if u == 0 && v == 0 {
                            continue;
                        }
                        let e = coeffs[v * 8 + u] * coeffs[v * 8 + u];
                        total_sq += e;
                        if super::band_of(u, v) == Band::High {
                            high_sq += e;
                            high_n += 1;
                        }
                    }
                }
                let floor = |act: f64| if act < ACTIVITY_FLOOR { 0.0 } else { act };
                let act_all = floor((total_sq / 63.0).sqrt());
                let act_high = floor((high_sq / high_n as f64).sqrt());
                let i = by * blocks_w + bx;
                low[ch][i] = (1.0 + GAIN_LOW[ch] * act_all).min(MASK_CAP);
                high[ch][i] = (1.0 + GAIN_HIGH[ch] * act_high).min(MASK_CAP);
            }
        }
    }

    MaskMap {
        blocks_w,
        blocks_h,
        low,
        high,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::RgbImage;
    use crate::metric::opponent_transform;

    #[test]
    fn constant_image_yields_all_ones() {
        let img = RgbImage::filled(16, 16, [90, 140, 60]);
        let masks = compute_masks(&opponent_transform(&img));
        for ch in 0..CHANNELS {
            for by in 0..masks.blocks_h {
                for bx in 0..masks.blocks_w {
                    assert_eq!(masks.entry(Band::Low, ch, bx, by), 1.0);
                    assert_eq!(masks.entry(Band::High, ch, bx, by), 1.0);
                }
            }
        }
    }

    #[test]
    fn white_noise_hits_the_cap_everywhere() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xa5);
        let mut samples = vec![0u8; 32 * 32 * 3];
        for s in &mut samples {
            *s = rng.gen();
        }
        let img = RgbImage::new(32, 32, samples);
        let masks = compute_masks(&opponent_transform(&img));
        for ch in 0..CHANNELS {
            for by in 0..masks.blocks_h {
                for bx in 0..masks.blocks_w {
                    for band in [Band::Low, Band::High] {
                        let m = masks.entry(band, ch, bx, by);
                        assert_eq!(
                            m, MASK_CAP,
                            "channel {ch} block ({bx},{by}) {band:?} mask {m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn checkerboard_masks_exceed_flat_masks_within_one_image() {
        // Left half flat, right half checkerboard.
        let mut img = RgbImage::filled(16, 8, [128, 128, 128]);
        for y in 0..8 {
            for x in 8..16 {
                let v = if (x + y) % 2 == 0 { 88 } else { 168 };
                img.set_pixel(x, y, [v, v, v]);
            }
        }
        let masks = compute_masks(&opponent_transform(&img));
        for band in [Band::Low, Band::High] {
            let flat = masks.entry(band, 0, 0, 0);
            let busy = masks.entry(band, 0, 1, 0);
            assert!(busy > flat, "{band:?}: busy {busy} flat {flat}");
            assert_eq!(flat, 1.0);
        }
    }
}
