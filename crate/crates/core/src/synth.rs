//! Deterministic synthetic test images.
//!
//! Test and benchmark harnesses need photograph-like content with smooth
//! regions, texture, and edges, reproducible from a seed. The generators
//! here are not meant to be pretty, only to exercise the same code paths
//! real photos do.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::RgbImage;

/// Bilinearly interpolated lattice noise in [-1, 1].
struct ValueNoise {
    cell: usize,
    lattice_w: usize,
    values: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, width: usize, height: usize, cell: usize) -> Self {
        let lattice_w = width / cell + 2;
        let lattice_h = height / cell + 2;
        let values = (0..lattice_w * lattice_h)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect();
        Self {
            cell,
            lattice_w,
            values,
        }
    }

    fn smoothstep(t: f64) -> f64 {
        t * t * (3.0 - 2.0 * t)
    }

    fn sample(&self, x: usize, y: usize) -> f64 {
        let fx = x as f64 / self.cell as f64;
        let fy = y as f64 / self.cell as f64;
        let (ix, iy) = (fx as usize, fy as usize);
        let (tx, ty) = (Self::smoothstep(fx - ix as f64), Self::smoothstep(fy - iy as f64));
        let at = |gx: usize, gy: usize| self.values[gy * self.lattice_w + gx];
        let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
        let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

/// Photograph-like test image: a sky-to-ground gradient, several octaves of
/// value noise with distinct per-channel weights, a high-texture band, and
/// a few hard-edged shapes.
pub fn synthetic_photo(width: u32, height: u32, seed: u64) -> RgbImage {
    let (w, h) = (width as usize, height as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Per-seed palette for the vertical gradient.
    let top: [f64; 3] = [
        rng.gen_range(90.0..190.0),
        rng.gen_range(120.0..200.0),
        rng.gen_range(160.0..240.0),
    ];
    let bottom: [f64; 3] = [
        rng.gen_range(40.0..120.0),
        rng.gen_range(60.0..140.0),
        rng.gen_range(20.0..90.0),
    ];

    let octaves = [
        (ValueNoise::new(&mut rng, w, h, 64.max(w / 8)), 26.0),
        (ValueNoise::new(&mut rng, w, h, 16), 12.0),
        (ValueNoise::new(&mut rng, w, h, 4), 6.0),
    ];
    // Fine texture concentrated in a horizontal band, to give the masking
    // model something to chew on.
    let texture = ValueNoise::new(&mut rng, w, h, 1.max(2));
    let band_top = h / 2;
    let band_bottom = (3 * h) / 4;

    // Hard-edged rectangles.
    let mut rects = Vec::new();
    for _ in 0..4 {
        let rw = rng.gen_range(w / 10..w / 3).max(2);
        let rh = rng.gen_range(h / 10..h / 3).max(2);
        let rx = rng.gen_range(0..w.saturating_sub(rw).max(1));
        let ry = rng.gen_range(0..h.saturating_sub(rh).max(1));
        let color: [f64; 3] = [
            rng.gen_range(0.0..255.0),
            rng.gen_range(0.0..255.0),
            rng.gen_range(0.0..255.0),
        ];
        let alpha = rng.gen_range(0.35..0.9);
        rects.push((rx, ry, rw, rh, color, alpha));
    }

    let mut samples = vec![0u8; w * h * 3];
    for y in 0..h {
        let t = y as f64 / (h.max(2) - 1) as f64;
        for x in 0..w {
            let mut px = [0.0f64; 3];
            for c in 0..3 {
                px[c] = top[c] * (1.0 - t) + bottom[c] * t;
            }
            for (noise, amp) in &octaves {
                let n = noise.sample(x, y);
                px[0] += n * amp;
                px[1] += n * amp * 0.8;
                px[2] += n * amp * 0.6;
            }
            if (band_top..band_bottom).contains(&y) {
                let n = texture.sample(x, y) * 22.0;
                for v in &mut px {
                    *v += n;
                }
            }
            for &(rx, ry, rw, rh, color, alpha) in &rects {
                if (rx..rx + rw).contains(&x) && (ry..ry + rh).contains(&y) {
                    for c in 0..3 {
                        px[c] = px[c] * (1.0 - alpha) + color[c] * alpha;
                    }
                }
            }
            let i = (y * w + x) * 3;
            for c in 0..3 {
                samples[i + c] = px[c].round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    RgbImage::new(width, height, samples)
}

/// Uniform white noise in all channels.
pub fn white_noise(width: u32, height: u32, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![0u8; width as usize * height as usize * 3];
    rng.fill(&mut samples[..]);
    RgbImage::new(width, height, samples)
}
