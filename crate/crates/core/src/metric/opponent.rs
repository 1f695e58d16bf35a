//! Opponent color transform in linear light.
//!
//! sRGB code values are decoded to linear light, then mapped to an
//! intensity / red-green / blue-yellow basis. The blue-yellow channel is
//! divided by a smooth increasing function of local red+green intensity:
//! the same blue difference produces a smaller opponent response on a
//! bright yellow surround than on a dark one. Plain per-channel gamma
//! cannot express that coupling.

use std::sync::OnceLock;

use crate::image::{Plane, RgbImage};

/// Gain of the red+green term that desensitizes the blue-yellow channel.
pub(crate) const BLUE_YELLOW_DESENS: f64 = 4.0;

/// Linear-light value for each 8-bit sRGB code value.
pub(crate) fn srgb_decode_table() -> &'static [f64; 256] {
    static TABLE: OnceLock<[f64; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 256];
        for (i, v) in t.iter_mut().enumerate() {
            let c = i as f64 / 255.0;
            *v = if c <= 0.04045 {
                c / 12.92
            } else {
                ((c + 0.055) / 1.055).powf(2.4)
            };
        }
        t
    })
}

/// Derivative of linear light with respect to the 8-bit code value,
/// evaluated at each code value. This is the local sensitivity used to
/// turn code-value differences into first-order linear-light differences.
pub(crate) fn srgb_slope_table() -> &'static [f64; 256] {
    static TABLE: OnceLock<[f64; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 256];
        for (i, v) in t.iter_mut().enumerate() {
            let c = i as f64 / 255.0;
            let dcdv = 1.0 / 255.0;
            *v = if c <= 0.04045 {
                dcdv / 12.92
            } else {
                dcdv * (2.4 / 1.055) * ((c + 0.055) / 1.055).powf(1.4)
            };
        }
        t
    })
}

/// Divisor applied to the blue-yellow channel given local red+green
/// intensity in linear light.
#[inline]
pub(crate) fn blue_yellow_divisor(yellow_linear: f64) -> f64 {
    1.0 + BLUE_YELLOW_DESENS * yellow_linear
}

/// Per-pixel opponent planes: intensity-like, red-green-like,
/// blue-yellow-like.
#[derive(Debug, Clone)]
pub struct OpponentImage {
    pub width: u32,
    pub height: u32,
    planes: [Plane; 3],
}

impl OpponentImage {
    pub fn plane(&self, channel: usize) -> &Plane {
        &self.planes[channel]
    }
}

/// Transforms an sRGB image into opponent space.
pub fn opponent_transform(img: &RgbImage) -> OpponentImage {
    let decode = srgb_decode_table();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut planes = [
        Plane::zeroed(w, h),
        Plane::zeroed(w, h),
        Plane::zeroed(w, h),
    ];
    let samples = img.samples();
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) * 3;
            let r = decode[samples[i] as usize];
            let g = decode[samples[i + 1] as usize];
            let b = decode[samples[i + 2] as usize];
            let yellow = (r + g) / 2.0;
            planes[0].set(x, y, (r + g + b) / 3.0);
            planes[1].set(x, y, r - g);
            planes[2].set(x, y, (b - yellow) / blue_yellow_divisor(yellow));
        }
    }
    OpponentImage {
        width: img.width(),
        height: img.height(),
        planes,
    }
}
