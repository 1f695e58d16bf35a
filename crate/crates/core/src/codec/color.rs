//! BT.601 full-range (JFIF) color transform and chroma resampling.

use crate::image::{Plane, RgbImage};

/// Chroma sampling mode of an encode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Full-resolution chroma.
    Yuv444,
    /// Chroma downsampled 2x2 relative to luma.
    Yuv420,
}

/// Real-valued Y/Cb/Cr planes, full-range JFIF convention (nominal [0,255]).
#[derive(Debug, Clone)]
pub struct YuvPlanes {
    pub width: u32,
    pub height: u32,
    pub sampling: Sampling,
    pub y: Plane,
    pub cb: Plane,
    pub cr: Plane,
}

impl YuvPlanes {
    /// Plane dimensions for component `c` (0 = Y, 1 = Cb, 2 = Cr).
    pub fn plane_dims(width: u32, height: u32, sampling: Sampling, c: usize) -> (usize, usize) {
        let (w, h) = (width as usize, height as usize);
        if c == 0 || sampling == Sampling::Yuv444 {
            (w, h)
        } else {
            (w.div_ceil(2), h.div_ceil(2))
        }
    }

    pub fn plane(&self, c: usize) -> &Plane {
        match c {
            0 => &self.y,
            1 => &self.cb,
            2 => &self.cr,
            _ => panic!("component index out of range"),
        }
    }
}

#[inline]
fn clamp255(v: f64) -> f64 {
    v.clamp(0.0, 255.0)
}

/// Converts interleaved sRGB to full-range BT.601 YCbCr planes.
///
/// In [`Sampling::Yuv420`] mode the chroma planes are 2x2 box-filter
/// downsampled after conversion.
pub fn rgb_to_yuv(img: &RgbImage, sampling: Sampling) -> YuvPlanes {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut y = Plane::zeroed(w, h);
    let mut cb_full = Plane::zeroed(w, h);
    let mut cr_full = Plane::zeroed(w, h);

    let samples = img.samples();
    for py in 0..h {
        for px in 0..w {
            let i = (py * w + px) * 3;
            let r = samples[i] as f64;
            let g = samples[i + 1] as f64;
            let b = samples[i + 2] as f64;
            y.set(px, py, clamp255(0.299 * r + 0.587 * g + 0.114 * b));
            cb_full.set(
                px,
                py,
                clamp255(-0.168735892 * r - 0.331264108 * g + 0.5 * b + 128.0),
            );
            cr_full.set(
                px,
                py,
                clamp255(0.5 * r - 0.418687589 * g - 0.081312411 * b + 128.0),
            );
        }
    }

    let (cb, cr) = match sampling {
        Sampling::Yuv444 => (cb_full, cr_full),
        Sampling::Yuv420 => (box_downsample_2x2(&cb_full), box_downsample_2x2(&cr_full)),
    };

    YuvPlanes {
        width: img.width(),
        height: img.height(),
        sampling,
        y,
        cb,
        cr,
    }
}

/// Converts YCbCr planes back to interleaved sRGB, clamping to [0,255].
///
/// Subsampled chroma is upsampled by sample replication first.
pub fn yuv_to_rgb(planes: &YuvPlanes) -> RgbImage {
    let (w, h) = (planes.width as usize, planes.height as usize);
    let (cb, cr) = match planes.sampling {
        Sampling::Yuv444 => (planes.cb.clone(), planes.cr.clone()),
        Sampling::Yuv420 => (
            replicate_upsample(&planes.cb, w, h),
            replicate_upsample(&planes.cr, w, h),
        ),
    };

    let mut samples = vec![0u8; w * h * 3];
    for py in 0..h {
        for px in 0..w {
            let yv = planes.y.get(px, py);
            let cbv = cb.get(px, py) - 128.0;
            let crv = cr.get(px, py) - 128.0;
            let r = clamp255(yv + 1.402 * crv).round();
            let g = clamp255(yv - 0.344136286 * cbv - 0.714136286 * crv).round();
            let b = clamp255(yv + 1.772 * cbv).round();
            let i = (py * w + px) * 3;
            samples[i] = r as u8;
            samples[i + 1] = g as u8;
            samples[i + 2] = b as u8;
        }
    }
    RgbImage::new(planes.width, planes.height, samples)
}

/// 2x2 box-filter downsample with edge replication for odd dimensions.
fn box_downsample_2x2(src: &Plane) -> Plane {
    let dw = src.width().div_ceil(2);
    let dh = src.height().div_ceil(2);
    let mut dst = Plane::zeroed(dw, dh);
    for y in 0..dh {
        for x in 0..dw {
            let sum = src.get_clamped(2 * x, 2 * y)
                + src.get_clamped(2 * x + 1, 2 * y)
                + src.get_clamped(2 * x, 2 * y + 1)
                + src.get_clamped(2 * x + 1, 2 * y + 1);
            dst.set(x, y, sum / 4.0);
        }
    }
    dst
}

/// Nearest-neighbor upsample to `(w, h)`.
fn replicate_upsample(src: &Plane, w: usize, h: usize) -> Plane {
    let mut dst = Plane::zeroed(w, h);
    for y in 0..h {
        for x in 0..w {
            dst.set(x, y, src.get_clamped(x / 2, y / 2));
        }
    }
    dst
}
