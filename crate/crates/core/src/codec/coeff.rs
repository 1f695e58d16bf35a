//! Quantized DCT coefficient containers.

use super::color::{Sampling, YuvPlanes};
use super::quant::QuantTable;

/// One 8x8 block of quantized DCT coefficients in natural (row-major
/// frequency) order. Index 0 is DC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffBlock {
    pub coeffs: [i16; 64],
}

impl CoeffBlock {
    pub fn zeroed() -> Self {
        Self { coeffs: [0; 64] }
    }
}

/// Block grid of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentGrid {
    pub blocks_w: usize,
    pub blocks_h: usize,
    pub blocks: Vec<CoeffBlock>,
}

impl ComponentGrid {
    pub fn new(blocks_w: usize, blocks_h: usize) -> Self {
        Self {
            blocks_w,
            blocks_h,
            blocks: vec![CoeffBlock::zeroed(); blocks_w * blocks_h],
        }
    }

    #[inline]
    pub fn block(&self, bx: usize, by: usize) -> &CoeffBlock {
        &self.blocks[by * self.blocks_w + bx]
    }

    #[inline]
    pub fn block_mut(&mut self, bx: usize, by: usize) -> &mut CoeffBlock {
        &mut self.blocks[by * self.blocks_w + bx]
    }

    pub fn contains(&self, bx: usize, by: usize) -> bool {
        bx < self.blocks_w && by < self.blocks_h
    }
}

/// Per-component grids of quantized coefficient blocks together with the
/// quantization tables and sampling mode that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffImage {
    pub width: u32,
    pub height: u32,
    pub sampling: Sampling,
    pub quant: QuantTable,
    pub components: [ComponentGrid; 3],
}

impl CoeffImage {
    /// Allocates an all-zero coefficient image with the block-grid shape
    /// implied by the pixel dimensions and sampling mode.
    pub fn zeroed(width: u32, height: u32, sampling: Sampling, quant: QuantTable) -> Self {
        let grids = std::array::from_fn(|c| {
            let (pw, ph) = YuvPlanes::plane_dims(width, height, sampling, c);
            ComponentGrid::new(pw.div_ceil(8), ph.div_ceil(8))
        });
        Self {
            width,
            height,
            sampling,
            quant,
            components: grids,
        }
    }

    /// Luma block grid dimensions, the reference grid for distance maps and
    /// zero plans.
    pub fn luma_grid_dims(&self) -> (usize, usize) {
        (self.components[0].blocks_w, self.components[0].blocks_h)
    }

    /// Number of MCUs in one interleaved baseline scan.
    pub fn mcu_dims(&self) -> (usize, usize) {
        match self.sampling {
            Sampling::Yuv444 => self.luma_grid_dims(),
            Sampling::Yuv420 => (
                (self.width as usize).div_ceil(16),
                (self.height as usize).div_ceil(16),
            ),
        }
    }
}

/// Natural (row-major) index for each zigzag position.
pub const ZIGZAG_TO_NATURAL: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, //
    17, 24, 32, 25, 18, 11, 4, 5, //
    12, 19, 26, 33, 40, 48, 41, 34, //
    27, 20, 13, 6, 7, 14, 21, 28, //
    35, 42, 49, 56, 57, 50, 43, 36, //
    29, 22, 15, 23, 30, 37, 44, 51, //
    58, 59, 52, 45, 38, 31, 39, 46, //
    53, 60, 61, 54, 47, 55, 62, 63,
];

/// Zigzag position of each natural index; inverse of [`ZIGZAG_TO_NATURAL`].
pub const NATURAL_TO_ZIGZAG: [usize; 64] = {
    let mut inv = [0usize; 64];
    let mut z = 0;
    while z < 64 {
        inv[ZIGZAG_TO_NATURAL[z]] = z;
        z += 1;
    }
    inv
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zigzag_tables_are_inverse_permutations() {
        for z in 0..64 {
            assert_eq!(NATURAL_TO_ZIGZAG[ZIGZAG_TO_NATURAL[z]], z);
        }
        let mut seen = [false; 64];
        for &n in &ZIGZAG_TO_NATURAL {
            assert!(!seen[n]);
            seen[n] = true;
        }
    }

    #[test]
    fn zigzag_first_and_last_entries() {
        assert_eq!(ZIGZAG_TO_NATURAL[0], 0);
        assert_eq!(ZIGZAG_TO_NATURAL[1], 1);
        assert_eq!(ZIGZAG_TO_NATURAL[2], 8);
        assert_eq!(ZIGZAG_TO_NATURAL[63], 63);
    }

    #[test]
    fn grid_shapes_follow_sampling() {
        let q = QuantTable::annex_k_scaled(1.0);
        let c444 = CoeffImage::zeroed(17, 9, Sampling::Yuv444, q.clone());
        for grid in &c444.components {
            assert_eq!((grid.blocks_w, grid.blocks_h), (3, 2));
        }
        let c420 = CoeffImage::zeroed(17, 9, Sampling::Yuv420, q);
        assert_eq!(
            (c420.components[0].blocks_w, c420.components[0].blocks_h),
            (3, 2)
        );
        // Chroma planes are 9x5 -> 2x1 blocks.
        assert_eq!(
            (c420.components[1].blocks_w, c420.components[1].blocks_h),
            (2, 1)
        );
        assert_eq!(c420.mcu_dims(), (2, 1));
    }
}
