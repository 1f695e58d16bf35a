//! Coefficient importance ranking and declarative zero plans.
//!
//! A zero plan holds one count per luma-grid cell: how many of the least
//! important AC coefficients to force to zero in the blocks at that cell.
//! Plans always apply against the pristine quantized image, so lowering a
//! count restores coefficients exactly. DC is never zeroed.

use crate::codec::coeff::NATURAL_TO_ZIGZAG;
use crate::codec::{CoeffImage, Sampling};
use crate::metric::{band_of, frequency_weight, Band, MaskMap};

/// Opponent channel whose sensitivity weights and masks apply to a YCbCr
/// component: Y behaves like intensity, Cb like blue-yellow, Cr like
/// red-green.
#[inline]
pub(crate) fn opponent_channel_for_component(component: usize) -> usize {
    match component {
        0 => 0,
        1 => 2,
        2 => 1,
        _ => panic!("component index out of range"),
    }
}

/// Per block, a permutation of the 63 AC coefficient indices in natural
/// order, least important first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportanceOrder {
    grids: [OrderGrid; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct OrderGrid {
    blocks_w: usize,
    blocks_h: usize,
    orders: Vec<[u8; 63]>,
}

impl ImportanceOrder {
    pub fn block_order(&self, component: usize, bx: usize, by: usize) -> &[u8; 63] {
        let g = &self.grids[component];
        &g.orders[by * g.blocks_w + bx]
    }
}

/// Per-luma-grid-cell zero counts, each in [0, 63].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPlan {
    pub blocks_w: usize,
    pub blocks_h: usize,
    counts: Vec<u8>,
}

impl ZeroPlan {
    pub fn zeros(blocks_w: usize, blocks_h: usize) -> Self {
        Self {
            blocks_w,
            blocks_h,
            counts: vec![0; blocks_w * blocks_h],
        }
    }

    #[inline]
    pub fn get(&self, bx: usize, by: usize) -> u8 {
        self.counts[by * self.blocks_w + bx]
    }

    #[inline]
    pub fn set(&mut self, bx: usize, by: usize, count: u8) {
        assert!(count <= 63);
        self.counts[by * self.blocks_w + bx] = count;
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    pub fn total_zeros(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Count applying to a block of `component` at its own grid position.
    /// Luma maps 1:1; subsampled chroma takes the minimum over the luma
    /// cells the chroma block covers.
    fn count_for(&self, coeffs: &CoeffImage, component: usize, bx: usize, by: usize) -> u8 {
        if component == 0 || coeffs.sampling == Sampling::Yuv444 {
            return self.get(bx, by);
        }
        let mut min = 63u8;
        for dy in 0..2 {
            for dx in 0..2 {
                let (lx, ly) = (2 * bx + dx, 2 * by + dy);
                if lx < self.blocks_w && ly < self.blocks_h {
                    min = min.min(self.get(lx, ly));
                }
            }
        }
        min
    }
}

/// Masks applicable to one block of one component, resolved per band.
fn block_masks(
    masks: &MaskMap,
    coeffs: &CoeffImage,
    component: usize,
    bx: usize,
    by: usize,
) -> [f64; 2] {
    let channel = opponent_channel_for_component(component);
    if component == 0 || coeffs.sampling == Sampling::Yuv444 {
        return [
            masks.entry(Band::Low, channel, bx, by),
            masks.entry(Band::High, channel, bx, by),
        ];
    }
    // Subsampled chroma: be conservative, take the smallest mask among the
    // covered luma cells.
    let mut low = f64::INFINITY;
    let mut high = f64::INFINITY;
    for dy in 0..2 {
        for dx in 0..2 {
            let (lx, ly) = (2 * bx + dx, 2 * by + dy);
            if lx < masks.blocks_w && ly < masks.blocks_h {
                low = low.min(masks.entry(Band::Low, channel, lx, ly));
                high = high.min(masks.entry(Band::High, channel, lx, ly));
            }
        }
    }
    [low, high]
}

/// Ranks each block's AC coefficients by how much the metric would care if
/// they were zeroed: dequantized magnitude times the frequency sensitivity
/// weight, divided by the applicable mask. Ties break toward higher zigzag
/// index (higher frequencies die first); already-zero coefficients score
/// zero and rank least important.
pub fn rank_coefficients(coeffs: &CoeffImage, masks: &MaskMap) -> ImportanceOrder {
    let grids = std::array::from_fn(|component| {
        let grid = &coeffs.components[component];
        let channel = opponent_channel_for_component(component);
        let quant = coeffs.quant.component(component);
        let mut orders = Vec::with_capacity(grid.blocks.len());
        for by in 0..grid.blocks_h {
            for bx in 0..grid.blocks_w {
                let block = grid.block(bx, by);
                let m = block_masks(masks, coeffs, component, bx, by);
                let mut indexed: Vec<(f64, u8)> = (1u8..64)
                    .map(|k| {
                        let (u, v) = ((k % 8) as usize, (k / 8) as usize);
                        let mask = match band_of(u, v) {
                            Band::Low => m[0],
                            Band::High => m[1],
                        };
                        let magnitude =
                            (block.coeffs[k as usize] as f64).abs() * quant[k as usize] as f64;
                        let score = magnitude * frequency_weight(channel, u, v) / mask;
                        (score, k)
                    })
                    .collect();
                indexed.sort_by(|a, b| {
                    a.0.total_cmp(&b.0).then_with(|| {
                        // Equal importance: the higher frequency goes first.
                        NATURAL_TO_ZIGZAG[b.1 as usize].cmp(&NATURAL_TO_ZIGZAG[a.1 as usize])
                    })
                });
                let mut order = [0u8; 63];
                for (slot, (_, k)) in order.iter_mut().zip(indexed) {
                    *slot = k;
                }
                orders.push(order);
            }
        }
        OrderGrid {
            blocks_w: grid.blocks_w,
            blocks_h: grid.blocks_h,
            orders,
        }
    });
    ImportanceOrder { grids }
}

/// Applies a zero plan against the pristine coefficients: per block, the
/// first `count` entries of its importance order are set to zero.
pub fn apply_zero_plan(
    coeffs: &CoeffImage,
    order: &ImportanceOrder,
    plan: &ZeroPlan,
) -> CoeffImage {
    let mut out = coeffs.clone();
    for component in 0..3 {
        let grid = &mut out.components[component];
        for by in 0..grid.blocks_h {
            for bx in 0..grid.blocks_w {
                let count = plan.count_for(coeffs, component, bx, by) as usize;
                let block_order = order.block_order(component, bx, by);
                let block = grid.block_mut(bx, by);
                for &k in &block_order[..count] {
                    block.coeffs[k as usize] = 0;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::QuantTable;
    use crate::image::RgbImage;
    use crate::metric::{compute_masks, opponent_transform};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flat_masks(blocks_w: usize, blocks_h: usize) -> MaskMap {
        let img = RgbImage::filled(blocks_w as u32 * 8, blocks_h as u32 * 8, [128, 128, 128]);
        compute_masks(&opponent_transform(&img))
    }

    fn single_block_image() -> CoeffImage {
        CoeffImage::zeroed(8, 8, Sampling::Yuv444, QuantTable::annex_k_scaled(1.0))
    }

    #[test]
    fn order_is_a_permutation_of_ac_indices() {
        let mut coeffs = single_block_image();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..64 {
            coeffs.components[0].block_mut(0, 0).coeffs[k] = rng.gen_range(-20..=20);
        }
        let order = rank_coefficients(&coeffs, &flat_masks(1, 1));
        for component in 0..3 {
            let block_order = order.block_order(component, 0, 0);
            let mut seen = [false; 64];
            for &k in block_order {
                assert!((1..64).contains(&(k as usize)), "DC or junk in order");
                assert!(!seen[k as usize], "duplicate index {k}");
                seen[k as usize] = true;
            }
        }
    }

    #[test]
    fn sole_nonzero_coefficient_ranks_most_important() {
        let mut coeffs = single_block_image();
        coeffs.components[0].block_mut(0, 0).coeffs[9] = 5;
        let order = rank_coefficients(&coeffs, &flat_masks(1, 1));
        assert_eq!(order.block_order(0, 0, 0)[62], 9);
    }

    #[test]
    fn zero_block_order_prefers_high_frequencies_first()
    {
        let coeffs = single_block_image();
        let order = rank_coefficients(&coeffs, &flat_masks(1, 1));
        let block_order = order.block_order(0, 0, 0);
        // All scores are zero, so the order is pure tie-break: descending
        // zigzag position.
        for pair in block_order.windows(2) {
            assert!(
                NATURAL_TO_ZIGZAG[pair[0] as usize] > NATURAL_TO_ZIGZAG[pair[1] as usize],
                "tie-break must fall with zigzag position"
            );
        }
        assert_eq!(block_order[0], 63);
    }

    #[test]
    fn empty_plan_is_identity_and_full_plan_clears_ac() {
        let mut coeffs = single_block_image();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for c in 0..3 {
            let block = coeffs.components[c].block_mut(0, 0);
            block.coeffs[0] = 80;
            for k in 1..64 {
                block.coeffs[k] = rng.gen_range(-30..=30);
            }
        }
        let order = rank_coefficients(&coeffs, &flat_masks(1, 1));

        let zero_plan = ZeroPlan::zeros(1, 1);
        assert_eq!(apply_zero_plan(&coeffs, &order, &zero_plan), coeffs);

        let mut full = ZeroPlan::zeros(1, 1);
        full.set(0, 0, 63);
        let cleared = apply_zero_plan(&coeffs, &order, &full);
        for c in 0..3 {
            let block = cleared.components[c].block(0, 0);
            assert_eq!(block.coeffs[0], 80, "DC must be preserved");
            assert!(block.coeffs[1..].iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn plans_are_prefix_monotone() {
        let mut coeffs = CoeffImage::zeroed(24, 16, Sampling::Yuv444, QuantTable::annex_k_scaled(1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for c in 0..3 {
            for block in &mut coeffs.components[c].blocks {
                for k in 1..64 {
                    block.coeffs[k] = rng.gen_range(-15..=15);
                }
            }
        }
        let order = rank_coefficients(&coeffs, &flat_masks(3, 2));
        let (bw, bh) = coeffs.luma_grid_dims();
        let mut small = ZeroPlan::zeros(bw, bh);
        let mut large = ZeroPlan::zeros(bw, bh);
        for by in 0..bh {
            for bx in 0..bw {
                let a = rng.gen_range(0..=40u8);
                let b = rng.gen_range(a..=63u8);
                small.set(bx, by, a);
                large.set(bx, by, b);
            }
        }
        let out_small = apply_zero_plan(&coeffs, &order, &small);
        let out_large = apply_zero_plan(&coeffs, &order, &large);
        for c in 0..3 {
            for (bs, bl) in out_small.components[c]
                .blocks
                .iter()
                .zip(out_large.components[c].blocks.iter())
            {
                for k in 0..64 {
                    if bs.coeffs[k] == 0 {
                        assert_eq!(bl.coeffs[k], 0, "zeros must be a subset");
                    }
                }
            }
        }
    }

    #[test]
    fn chroma_in_420_uses_min_count_over_covered_cells() {
        let mut coeffs =
            CoeffImage::zeroed(16, 16, Sampling::Yuv420, QuantTable::annex_k_scaled(1.0));
        // One chroma block covers the four luma cells.
        for c in 0..3 {
            for block in &mut coeffs.components[c].blocks {
                for k in 1..64 {
                    block.coeffs[k] = 3;
                }
            }
        }
        let order = rank_coefficients(&coeffs, &flat_masks(2, 2));
        let mut plan = ZeroPlan::zeros(2, 2);
        plan.set(0, 0, 10);
        plan.set(1, 0, 20);
        plan.set(0, 1, 30);
        plan.set(1, 1, 40);
        let out = apply_zero_plan(&coeffs, &order, &plan);
        let chroma_zeros = out.components[1]
            .block(0, 0)
            .coeffs[1..]
            .iter()
            .filter(|&&v| v == 0)
            .count();
        assert_eq!(chroma_zeros, 10);
    }
}
