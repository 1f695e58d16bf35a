//! Debug serialization of maps as 8-bit grayscale PGM images.

use super::distance::DistanceMap;
use super::mask::{Band, MaskMap, MASK_CAP};

fn pgm_bytes(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Renders a distance map scaled so its maximum entry maps to 255.
pub fn distance_map_to_pgm(map: &DistanceMap) -> Vec<u8> {
    let max = map.values().iter().copied().fold(0.0f64, f64::max);
    let pixels: Vec<u8> = map
        .values()
        .iter()
        .map(|&v| {
            if max > 0.0 {
                (v / max * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect();
    pgm_bytes(map.blocks_w, map.blocks_h, &pixels)
}

/// Renders one mask (band x channel) on the fixed [1, MASK_CAP] scale.
pub fn mask_map_to_pgm(map: &MaskMap, band: Band, channel: usize) -> Vec<u8> {
    let mut pixels = Vec::with_capacity(map.blocks_w * map.blocks_h);
    for by in 0..map.blocks_h {
        for bx in 0..map.blocks_w {
            let m = map.entry(band, channel, bx, by);
            pixels.push((((m - 1.0) / (MASK_CAP - 1.0)) * 255.0).round() as u8);
        }
    }
    pgm_bytes(map.blocks_w, map.blocks_h, &pixels)
}
