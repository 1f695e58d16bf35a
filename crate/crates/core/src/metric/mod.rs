//! Simplified psychovisual distance metric.
//!
//! Produces a per-block perceptual error map between a reference image and
//! a candidate, and a global distance as the maximum over blocks. Three
//! behaviors of human vision drive the model: cross-channel sensitivity
//! (blue differences matter less next to strong red+green), lower spatial
//! resolution in blue, and visual masking by local activity. The numeric
//! scale is self-consistent only; scores are comparable between runs of
//! this metric, not with any external metric.

pub mod distance;
pub mod mask;
pub mod opponent;
pub mod pgm;

pub use distance::{
    distance_map, distance_map_with_masks, frequency_weight, global_distance, DistanceMap,
    MetricError,
};
pub use mask::{compute_masks, Band, MaskMap, MASK_CAP};
pub use opponent::{opponent_transform, OpponentImage};

/// Number of opponent color channels (intensity, red-green, blue-yellow).
pub const CHANNELS: usize = 3;

/// Spatial frequency band of DCT coefficient `(u, v)`.
///
/// Low covers frequency radius u + v <= 2, the high band everything else.
/// The split point is a modeling choice kept isolated here; nothing else
/// in the crate hardcodes it.
pub fn band_of(u: usize, v: usize) -> Band {
    if u + v <= 2 {
        Band::Low
    } else {
        Band::High
    }
}
