//! A sequential baseline JPEG encoder driven by a psychovisual distance
//! metric instead of a fixed quality knob.
//!
//! Instead of mapping a quality setting to one quantization table, the
//! encoder runs a closed-loop search against a built-in perceptual metric:
//! a global phase picks a quantization table from a predefined set, then a
//! local phase zeroes out the least important DCT coefficients per block,
//! re-measuring the perceptual distance after every adjustment. The output
//! is the smallest candidate JPEG whose distance from the original stays
//! below the target.
//!
//! The crate is organized around that loop:
//!
//! - [`codec`]: baseline JFIF encoder and the matching decoder that closes
//!   the feedback loop (color transform, DCT, quantization, Huffman coding).
//! - [`metric`]: the perceptual distance — opponent color transform,
//!   visual masking, per-block error map.
//! - [`optimizer`]: the search itself — table selection, coefficient
//!   ranking, per-block zeroing, candidate bookkeeping.
//! - [`synth`]: deterministic test-image generators used by the test and
//!   benchmark harnesses.

pub mod codec;
pub mod image;
pub mod metric;
pub mod optimizer;
pub mod synth;

pub use image::RgbImage;
