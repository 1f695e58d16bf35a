//! Sequential baseline JPEG codec.
//!
//! The encoder produces JFIF 1.01 baseline streams (SOI, APP0, DQT, SOF0,
//! DHT, SOS, EOI) with per-image optimized Huffman tables; the decoder
//! reads those same streams back, both as exact quantized coefficients and
//! as reconstructed pixels, so the optimizer can measure every candidate it
//! produces. Decoding arbitrary third-party JPEGs is out of scope.

pub mod bitio;
pub mod coeff;
pub mod color;
pub mod conformance;
pub mod dct;
pub mod decode;
pub mod encode;
pub mod huffman;
pub mod quant;

pub use coeff::{CoeffBlock, CoeffImage, ComponentGrid};
pub use color::{rgb_to_yuv, yuv_to_rgb, Sampling, YuvPlanes};
pub use conformance::{conformance_check, ConformanceReport};
pub use dct::{fdct_block, idct_block};
pub use decode::{decode, reconstruct_pixels, DecodeError};
pub use encode::{encode_image, entropy_encode, EncodeError, EncodedJpeg};
pub use quant::{dequantize_block, quantize_block, QuantTable};
