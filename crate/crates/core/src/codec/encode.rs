//! Baseline JFIF encoder: header segments plus the interleaved entropy scan.

use super::bitio::{self, BitWriter};
use super::coeff::{CoeffBlock, CoeffImage, ZIGZAG_TO_NATURAL};
use super::color::{rgb_to_yuv, Sampling, YuvPlanes};
use super::dct::fdct_block;
use super::huffman::{EncodeTable, HuffSpec};
use super::quant::{quantize_block, QuantTable};
use crate::image::RgbImage;

/// A complete JFIF byte stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedJpeg {
    pub bytes: Vec<u8>,
}

impl EncodedJpeg {
    pub fn size(&self) -> usize {
        self.bytes.len()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("coefficient {value} at component {component} exceeds the baseline range")]
    CoefficientOutOfRange { component: usize, value: i32 },

    #[error("image dimension {0} exceeds the 16-bit frame limit")]
    DimensionTooLarge(u32),
}

/// Bit category of a value: the number of magnitude bits it needs.
#[inline]
fn category(v: i32) -> u8 {
    (32 - v.unsigned_abs().leading_zeros()) as u8
}

/// Low `cat` bits encoding `v` (one's-complement form for negatives).
#[inline]
fn value_bits(v: i32, cat: u8) -> u16 {
    if cat == 0 {
        return 0;
    }
    let mask = (1u32 << cat) - 1;
    let raw = if v < 0 { (v - 1) as u32 } else { v as u32 };
    (raw & mask) as u16
}

/// Receiver for the symbol stream of one scan; implemented by the
/// frequency-counting pass and the bit-writing pass.
trait ScanSink {
    fn put_dc(&mut self, luma: bool, cat: u8, bits: u16);
    fn put_ac(&mut self, luma: bool, symbol: u8, extra: u16, extra_len: u8);
}

struct FreqSink {
    dc: [[u64; 256]; 2],
    ac: [[u64; 256]; 2],
}

impl Default for FreqSink {
    fn default() -> Self {
        Self {
            dc: [[0; 256]; 2],
            ac: [[0; 256]; 2],
        }
    }
}

impl ScanSink for FreqSink {
    fn put_dc(&mut self, luma: bool, cat: u8, _bits: u16) {
        self.dc[usize::from(!luma)][cat as usize] += 1;
    }
    fn put_ac(&mut self, luma: bool, symbol: u8, _extra: u16, _extra_len: u8) {
        self.ac[usize::from(!luma)][symbol as usize] += 1;
    }
}

struct WriteSink<'a> {
    writer: &'a mut BitWriter,
    dc: [&'a EncodeTable; 2],
    ac: [&'a EncodeTable; 2],
}

impl ScanSink for WriteSink<'_> {
    fn put_dc(&mut self, luma: bool, cat: u8, bits: u16) {
        let (code, len) = self.dc[usize::from(!luma)].code(cat);
        self.writer.write_bits(code as u32, len as u32);
        self.writer.write_bits(bits as u32, cat as u32);
    }
    fn put_ac(&mut self, luma: bool, symbol: u8, extra: u16, extra_len: u8) {
        let (code, len) = self.ac[usize::from(!luma)].code(symbol);
        self.writer.write_bits(code as u32, len as u32);
        self.writer.write_bits(extra as u32, extra_len as u32);
    }
}

/// Emits one block's symbols; returns the block DC to feed the predictor.
fn emit_block<S: ScanSink>(
    block: &CoeffBlock,
    pred: i32,
    component: usize,
    sink: &mut S,
) -> Result<i32, EncodeError> {
    let luma = component == 0;
    let dc = block.coeffs[0] as i32;
    let diff = dc - pred;
    let cat = category(diff);
    if cat > 11 {
        return Err(EncodeError::CoefficientOutOfRange {
            component,
            value: diff,
        });
    }
    sink.put_dc(luma, cat, value_bits(diff, cat));

    let mut run = 0u8;
    for z in 1..64 {
        let v = block.coeffs[ZIGZAG_TO_NATURAL[z]] as i32;
        if v == 0 {
            run += 1;
            continue;
        }
        while run >= 16 {
            sink.put_ac(luma, 0xF0, 0, 0); // ZRL
            run -= 16;
        }
        let cat = category(v);
        if cat > 10 {
            return Err(EncodeError::CoefficientOutOfRange {
                component,
                value: v,
            });
        }
        sink.put_ac(luma, (run << 4) | cat, value_bits(v, cat), cat);
        run = 0;
    }
    if run > 0 {
        sink.put_ac(luma, 0x00, 0, 0); // EOB
    }
    Ok(dc)
}

/// Walks the interleaved scan in MCU order, feeding every symbol to `sink`.
///
/// In YUV420 mode, luma positions of an MCU that fall outside the block
/// grid are emitted as padding blocks (DC diff 0 followed by EOB); the
/// decoder drops them by the same rule.
fn walk_scan<S: ScanSink>(coeffs: &CoeffImage, sink: &mut S) -> Result<(), EncodeError> {
    let mut pred = [0i32; 3];
    match coeffs.sampling {
        Sampling::Yuv444 => {
            let (bw, bh) = coeffs.luma_grid_dims();
            for by in 0..bh {
                for bx in 0..bw {
                    for c in 0..3 {
                        pred[c] = emit_block(coeffs.components[c].block(bx, by), pred[c], c, sink)?;
                    }
                }
            }
        }
        Sampling::Yuv420 => {
            let (mw, mh) = coeffs.mcu_dims();
            let luma = &coeffs.components[0];
            for my in 0..mh {
                for mx in 0..mw {
                    for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        let (bx, by) = (2 * mx + dx, 2 * my + dy);
                        if luma.contains(bx, by) {
                            pred[0] = emit_block(luma.block(bx, by), pred[0], 0, sink)?;
                        } else {
                            sink.put_dc(true, 0, 0);
                            sink.put_ac(true, 0x00, 0, 0);
                        }
                    }
                    for c in 1..3 {
                        pred[c] = emit_block(coeffs.components[c].block(mx, my), pred[c], c, sink)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn push_segment(out: &mut Vec<u8>, marker: u8, payload: &[u8]) {
    out.push(0xFF);
    out.push(marker);
    let len = (payload.len() + 2) as u16;
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(payload);
}

fn push_app0(out: &mut Vec<u8>) {
    let payload = [
        b'J', b'F', b'I', b'F', 0, // identifier
        1, 1, // version 1.01
        0, // units: aspect ratio only
        0, 1, 0, 1, // density 1:1
        0, 0, // no thumbnail
    ];
    push_segment(out, bitio::APP0, &payload);
}

fn push_dqt(out: &mut Vec<u8>, quant: &QuantTable) {
    let merged = quant.chroma_tables_equal();
    let mut payload = Vec::new();
    let ids: &[(u8, usize)] = if merged {
        &[(0, 0), (1, 1)]
    } else {
        &[(0, 0), (1, 1), (2, 2)]
    };
    for &(id, comp) in ids {
        payload.push(id); // 8-bit precision, table id
        let table = quant.component(comp);
        for z in 0..64 {
            payload.push(table[ZIGZAG_TO_NATURAL[z]] as u8);
        }
    }
    push_segment(out, bitio::DQT, &payload);
}

fn push_sof0(out: &mut Vec<u8>, coeffs: &CoeffImage) {
    let y_sampling = match coeffs.sampling {
        Sampling::Yuv444 => 0x11,
        Sampling::Yuv420 => 0x22,
    };
    let cr_table = if coeffs.quant.chroma_tables_equal() {
        1
    } else {
        2
    };
    let mut payload = vec![8u8]; // sample precision
    payload.extend_from_slice(&(coeffs.height as u16).to_be_bytes());
    payload.extend_from_slice(&(coeffs.width as u16).to_be_bytes());
    payload.push(3);
    payload.extend_from_slice(&[1, y_sampling, 0]);
    payload.extend_from_slice(&[2, 0x11, 1]);
    payload.extend_from_slice(&[3, 0x11, cr_table]);
    push_segment(out, bitio::SOF0, &payload);
}

fn push_dht(out: &mut Vec<u8>, specs: &[(u8, u8, &HuffSpec)]) {
    let mut payload = Vec::new();
    for &(class, id, spec) in specs {
        payload.push((class << 4) | id);
        payload.extend_from_slice(&spec.bits);
        payload.extend_from_slice(&spec.values);
    }
    push_segment(out, bitio::DHT, &payload);
}

fn push_sos(out: &mut Vec<u8>) {
    let payload = [
        3, // components in scan
        1, 0x00, // Y: DC table 0, AC table 0
        2, 0x11, // Cb: DC table 1, AC table 1
        3, 0x11, // Cr
        0, 63, 0, // full spectral selection, no successive approximation
    ];
    push_segment(out, bitio::SOS, &payload);
}

/// Serializes a coefficient image as a complete sequential baseline JFIF
/// stream with per-image optimized Huffman tables.
pub fn entropy_encode(coeffs: &CoeffImage) -> Result<EncodedJpeg, EncodeError> {
    for dim in [coeffs.width, coeffs.height] {
        if dim > 0xFFFF {
            return Err(EncodeError::DimensionTooLarge(dim));
        }
    }

    // Pass 1: symbol frequencies.
    let mut freqs = FreqSink::default();
    walk_scan(coeffs, &mut freqs)?;
    let dc_luma = HuffSpec::from_frequencies(&freqs.dc[0]);
    let dc_chroma = HuffSpec::from_frequencies(&freqs.dc[1]);
    let ac_luma = HuffSpec::from_frequencies(&freqs.ac[0]);
    let ac_chroma = HuffSpec::from_frequencies(&freqs.ac[1]);

    // The frequency pass guarantees every emitted symbol has a code.
    let dc_tables = [
        dc_luma.encode_table().expect("dc luma table"),
        dc_chroma.encode_table().expect("dc chroma table"),
    ];
    let ac_tables = [
        ac_luma.encode_table().expect("ac luma table"),
        ac_chroma.encode_table().expect("ac chroma table"),
    ];

    let mut out = Vec::new();
    out.extend_from_slice(&[0xFF, bitio::SOI]);
    push_app0(&mut out);
    push_dqt(&mut out, &coeffs.quant);
    push_sof0(&mut out, coeffs);
    push_dht(
        &mut out,
        &[
            (0, 0, &dc_luma),
            (1, 0, &ac_luma),
            (0, 1, &dc_chroma),
            (1, 1, &ac_chroma),
        ],
    );
    push_sos(&mut out);

    // Pass 2: entropy-coded data.
    let mut writer = BitWriter::new();
    let mut sink = WriteSink {
        writer: &mut writer,
        dc: [&dc_tables[0], &dc_tables[1]],
        ac: [&ac_tables[0], &ac_tables[1]],
    };
    walk_scan(coeffs, &mut sink)?;
    out.extend_from_slice(&writer.finish());

    out.extend_from_slice(&[0xFF, bitio::EOI]);
    Ok(EncodedJpeg { bytes: out })
}

/// Transforms YUV planes into quantized coefficients (level shift, per-block
/// DCT, quantization), replicating edge samples into partial blocks.
pub fn quantize_planes(yuv: &YuvPlanes, quant: &QuantTable) -> CoeffImage {
    let mut out = CoeffImage::zeroed(yuv.width, yuv.height, yuv.sampling, quant.clone());
    let mut samples = [0.0f64; 64];
    for c in 0..3 {
        let plane = yuv.plane(c);
        let grid = &mut out.components[c];
        for by in 0..grid.blocks_h {
            for bx in 0..grid.blocks_w {
                plane.extract_block(bx, by, &mut samples);
                for s in &mut samples {
                    *s -= 128.0;
                }
                let dct = fdct_block(&samples);
                *grid.block_mut(bx, by) = quantize_block(&dct, quant.component(c));
            }
        }
    }
    out
}

/// Full forward encode: color transform, DCT, quantization, entropy coding.
pub fn encode_image(
    img: &RgbImage,
    quant: &QuantTable,
    sampling: Sampling,
) -> Result<(CoeffImage, EncodedJpeg), EncodeError> {
    let yuv = rgb_to_yuv(img, sampling);
    let coeffs = quantize_planes(&yuv, quant);
    let jpeg = entropy_encode(&coeffs)?;
    Ok((coeffs, jpeg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_matches_bit_length() {
        assert_eq!(category(0), 0);
        assert_eq!(category(1), 1);
        assert_eq!(category(-1), 1);
        assert_eq!(category(2), 2);
        assert_eq!(category(-3), 2);
        assert_eq!(category(1023), 10);
        assert_eq!(category(-1024), 11);
        assert_eq!(category(2047), 11);
    }

    #[test]
    fn negative_value_bits_are_ones_complement() {
        assert_eq!(value_bits(5, 3), 0b101);
        assert_eq!(value_bits(-5, 3), 0b010);
        assert_eq!(value_bits(-1, 1), 0);
        assert_eq!(value_bits(1, 1), 1);
    }

    #[test]
    fn stream_is_framed_by_soi_and_eoi() {
        let quant = QuantTable::annex_k_scaled(1.0);
        let coeffs = CoeffImage::zeroed(16, 16, Sampling::Yuv444, quant);
        let jpeg = entropy_encode(&coeffs).unwrap();
        assert_eq!(&jpeg.bytes[..2], &[0xFF, 0xD8]);
        assert_eq!(&jpeg.bytes[jpeg.bytes.len() - 2..], &[0xFF, 0xD9]);
        assert_eq!(jpeg.size(), jpeg.bytes.len());
    }

    #[test]
    fn out_of_range_coefficient_is_rejected() {
        let quant = QuantTable::annex_k_scaled(1.0);
        let mut coeffs = CoeffImage::zeroed(8, 8, Sampling::Yuv444, quant);
        coeffs.components[0].block_mut(0, 0).coeffs[5] = 2000; // category 11 AC
        let err = entropy_encode(&coeffs).unwrap_err();
        assert!(matches!(err, EncodeError::CoefficientOutOfRange { .. }));
    }

    #[test]
    fn merged_chroma_tables_emit_two_dqt_entries() {
        let quant = QuantTable::annex_k_scaled(1.0);
        let coeffs = CoeffImage::zeroed(8, 8, Sampling::Yuv444, quant);
        let jpeg = entropy_encode(&coeffs).unwrap();
        // One DQT segment: marker + len(2) + 2 * (1 + 64) payload.
        let dqt_pos = jpeg
            .bytes
            .windows(2)
            .position(|w| w == [0xFF, 0xDB])
            .unwrap();
        let len = u16::from_be_bytes([jpeg.bytes[dqt_pos + 2], jpeg.bytes[dqt_pos + 3]]);
        assert_eq!(len, 2 + 2 * 65);

        let mut tables = QuantTable::annex_k_scaled(1.0).component(0).to_owned();
        tables[0] = 99; // make Cr differ from Cb
        let distinct = QuantTable::new([
            *QuantTable::annex_k_scaled(1.0).component(0),
            *QuantTable::annex_k_scaled(1.0).component(1),
            tables,
        ]);
        let coeffs = CoeffImage::zeroed(8, 8, Sampling::Yuv444, distinct);
        let jpeg = entropy_encode(&coeffs).unwrap();
        let dqt_pos = jpeg
            .bytes
            .windows(2)
            .position(|w| w == [0xFF, 0xDB])
            .unwrap();
        let len = u16::from_be_bytes([jpeg.bytes[dqt_pos + 2], jpeg.bytes[dqt_pos + 3]]);
        assert_eq!(len, 2 + 3 * 65);
    }
}
