//! Decoder for streams produced by [`entropy_encode`](super::entropy_encode).
//!
//! Returns both the exact quantized coefficients and the reconstructed
//! pixels; the optimizer measures every candidate through this path.
//! Robust decoding of arbitrary third-party JPEGs is a non-goal.

use super::bitio::{self, BitReadError, BitReader};
use super::coeff::{CoeffImage, ComponentGrid, ZIGZAG_TO_NATURAL};
use super::color::{yuv_to_rgb, Sampling, YuvPlanes};
use super::dct::idct_block;
use super::huffman::{DecodeTable, HuffSpec};
use super::quant::{dequantize_block, QuantTable};
use crate::image::{Plane, RgbImage};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("marker error: {0}")]
    Marker(String),

    #[error("huffman decode failure: {0}")]
    Huffman(String),

    #[error("truncated stream")]
    Truncated,

    #[error("invalid segment: {0}")]
    Invalid(String),

    #[error("unsupported stream feature: {0}")]
    Unsupported(String),
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn u8(&mut self) -> Result<u8, DecodeError> {
        let b = *self.data.get(self.pos).ok_or(DecodeError::Truncated)?;
        self.pos += 1;
        Ok(b)
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_be_bytes([self.u8()?, self.u8()?]))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.pos + n > self.data.len() {
            return Err(DecodeError::Truncated);
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}

#[derive(Clone, Copy)]
struct FrameComponent {
    sampling: u8,
    quant_id: u8,
}

struct Frame {
    width: u16,
    height: u16,
    components: [FrameComponent; 3],
}

#[derive(Default)]
struct TableStore {
    quant: [Option<[u16; 64]>; 4],
    dc: [Option<DecodeTable>; 2],
    ac: [Option<DecodeTable>; 2],
}

fn parse_dqt(payload: &[u8], store: &mut TableStore) -> Result<(), DecodeError> {
    let mut cur = Cursor {
        data: payload,
        pos: 0,
    };
    while cur.pos < payload.len() {
        let pq_tq = cur.u8()?;
        if pq_tq >> 4 != 0 {
            return Err(DecodeError::Unsupported("16-bit quant table".into()));
        }
        let id = (pq_tq & 0x0F) as usize;
        if id > 3 {
            return Err(DecodeError::Invalid(format!("quant table id {id}")));
        }
        let raw = cur.take(64)?;
        let mut table = [0u16; 64];
        for (z, &v) in raw.iter().enumerate() {
            if v == 0 {
                return Err(DecodeError::Invalid("quant entry zero".into()));
            }
            table[ZIGZAG_TO_NATURAL[z]] = v as u16;
        }
        store.quant[id] = Some(table);
    }
    Ok(())
}

fn parse_dht(payload: &[u8], store: &mut TableStore) -> Result<(), DecodeError> {
    let mut cur = Cursor {
        data: payload,
        pos: 0,
    };
    while cur.pos < payload.len() {
        let tc_th = cur.u8()?;
        let class = tc_th >> 4;
        let id = (tc_th & 0x0F) as usize;
        if class > 1 || id > 1 {
            return Err(DecodeError::Unsupported(format!(
                "huffman table class {class} id {id}"
            )));
        }
        let mut bits = [0u8; 16];
        bits.copy_from_slice(cur.take(16)?);
        let count: usize = bits.iter().map(|&b| b as usize).sum();
        let values = cur.take(count)?.to_vec();
        let spec = HuffSpec { bits, values };
        let table = spec
            .decode_table()
            .map_err(|e| DecodeError::Huffman(format!("invalid table: {e:?}")))?;
        if class == 0 {
            store.dc[id] = Some(table);
        } else {
            store.ac[id] = Some(table);
        }
    }
    Ok(())
}

fn parse_sof0(payload: &[u8]) -> Result<Frame, DecodeError> {
    let mut cur = Cursor {
        data: payload,
        pos: 0,
    };
    if cur.u8()? != 8 {
        return Err(DecodeError::Unsupported("sample precision != 8".into()));
    }
    let height = cur.u16()?;
    let width = cur.u16()?;
    if width == 0 || height == 0 {
        return Err(DecodeError::Invalid("zero frame dimension".into()));
    }
    if cur.u8()? != 3 {
        return Err(DecodeError::Unsupported("component count != 3".into()));
    }
    let mut components = [FrameComponent {
        sampling: 0,
        quant_id: 0,
    }; 3];
    for (i, comp) in components.iter_mut().enumerate() {
        let id = cur.u8()?;
        if id as usize != i + 1 {
            return Err(DecodeError::Invalid(format!("component id {id}")));
        }
        comp.sampling = cur.u8()?;
        comp.quant_id = cur.u8()?;
    }
    match (
        components[0].sampling,
        components[1].sampling,
        components[2].sampling,
    ) {
        (0x11, 0x11, 0x11) | (0x22, 0x11, 0x11) => {}
        _ => return Err(DecodeError::Unsupported("sampling layout".into())),
    }
    Ok(Frame {
        width,
        height,
        components,
    })
}

#[inline]
fn extend(bits: u32, cat: u8) -> i32 {
    if cat == 0 {
        return 0;
    }
    if bits < (1 << (cat - 1)) {
        bits as i32 - (1 << cat) + 1
    } else {
        bits as i32
    }
}

fn map_bit_err(e: BitReadError) -> DecodeError {
    match e {
        BitReadError::OutOfData => DecodeError::Truncated,
        BitReadError::MarkerReached(_) => DecodeError::Truncated,
    }
}

fn decode_block(
    reader: &mut BitReader,
    dc_table: &DecodeTable,
    ac_table: &DecodeTable,
    pred: i32,
) -> Result<[i16; 64], DecodeError> {
    let mut coeffs = [0i16; 64];
    let cat = dc_table.decode_symbol(reader).map_err(map_bit_err)?;
    if cat > 11 {
        return Err(DecodeError::Huffman(format!("dc category {cat}")));
    }
    let bits = reader.read_bits(cat as u32).map_err(map_bit_err)?;
    let dc = pred + extend(bits, cat);
    if !(-2048..=2047).contains(&dc) {
        return Err(DecodeError::Huffman(format!("dc value {dc} out of range")));
    }
    coeffs[0] = dc as i16;

    let mut z = 1usize;
    while z < 64 {
        let symbol = ac_table.decode_symbol(reader).map_err(map_bit_err)?;
        let run = (symbol >> 4) as usize;
        let cat = symbol & 0x0F;
        if cat == 0 {
            if run == 15 {
                z += 16; // ZRL
                continue;
            }
            break; // EOB
        }
        z += run;
        if z > 63 {
            return Err(DecodeError::Huffman("zero run past block end".into()));
        }
        if cat > 10 {
            return Err(DecodeError::Huffman(format!("ac category {cat}")));
        }
        let bits = reader.read_bits(cat as u32).map_err(map_bit_err)?;
        coeffs[ZIGZAG_TO_NATURAL[z]] = extend(bits, cat) as i16;
        z += 1;
    }
    Ok(coeffs)
}

/// Decodes a stream produced by this crate's encoder, returning the exact
/// coefficient image and the fully reconstructed pixels.
pub fn decode(bytes: &[u8]) -> Result<(CoeffImage, RgbImage), DecodeError> {
    let mut cur = Cursor {
        data: bytes,
        pos: 0,
    };
    if cur.u8()? != 0xFF || cur.u8()? != bitio::SOI {
        return Err(DecodeError::Marker("missing SOI".into()));
    }

    let mut store = TableStore::default();
    let mut frame: Option<Frame> = None;

    loop {
        if cur.u8()? != 0xFF {
            return Err(DecodeError::Marker("expected marker prefix".into()));
        }
        let marker = cur.u8()?;
        match marker {
            m if (0xE0..=0xEF).contains(&m) => {
                let len = cur.u16()? as usize;
                if len < 2 {
                    return Err(DecodeError::Invalid("segment length".into()));
                }
                cur.take(len - 2)?;
            }
            bitio::DQT => {
                let len = cur.u16()? as usize;
                parse_dqt(cur.take(len - 2)?, &mut store)?;
            }
            bitio::DHT => {
                let len = cur.u16()? as usize;
                parse_dht(cur.take(len - 2)?, &mut store)?;
            }
            bitio::SOF0 => {
                let len = cur.u16()? as usize;
                frame = Some(parse_sof0(cur.take(len - 2)?)?);
            }
            bitio::SOS => {
                let len = cur.u16()? as usize;
                let payload = cur.take(len - 2)?;
                let frame = frame
                    .take()
                    .ok_or_else(|| DecodeError::Marker("SOS before SOF0".into()))?;
                return decode_scan(&frame, payload, &store, &cur.data[cur.pos..]);
            }
            bitio::EOI => {
                return Err(DecodeError::Marker("EOI before scan".into()));
            }
            m if (0xC0..=0xCF).contains(&m) => {
                return Err(DecodeError::Unsupported(format!(
                    "frame type {m:#04x} is not sequential baseline"
                )));
            }
            m => {
                return Err(DecodeError::Marker(format!("unexpected marker {m:#04x}")));
            }
        }
    }
}

fn decode_scan(
    frame: &Frame,
    sos_payload: &[u8],
    store: &TableStore,
    entropy: &[u8],
) -> Result<(CoeffImage, RgbImage), DecodeError> {
    let mut cur = Cursor {
        data: sos_payload,
        pos: 0,
    };
    if cur.u8()? != 3 {
        return Err(DecodeError::Unsupported("scan component count".into()));
    }
    let mut selectors = [(0u8, 0u8); 3];
    for (i, sel) in selectors.iter_mut().enumerate() {
        let id = cur.u8()?;
        if id as usize != i + 1 {
            return Err(DecodeError::Invalid(format!("scan component id {id}")));
        }
        let tables = cur.u8()?;
        *sel = (tables >> 4, tables & 0x0F);
    }
    if cur.take(3)? != [0, 63, 0] {
        return Err(DecodeError::Unsupported("spectral selection".into()));
    }

    let sampling = if frame.components[0].sampling == 0x22 {
        Sampling::Yuv420
    } else {
        Sampling::Yuv444
    };

    let quant_tables: [[u16; 64]; 3] = {
        let mut t = [[0u16; 64]; 3];
        for (c, slot) in t.iter_mut().enumerate() {
            let id = frame.components[c].quant_id as usize;
            *slot = store.quant[id]
                .ok_or_else(|| DecodeError::Invalid(format!("quant table {id} undefined")))?;
        }
        t
    };
    let quant = QuantTable::new(quant_tables);

    let mut coeffs = CoeffImage::zeroed(frame.width as u32, frame.height as u32, sampling, quant);

    let dc_for = |c: usize| -> Result<&DecodeTable, DecodeError> {
        let id = selectors[c].0 as usize;
        store.dc.get(id).and_then(|t| t.as_ref()).ok_or_else(|| {
            DecodeError::Invalid(format!("dc table {id} undefined"))
        })
    };
    let ac_for = |c: usize| -> Result<&DecodeTable, DecodeError> {
        let id = selectors[c].1 as usize;
        store.ac.get(id).and_then(|t| t.as_ref()).ok_or_else(|| {
            DecodeError::Invalid(format!("ac table {id} undefined"))
        })
    };

    let mut reader = BitReader::new(entropy);
    let mut pred = [0i32; 3];

    match sampling {
        Sampling::Yuv444 => {
            let (bw, bh) = coeffs.luma_grid_dims();
            for by in 0..bh {
                for bx in 0..bw {
                    for c in 0..3 {
                        let block = decode_block(&mut reader, dc_for(c)?, ac_for(c)?, pred[c])?;
                        pred[c] = block[0] as i32;
                        coeffs.components[c].block_mut(bx, by).coeffs = block;
                    }
                }
            }
        }
        Sampling::Yuv420 => {
            let (mw, mh) = coeffs.mcu_dims();
            for my in 0..mh {
                for mx in 0..mw {
                    for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        let (bx, by) = (2 * mx + dx, 2 * my + dy);
                        let block = decode_block(&mut reader, dc_for(0)?, ac_for(0)?, pred[0])?;
                        pred[0] = block[0] as i32;
                        if coeffs.components[0].contains(bx, by) {
                            coeffs.components[0].block_mut(bx, by).coeffs = block;
                        }
                    }
                    for c in 1..3 {
                        let block = decode_block(&mut reader, dc_for(c)?, ac_for(c)?, pred[c])?;
                        pred[c] = block[0] as i32;
                        coeffs.components[c].block_mut(mx, my).coeffs = block;
                    }
                }
            }
        }
    }

    // The scan must end cleanly at EOI.
    reader.align_to_byte();
    let rest = &entropy[reader.consumed()..];
    if rest.len() < 2 || rest[0] != 0xFF || rest[1] != bitio::EOI {
        return Err(DecodeError::Truncated);
    }

    let pixels = reconstruct_pixels(&coeffs);
    Ok((coeffs, pixels))
}

/// Rebuilds pixels from quantized coefficients: dequantize, inverse DCT,
/// level shift and clamp, chroma upsample, color convert.
pub fn reconstruct_pixels(coeffs: &CoeffImage) -> RgbImage {
    let mut planes = Vec::with_capacity(3);
    for c in 0..3 {
        let (pw, ph) = YuvPlanes::plane_dims(coeffs.width, coeffs.height, coeffs.sampling, c);
        let grid: &ComponentGrid = &coeffs.components[c];
        let mut plane = Plane::zeroed(pw, ph);
        for by in 0..grid.blocks_h {
            for bx in 0..grid.blocks_w {
                let real = dequantize_block(grid.block(bx, by), coeffs.quant.component(c));
                let spatial = idct_block(&real);
                for dy in 0..8 {
                    let py = by * 8 + dy;
                    if py >= ph {
                        break;
                    }
                    for dx in 0..8 {
                        let px = bx * 8 + dx;
                        if px >= pw {
                            break;
                        }
                        plane.set(px, py, (spatial[dy * 8 + dx] + 128.0).clamp(0.0, 255.0));
                    }
                }
            }
        }
        planes.push(plane);
    }
    let cr = planes.pop().unwrap();
    let cb = planes.pop().unwrap();
    let y = planes.pop().unwrap();
    yuv_to_rgb(&YuvPlanes {
        width: coeffs.width,
        height: coeffs.height,
        sampling: coeffs.sampling,
        y,
        cb,
        cr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode::entropy_encode;

    #[test]
    fn corrupted_soi_is_a_marker_error() {
        let quant = QuantTable::annex_k_scaled(1.0);
        let coeffs = CoeffImage::zeroed(8, 8, Sampling::Yuv444, quant);
        let mut bytes = entropy_encode(&coeffs).unwrap().bytes;
        bytes[1] = 0xD0;
        assert!(matches!(decode(&bytes), Err(DecodeError::Marker(_))));
    }

    #[test]
    fn truncated_stream_is_detected() {
        let quant = QuantTable::annex_k_scaled(1.0);
        let mut coeffs = CoeffImage::zeroed(24, 24, Sampling::Yuv444, quant);
        for b in &mut coeffs.components[0].blocks {
            b.coeffs[0] = 50;
            b.coeffs[9] = -3;
        }
        let bytes = entropy_encode(&coeffs).unwrap().bytes;
        let cut = &bytes[..bytes.len() - 4];
        assert_eq!(decode(cut), Err(DecodeError::Truncated));
    }

    #[test]
    fn extend_matches_value_bit_convention() {
        assert_eq!(extend(0b101, 3), 5);
        assert_eq!(extend(0b010, 3), -5);
        assert_eq!(extend(0, 1), -1);
        assert_eq!(extend(1, 1), 1);
        assert_eq!(extend(0, 0), 0);
    }

    #[test]
    fn zero_coefficients_round_trip_to_flat_gray() {
        let quant = QuantTable::annex_k_scaled(1.0);
        let coeffs = CoeffImage::zeroed(8, 8, Sampling::Yuv444, quant);
        let bytes = entropy_encode(&coeffs).unwrap().bytes;
        let (decoded, pixels) = decode(&bytes).unwrap();
        assert_eq!(decoded, coeffs);
        assert_eq!(pixels.pixel(3, 3), [128, 128, 128]);
    }
}
