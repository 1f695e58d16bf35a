//! Structural conformance check for emitted streams.
//!
//! Walks the byte stream and verifies marker ordering, segment lengths,
//! quantization and Huffman table validity, and baseline constraints,
//! reporting the first violation found. Violations are report content, not
//! errors.

use super::bitio;
use super::huffman::HuffSpec;

/// Outcome of a conformance check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformanceReport {
    pub pass: bool,
    /// First violation encountered, when `pass` is false.
    pub violation: Option<String>,
}

impl ConformanceReport {
    fn ok() -> Self {
        Self {
            pass: true,
            violation: None,
        }
    }

    fn fail(msg: impl Into<String>) -> Self {
        Self {
            pass: false,
            violation: Some(msg.into()),
        }
    }
}

macro_rules! check {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return ConformanceReport::fail(format!($($msg)*));
        }
    };
}

/// Verifies that `bytes` is a well-formed sequential baseline JFIF stream
/// of the profile this crate emits.
pub fn conformance_check(bytes: &[u8]) -> ConformanceReport {
    check!(bytes.len() >= 4, "truncated: stream shorter than SOI + EOI");
    check!(
        bytes[0] == 0xFF && bytes[1] == bitio::SOI,
        "missing SOI marker"
    );

    let mut pos = 2usize;
    let mut seen_app0 = false;
    let mut seen_sof0 = false;
    let mut quant_defined = [false; 4];
    let mut dc_defined = [false; 2];
    let mut ac_defined = [false; 2];
    let mut frame_quant_ids = [0u8; 3];

    loop {
        check!(pos + 2 <= bytes.len(), "truncated: expected marker");
        check!(bytes[pos] == 0xFF, "marker prefix missing at {pos}");
        let marker = bytes[pos + 1];
        pos += 2;

        if marker == bitio::SOS {
            break;
        }
        check!(pos + 2 <= bytes.len(), "truncated: segment length");
        let len = u16::from_be_bytes([bytes[pos], bytes[pos + 1]]) as usize;
        check!(len >= 2, "segment length below 2");
        check!(pos + len <= bytes.len(), "segment overruns stream");
        let payload = &bytes[pos + 2..pos + len];
        pos += len;

        match marker {
            bitio::APP0 => {
                check!(!seen_app0, "duplicate APP0");
                check!(payload.len() >= 14, "APP0 payload too short");
                check!(&payload[..5] == b"JFIF\0", "APP0 identifier not JFIF");
                check!(payload[5] == 1 && payload[6] == 1, "JFIF version not 1.01");
                seen_app0 = true;
            }
            bitio::DQT => {
                check!(seen_app0, "DQT before APP0");
                let mut p = 0usize;
                while p < payload.len() {
                    let pq_tq = payload[p];
                    check!(pq_tq >> 4 == 0, "quant precision not 8-bit");
                    let id = (pq_tq & 0x0F) as usize;
                    check!(id <= 3, "quant table id {id} out of range");
                    check!(p + 65 <= payload.len(), "DQT table truncated");
                    for &v in &payload[p + 1..p + 65] {
                        check!(v >= 1, "quant value out of range (entry 0)");
                    }
                    quant_defined[id] = true;
                    p += 65;
                }
            }
            bitio::SOF0 => {
                check!(!seen_sof0, "duplicate SOF0");
                check!(payload.len() == 6 + 9, "SOF0 length mismatch");
                check!(payload[0] == 8, "baseline requires 8-bit precision");
                let h = u16::from_be_bytes([payload[1], payload[2]]);
                let w = u16::from_be_bytes([payload[3], payload[4]]);
                check!(w >= 1 && h >= 1, "zero frame dimension");
                check!(payload[5] == 3, "component count not 3");
                for c in 0..3 {
                    let base = 6 + c * 3;
                    check!(
                        payload[base] as usize == c + 1,
                        "component id {} not {}",
                        payload[base],
                        c + 1
                    );
                    let sampling = payload[base + 1];
                    if c == 0 {
                        check!(
                            sampling == 0x11 || sampling == 0x22,
                            "luma sampling {sampling:#04x}"
                        );
                    } else {
                        check!(sampling == 0x11, "chroma sampling {sampling:#04x}");
                    }
                    frame_quant_ids[c] = payload[base + 2];
                    check!(frame_quant_ids[c] <= 3, "quant selector out of range");
                }
                seen_sof0 = true;
            }
            bitio::DHT => {
                let mut p = 0usize;
                while p < payload.len() {
                    let tc_th = payload[p];
                    let class = tc_th >> 4;
                    let id = (tc_th & 0x0F) as usize;
                    check!(class <= 1, "huffman class {class}");
                    check!(id <= 1, "baseline allows huffman ids 0 and 1 only");
                    check!(p + 17 <= payload.len(), "DHT counts truncated");
                    let mut bits = [0u8; 16];
                    bits.copy_from_slice(&payload[p + 1..p + 17]);
                    let count: usize = bits.iter().map(|&b| b as usize).sum();
                    check!(count >= 1, "empty huffman table");
                    check!(count <= 256, "huffman table has over 256 values");
                    check!(p + 17 + count <= payload.len(), "DHT values truncated");
                    let spec = HuffSpec {
                        bits,
                        values: payload[p + 17..p + 17 + count].to_vec(),
                    };
                    check!(
                        spec.decode_table().is_ok(),
                        "huffman table not a valid prefix code (class {class} id {id})"
                    );
                    if class == 0 {
                        dc_defined[id] = true;
                    } else {
                        ac_defined[id] = true;
                    }
                    p += 17 + count;
                }
            }
            m if (0xE1..=0xEF).contains(&m) => {}
            m => {
                return ConformanceReport::fail(format!(
                    "unexpected marker {m:#04x} before scan"
                ));
            }
        }
    }

    // SOS header.
    check!(seen_sof0, "SOS before SOF0");
    check!(pos + 2 <= bytes.len(), "truncated: SOS length");
    let len = u16::from_be_bytes([bytes[pos], bytes[pos + 1]]) as usize;
    check!(pos + len <= bytes.len(), "SOS overruns stream");
    let payload = &bytes[pos + 2..pos + len];
    pos += len;
    check!(payload.len() == 1 + 6 + 3, "SOS length mismatch");
    check!(payload[0] == 3, "scan component count not 3");
    for c in 0..3 {
        check!(
            payload[1 + c * 2] as usize == c + 1,
            "scan component id mismatch"
        );
        let sel = payload[2 + c * 2];
        let (dc_id, ac_id) = ((sel >> 4) as usize, (sel & 0x0F) as usize);
        check!(dc_id <= 1 && ac_id <= 1, "scan table selector out of range");
        check!(dc_defined[dc_id], "scan references undefined DC table");
        check!(ac_defined[ac_id], "scan references undefined AC table");
        check!(
            quant_defined[frame_quant_ids[c] as usize],
            "frame references undefined quant table"
        );
    }
    check!(
        payload[7] == 0 && payload[8] == 63 && payload[9] == 0,
        "not a full-spectrum sequential scan"
    );

    // Entropy data: byte stuffing until EOI.
    loop {
        check!(pos < bytes.len(), "truncated: scan data ends without EOI");
        if bytes[pos] != 0xFF {
            pos += 1;
            continue;
        }
        check!(pos + 1 < bytes.len(), "truncated: dangling 0xFF");
        match bytes[pos + 1] {
            0x00 => pos += 2, // stuffed data byte
            m if m == bitio::EOI => {
                pos += 2;
                break;
            }
            m => {
                return ConformanceReport::fail(format!(
                    "marker {m:#04x} inside entropy data"
                ));
            }
        }
    }
    check!(pos == bytes.len(), "trailing data after EOI");

    ConformanceReport::ok()
}
