//! Per-image optimized Huffman tables.
//!
//! Code lengths are derived from symbol frequencies with the classic
//! two-pass baseline procedure: pairwise merging with a reserved
//! pseudo-symbol (which guarantees the all-ones code is never assigned to a
//! real symbol), followed by redistribution of lengths above 16.

/// BITS/HUFFVAL representation of one table, as stored in a DHT segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffSpec {
    /// `bits[l]` = number of codes of length `l + 1`, l in 0..16.
    pub bits: [u8; 16],
    /// Symbol values ordered by increasing code length.
    pub values: Vec<u8>,
}

/// Encoder-side lookup: symbol -> (code, length).
#[derive(Debug, Clone)]
pub struct EncodeTable {
    codes: [u16; 256],
    lengths: [u8; 256],
}

impl EncodeTable {
    #[inline]
    pub fn code(&self, symbol: u8) -> (u16, u8) {
        let len = self.lengths[symbol as usize];
        debug_assert!(len > 0, "symbol {symbol:#04x} has no code");
        (self.codes[symbol as usize], len)
    }

    pub fn has_code(&self, symbol: u8) -> bool {
        self.lengths[symbol as usize] > 0
    }
}

/// Decoder-side canonical lookup (MINCODE/MAXCODE/VALPTR form).
#[derive(Debug, Clone)]
pub struct DecodeTable {
    min_code: [i32; 17],
    max_code: [i32; 17],
    val_ptr: [usize; 17],
    values: Vec<u8>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum HuffError {
    /// Sum of BITS counts exceeds what a prefix code can hold.
    Overfull,
    /// A real symbol would receive the all-ones code.
    AllOnesCode,
    /// More than 256 symbol values.
    TooManyValues,
}

/// Assigns canonical codes for a BITS table. Returns per-length first codes
/// or an error when the table cannot form a valid baseline prefix code.
fn canonical_codes(bits: &[u8; 16]) -> Result<Vec<(u8, u16)>, HuffError> {
    // (length, code) for each symbol slot in HUFFVAL order.
    let mut out = Vec::new();
    let mut code: u32 = 0;
    for (i, &count) in bits.iter().enumerate() {
        let len = (i + 1) as u8;
        for _ in 0..count {
            if code >= (1u32 << len) {
                return Err(HuffError::Overfull);
            }
            out.push((len, code as u16));
            code += 1;
        }
        code <<= 1;
    }
    if out.len() > 256 {
        return Err(HuffError::TooManyValues);
    }
    // The all-ones pattern is reserved so that padding bits can never form
    // a valid code.
    if let Some(&(len, code)) = out.last() {
        if u32::from(code) == (1u32 << len) - 1 {
            return Err(HuffError::AllOnesCode);
        }
    }
    Ok(out)
}

impl HuffSpec {
    /// Builds optimal code lengths from symbol frequencies.
    ///
    /// `freqs` must have 256 entries; symbols with zero frequency get no
    /// code. At least one symbol must be used.
    pub fn from_frequencies(freqs: &[u64; 256]) -> Self {
        // Working arrays sized 257: index 256 is the reserved symbol.
        let mut freq = [0i64; 257];
        for (i, &f) in freqs.iter().enumerate() {
            freq[i] = f as i64;
        }
        freq[256] = 1;

        let mut code_size = [0u32; 257];
        let mut others = [-1i32; 257];

        loop {
            // Two least-frequent nonzero entries; ties prefer the larger
            // symbol value, matching the usual baseline procedure.
            let mut c1: i32 = -1;
            let mut v = i64::MAX;
            for (i, &f) in freq.iter().enumerate() {
                if f != 0 && f <= v {
                    v = f;
                    c1 = i as i32;
                }
            }
            let mut c2: i32 = -1;
            v = i64::MAX;
            for (i, &f) in freq.iter().enumerate() {
                if f != 0 && f <= v && i as i32 != c1 {
                    v = f;
                    c2 = i as i32;
                }
            }
            if c2 < 0 {
                break;
            }

            freq[c1 as usize] += freq[c2 as usize];
            freq[c2 as usize] = 0;

            code_size[c1 as usize] += 1;
            let mut i = c1;
            while others[i as usize] >= 0 {
                i = others[i as usize];
                code_size[i as usize] += 1;
            }
            others[i as usize] = c2;
            code_size[c2 as usize] += 1;
            let mut i = c2;
            while others[i as usize] >= 0 {
                i = others[i as usize];
                code_size[i as usize] += 1;
            }
        }

        // Histogram of code sizes. Depth is bounded by the symbol count
        // (257 including the reserved one), so no clamping is needed.
        let mut counts = [0i32; 258];
        for &s in code_size.iter() {
            if s > 0 {
                counts[s as usize] += 1;
            }
        }

        // Push lengths above 16 back down (Annex K.3 adjustment).
        let mut i = 257;
        while i > 16 {
            while counts[i] > 0 {
                let mut j = i - 2;
                while counts[j] == 0 {
                    j -= 1;
                }
                counts[i] -= 2;
                counts[i - 1] += 1;
                counts[j + 1] += 2;
                counts[j] -= 1;
            }
            i -= 1;
        }
        // Drop the reserved symbol's slot from the longest used length.
        let mut i = 16;
        while counts[i] == 0 {
            i -= 1;
        }
        counts[i] -= 1;

        let mut bits = [0u8; 16];
        for l in 1..=16 {
            bits[l - 1] = counts[l] as u8;
        }

        // HUFFVAL: symbols sorted by (code size, symbol value); the
        // reserved symbol 256 sorts last and is excluded.
        let mut order: Vec<usize> = (0..256).filter(|&s| code_size[s] > 0).collect();
        order.sort_by_key(|&s| (code_size[s], s));
        let values = order.into_iter().map(|s| s as u8).collect();

        Self { bits, values }
    }

    pub fn encode_table(&self) -> Result<EncodeTable, HuffError> {
        let slots = canonical_codes(&self.bits)?;
        if slots.len() != self.values.len() {
            return Err(HuffError::Overfull);
        }
        let mut codes = [0u16; 256];
        let mut lengths = [0u8; 256];
        for (&value, &(len, code)) in self.values.iter().zip(slots.iter()) {
            codes[value as usize] = code;
            lengths[value as usize] = len;
        }
        Ok(EncodeTable { codes, lengths })
    }

    pub fn decode_table(&self) -> Result<DecodeTable, HuffError> {
        let slots = canonical_codes(&self.bits)?;
        if slots.len() != self.values.len() {
            return Err(HuffError::Overfull);
        }
        let mut min_code = [0i32; 17];
        let mut max_code = [-1i32; 17];
        let mut val_ptr = [0usize; 17];
        let mut idx = 0usize;
        for len in 1..=16u8 {
            let count = self.bits[len as usize - 1] as usize;
            if count == 0 {
                max_code[len as usize] = -1;
                continue;
            }
            val_ptr[len as usize] = idx;
            min_code[len as usize] = slots[idx].1 as i32;
            idx += count;
            max_code[len as usize] = slots[idx - 1].1 as i32;
        }
        Ok(DecodeTable {
            min_code,
            max_code,
            val_ptr,
            values: self.values.clone(),
        })
    }
}

impl DecodeTable {
    /// Reads one symbol from the bit reader.
    pub fn decode_symbol(
        &self,
        reader: &mut super::bitio::BitReader,
    ) -> Result<u8, super::bitio::BitReadError> {
        let mut code: i32 = 0;
        for len in 1..=16usize {
            code = (code << 1) | self.read_one(reader)? as i32;
            if self.max_code[len] >= 0 && code <= self.max_code[len] {
                let offset = (code - self.min_code[len]) as usize;
                return Ok(self.values[self.val_ptr[len] + offset]);
            }
        }
        // No code matched within 16 bits; surface as marker-free corruption.
        Err(super::bitio::BitReadError::OutOfData)
    }

    #[inline]
    fn read_one(
        &self,
        reader: &mut super::bitio::BitReader,
    ) -> Result<u32, super::bitio::BitReadError> {
        reader.read_bit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::bitio::{BitReader, BitWriter};

    #[test]
    fn single_symbol_gets_one_bit_code() {
        let mut freqs = [0u64; 256];
        freqs[42] = 100;
        let spec = HuffSpec::from_frequencies(&freqs);
        assert_eq!(spec.values, vec![42]);
        assert_eq!(spec.bits[0], 1);
        let enc = spec.encode_table().unwrap();
        assert_eq!(enc.code(42), (0, 1));
    }

    #[test]
    fn no_all_ones_code_emitted() {
        let mut freqs = [0u64; 256];
        for (i, f) in freqs.iter_mut().enumerate().take(8) {
            *f = (i as u64 + 1) * 10;
        }
        let spec = HuffSpec::from_frequencies(&freqs);
        let enc = spec.encode_table().unwrap();
        for s in 0..8u8 {
            let (code, len) = enc.code(s);
            assert_ne!(u32::from(code), (1u32 << len) - 1, "symbol {s} all ones");
        }
    }

    #[test]
    fn encode_decode_round_trip_over_table() {
        let mut freqs = [0u64; 256];
        for (i, f) in freqs.iter_mut().enumerate() {
            *f = ((i * 37) % 101) as u64;
        }
        let spec = HuffSpec::from_frequencies(&freqs);
        let enc = spec.encode_table().unwrap();
        let dec = spec.decode_table().unwrap();

        let symbols: Vec<u8> = (0..=255u8).filter(|&s| enc.has_code(s)).collect();
        let mut w = BitWriter::new();
        for &s in &symbols {
            let (code, len) = enc.code(s);
            w.write_bits(code as u32, len as u32);
        }
        let data = w.finish();
        let mut r = BitReader::new(&data);
        for &s in &symbols {
            assert_eq!(dec.decode_symbol(&mut r).unwrap(), s);
        }
    }

    #[test]
    fn lengths_capped_at_sixteen() {
        // Exponential-ish frequencies force deep trees before adjustment.
        let mut freqs = [0u64; 256];
        for (i, f) in freqs.iter_mut().enumerate().take(40) {
            *f = 1u64 << (i.min(40) as u32);
        }
        let spec = HuffSpec::from_frequencies(&freqs);
        assert_eq!(spec.bits.iter().map(|&b| b as usize).sum::<usize>(), 40);
        spec.encode_table().unwrap();
    }

    #[test]
    fn overfull_bits_rejected() {
        let spec = HuffSpec {
            bits: {
                let mut b = [0u8; 16];
                b[0] = 3; // three 1-bit codes cannot exist
                b
            },
            values: vec![1, 2, 3],
        };
        assert_eq!(spec.encode_table().unwrap_err(), HuffError::Overfull);
    }
}
