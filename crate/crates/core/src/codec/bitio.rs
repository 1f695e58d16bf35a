//! JFIF marker constants plus the entropy-coded bit writer and reader.

pub const SOI: u8 = 0xD8;
pub const EOI: u8 = 0xD9;
pub const APP0: u8 = 0xE0;
pub const DQT: u8 = 0xDB;
pub const SOF0: u8 = 0xC0;
pub const DHT: u8 = 0xC4;
pub const SOS: u8 = 0xDA;

/// MSB-first bit writer for entropy-coded data with 0xFF byte stuffing.
#[derive(Debug, Default)]
pub struct BitWriter {
    out: Vec<u8>,
    bits: u32,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write_bits(&mut self, value: u32, count: u32) {
        debug_assert!(count <= 16);
        debug_assert!(count == 32 || value < (1 << count));
        self.bits = (self.bits << count) | value;
        self.nbits += count;
        while self.nbits >= 8 {
            let byte = ((self.bits >> (self.nbits - 8)) & 0xFF) as u8;
            self.out.push(byte);
            if byte == 0xFF {
                self.out.push(0x00);
            }
            self.nbits -= 8;
        }
    }

    /// Pads the final partial byte with 1-bits and returns the stuffed
    /// entropy data.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.write_bits((1 << pad) - 1, pad);
        }
        self.out
    }
}

/// Reader over stuffed entropy-coded data. Stops cleanly at any marker.
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    bits: u32,
    nbits: u32,
}

#[derive(Debug, PartialEq, Eq)]
pub enum BitReadError {
    /// Ran off the end of the available data.
    OutOfData,
    /// Hit a marker (0xFF followed by a non-stuffing byte) mid-read.
    MarkerReached(u8),
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self {
            data,
            pos: 0,
            bits: 0,
            nbits: 0,
        }
    }

    /// Bytes consumed so far, counting stuffing bytes.
    pub fn consumed(&self) -> usize {
        self.pos
    }

    fn load_byte(&mut self) -> Result<(), BitReadError> {
        if self.pos >= self.data.len() {
            return Err(BitReadError::OutOfData);
        }
        let byte = self.data[self.pos];
        if byte == 0xFF {
            match self.data.get(self.pos + 1) {
                Some(0x00) => {
                    self.pos += 2;
                }
                Some(&m) => return Err(BitReadError::MarkerReached(m)),
                None => return Err(BitReadError::OutOfData),
            }
        } else {
            self.pos += 1;
        }
        self.bits = (self.bits << 8) | byte as u32;
        self.nbits += 8;
        Ok(())
    }

    pub fn read_bit(&mut self) -> Result<u32, BitReadError> {
        if self.nbits == 0 {
            self.load_byte()?;
        }
        self.nbits -= 1;
        Ok((self.bits >> self.nbits) & 1)
    }

    pub fn read_bits(&mut self, count: u32) -> Result<u32, BitReadError> {
        let mut v = 0;
        for _ in 0..count {
            v = (v << 1) | self.read_bit()?;
        }
        Ok(v)
    }

    /// Discards any partial byte; decoding of a scan ends on a byte
    /// boundary before the trailing marker.
    pub fn align_to_byte(&mut self) {
        self.nbits = 0;
        self.bits = 0;
    }
}
