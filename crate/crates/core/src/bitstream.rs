//! Fixed-width, MSB-first packing of [`FrameParams`].
//!
//! Layout: `damping - 3` (2 bits), `fb_bits` (2 bits), `1 << fb_bits`
//! presets (14 bits each, 7 when chroma is not filtered), then an
//! `fb_bits`-wide preset id per coded filter block in raster order.

use std::fmt;

use crate::error::{CdefError, Result};
use crate::frame::{BlockGrid, SkipMap, Subsampling};
use crate::params::{CdefPreset, FrameParams};

/// A bit sequence packed MSB-first into bytes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bitstring {
    bytes: Vec<u8>,
    len: usize,
}

impl Bitstring {
    pub fn new() -> Self {
        Self::default()
    }

    /// Takes the first `len` bits of `bytes`. Bits past `len` are cleared.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(CdefError::Truncated {
                needed: len,
                available: bytes.len() * 8,
            });
        }
        bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Ok(Bitstring { bytes, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes, zero-padded to a byte boundary.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit(&self, pos: usize) -> bool {
        assert!(pos < self.len);
        self.bytes[pos / 8] & (0x80 >> (pos % 8)) != 0
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push(&mut self, value: u32, width: usize) {
        debug_assert!(width <= 32 && (width == 32 || value >> width == 0));
        for b in (0..width).rev() {
            self.push_bit((value >> b) & 1 != 0);
        }
    }

    /// The first `len` bits.
    pub fn truncated(&self, len: usize) -> Self {
        Bitstring::from_bytes(self.bytes.clone(), len.min(self.len)).expect("shorter length")
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

struct BitReader<'a> {
    bits: &'a Bitstring,
    pos: usize,
}

impl BitReader<'_> {
    fn read(&mut self, width: usize) -> Result<u32> {
        if self.pos + width > self.bits.len() {
            return Err(CdefError::Truncated {
                needed: self.pos + width,
                available: self.bits.len(),
            });
        }
        let mut v = 0u32;
        for _ in 0..width {
            v = (v << 1) | u32::from(self.bits.bit(self.pos));
            self.pos += 1;
        }
        Ok(v)
    }
}

pub fn pack(params: &FrameParams, grid: &BlockGrid, skip: &SkipMap, subsampling: Subsampling) -> Result<Bitstring> {
    skip.check_grid(grid)?;
    let coded = skip.coded_fbs(grid).len();
    params.validate(subsampling, coded)?;
    let mut out = Bitstring::new();
    out.push(u32::from(params.damping - 3), 2);
    out.push(u32::from(params.fb_bits), 2);
    for p in &params.presets {
        let bits = u32::from(p.to_bits14());
        if subsampling.chroma_filtered() {
            out.push(bits, 14);
        } else {
            out.push(bits >> 7, 7);
        }
    }
    for &id in &params.fb_preset_ids {
        out.push(u32::from(id), usize::from(params.fb_bits));
    }
    debug_assert_eq!(out.len(), params.bit_length(subsampling));
    Ok(out)
}

pub fn unpack(bits: &Bitstring, grid: &BlockGrid, skip: &SkipMap, subsampling: Subsampling) -> Result<FrameParams> {
    skip.check_grid(grid)?;
    let coded = skip.coded_fbs(grid).len();
    let mut r = BitReader { bits, pos: 0 };
    let damping = r.read(2)? as u8 + 3;
    let fb_bits = r.read(2)? as u8;
    let mut presets = Vec::with_capacity(1 << fb_bits);
    for _ in 0..1 << fb_bits {
        let v = if subsampling.chroma_filtered() {
            r.read(14)?
        } else {
            r.read(7)? << 7
        };
        presets.push(CdefPreset::from_bits14(v as u16));
    }
    let fb_preset_ids = (0..coded)
        .map(|_| r.read(usize::from(fb_bits)).map(|v| v as u8))
        .collect::<Result<Vec<_>>>()?;
    if r.pos != bits.len() {
        return Err(CdefError::TrailingBits(bits.len() - r.pos));
    }
    Ok(FrameParams {
        damping,
        fb_bits,
        presets,
        fb_preset_ids,
    })
}
