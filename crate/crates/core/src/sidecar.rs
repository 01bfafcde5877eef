//! Byte containers: the `CDF1` parameter sidecar and the `CDSK` skip map.
//! Multi-byte integers are little-endian.

use crate::bitstream::Bitstring;
use crate::error::{CdefError, Result};
use crate::frame::{SkipMap, Subsampling};

pub const SIDECAR_MAGIC: &[u8; 4] = b"CDF1";
pub const SIDECAR_VERSION: u8 = 1;
pub const SKIP_MAGIC: &[u8; 4] = b"CDSK";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sidecar {
    pub width: u16,
    pub height: u16,
    pub bit_depth: u8,
    pub subsampling: Subsampling,
    /// Packed parameters, one per frame.
    pub frames: Vec<Bitstring>,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(CdefError::Format(format!(
                "unexpected end of data at byte {} (need {n} more)",
                self.pos
            )));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn done(&self) -> bool {
        self.pos == self.data.len()
    }
}

impl Sidecar {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(SIDECAR_MAGIC);
        out.push(SIDECAR_VERSION);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.push(self.bit_depth);
        out.push(self.subsampling.code());
        for f in &self.frames {
            out.extend_from_slice(&(f.len() as u32).to_le_bytes());
            out.extend_from_slice(f.as_bytes());
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut c = Cursor { data, pos: 0 };
        if c.take(4)? != SIDECAR_MAGIC {
            return Err(CdefError::Format("bad sidecar magic".into()));
        }
        let version = c.u8()?;
        if version != SIDECAR_VERSION {
            return Err(CdefError::Format(format!("unsupported sidecar version {version}")));
        }
        let width = c.u16()?;
        let height = c.u16()?;
        let bit_depth = c.u8()?;
        crate::frame::check_bit_depth(bit_depth)?;
        let subsampling = Subsampling::from_code(c.u8()?)?;
        let mut frames = Vec::new();
        while !c.done() {
            let bits = c.u32()? as usize;
            let bytes = c.take(bits.div_ceil(8))?.to_vec();
            frames.push(Bitstring::from_bytes(bytes, bits)?);
        }
        Ok(Sidecar {
            width,
            height,
            bit_depth,
            subsampling,
            frames,
        })
    }
}

pub fn skip_map_to_bytes(map: &SkipMap) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(SKIP_MAGIC);
    out.extend_from_slice(&(map.unit_cols() as u16).to_le_bytes());
    out.extend_from_slice(&(map.unit_rows() as u16).to_le_bytes());
    for r in 0..map.unit_rows() {
        let mut row = vec![0u8; map.unit_cols().div_ceil(8)];
        for c in 0..map.unit_cols() {
            if map.unit_coded(r, c) {
                row[c / 8] |= 0x80 >> (c % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

pub fn skip_map_from_bytes(data: &[u8]) -> Result<SkipMap> {
    let mut c = Cursor { data, pos: 0 };
    if c.take(4)? != SKIP_MAGIC {
        return Err(CdefError::Format("bad skip map magic".into()));
    }
    let cols = usize::from(c.u16()?);
    let rows = usize::from(c.u16()?);
    let row_bytes = cols.div_ceil(8);
    let mut flags = Vec::with_capacity(cols * rows);
    for _ in 0..rows {
        let row = c.take(row_bytes)?;
        flags.extend((0..cols).map(|j| row[j / 8] & (0x80 >> (j % 8)) != 0));
    }
    if !c.done() {
        return Err(CdefError::Format("trailing bytes after skip map".into()));
    }
    SkipMap::from_flags(cols, rows, flags)
}
