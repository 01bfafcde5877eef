//! Planar frame storage, 8×8 / 64×64 block geometry and coded-residual maps.

use crate::error::{CdefError, Result};

/// Side length of the direction search / filtering unit.
pub const UNIT_SIZE: usize = 8;
/// Side length of a luma filter block.
pub const FB_SIZE: usize = 64;
/// Number of 8×8 units along one side of a filter block.
pub const UNITS_PER_FB: usize = FB_SIZE / UNIT_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsampling {
    Cs400,
    Cs420,
    Cs422,
    Cs444,
}

impl Subsampling {
    /// Horizontal and vertical chroma decimation shifts.
    pub fn decimation(self) -> (usize, usize) {
        match self {
            Subsampling::Cs400 | Subsampling::Cs444 => (0, 0),
            Subsampling::Cs420 => (1, 1),
            Subsampling::Cs422 => (1, 0),
        }
    }

    pub fn has_chroma(self) -> bool {
        self != Subsampling::Cs400
    }

    /// Chroma is filtered (and its preset fields signaled) only when the
    /// frame has chroma planes decimated equally in both directions.
    pub fn chroma_filtered(self) -> bool {
        let (xd, yd) = self.decimation();
        self.has_chroma() && xd == yd
    }

    pub fn code(self) -> u8 {
        match self {
            Subsampling::Cs400 => 0,
            Subsampling::Cs420 => 1,
            Subsampling::Cs422 => 2,
            Subsampling::Cs444 => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            0 => Subsampling::Cs400,
            1 => Subsampling::Cs420,
            2 => Subsampling::Cs422,
            3 => Subsampling::Cs444,
            c => return Err(CdefError::Format(format!("unknown subsampling code {c}"))),
        })
    }

    pub fn chroma_dims(self, width: usize, height: usize) -> (usize, usize) {
        let (xd, yd) = self.decimation();
        ((width + xd) >> xd, (height + yd) >> yd)
    }
}

pub fn check_bit_depth(bit_depth: u8) -> Result<()> {
    match bit_depth {
        8 | 10 | 12 => Ok(()),
        b => Err(CdefError::BitDepth(b)),
    }
}

/// One plane of unsigned samples in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    width: usize,
    height: usize,
    bit_depth: u8,
    data: Vec<u16>,
}

impl Plane {
    /// A plane filled with `value`.
    pub fn filled(width: usize, height: usize, bit_depth: u8, value: u16) -> Result<Self> {
        Self::from_samples(width, height, bit_depth, vec![value; width * height])
    }

    pub fn from_samples(width: usize, height: usize, bit_depth: u8, data: Vec<u16>) -> Result<Self> {
        check_bit_depth(bit_depth)?;
        if width == 0 || height == 0 {
            return Err(CdefError::EmptyFrame);
        }
        if data.len() != width * height {
            return Err(CdefError::Dimensions(format!(
                "{} samples for a {width}x{height} plane",
                data.len()
            )));
        }
        let max = (1u32 << bit_depth) - 1;
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, &v)| u32::from(v) > max) {
            return Err(CdefError::SampleRange {
                index,
                value,
                bit_depth,
            });
        }
        Ok(Plane {
            width,
            height,
            bit_depth,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn max_value(&self) -> u16 {
        ((1u32 << self.bit_depth) - 1) as u16
    }

    pub fn samples(&self) -> &[u16] {
        &self.data
    }

    pub fn into_samples(self) -> Vec<u16> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.data[row * self.width + col]
    }

    /// Panics if `value` does not fit the bit depth.
    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u16) {
        assert!(value <= self.max_value(), "sample {value} out of range");
        self.data[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[u16] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u16] {
        &mut self.data
    }

    pub fn same_shape(&self, other: &Plane) -> bool {
        self.width == other.width && self.height == other.height && self.bit_depth == other.bit_depth
    }

    /// Reads an `n`×`n` window at (`i0`, `j0`). Positions past the right or
    /// bottom edge are returned as zero and flagged invalid.
    pub fn extract_block(&self, i0: usize, j0: usize, n: usize) -> BlockView {
        assert!(i0 < self.height && j0 < self.width, "block origin outside plane");
        let mut values = vec![0u16; n * n];
        let mut valid = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                let (r, c) = (i0 + i, j0 + j);
                if r < self.height && c < self.width {
                    values[i * n + j] = self.get(r, c);
                    valid[i * n + j] = true;
                }
            }
        }
        BlockView { n, values, valid }
    }

    /// Writes the valid positions of `block` back at (`i0`, `j0`).
    pub fn write_block(&mut self, i0: usize, j0: usize, block: &BlockView) {
        let n = block.n;
        for i in 0..n {
            for j in 0..n {
                if block.valid[i * n + j] {
                    self.set(i0 + i, j0 + j, block.values[i * n + j]);
                }
            }
        }
    }

    /// Reads the 8×8 block at (`i0`, `j0`), replicating edge samples for
    /// positions outside the plane.
    pub fn block8_clamped(&self, i0: usize, j0: usize) -> [[u16; 8]; 8] {
        let mut out = [[0u16; 8]; 8];
        for (i, row) in out.iter_mut().enumerate() {
            let r = (i0 + i).min(self.height - 1);
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(r, (j0 + j).min(self.width - 1));
            }
        }
        out
    }
}

/// Square window of samples with a per-position in-frame flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockView {
    pub n: usize,
    pub values: Vec<u16>,
    pub valid: Vec<bool>,
}

impl BlockView {
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneKind {
    Luma,
    Chroma,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    luma: Plane,
    chroma: Option<[Plane; 2]>,
    subsampling: Subsampling,
}

impl Frame {
    pub fn new(luma: Plane, chroma: Option<[Plane; 2]>, subsampling: Subsampling) -> Result<Self> {
        match (&chroma, subsampling.has_chroma()) {
            (None, false) => {}
            (Some(planes), true) => {
                let (cw, ch) = subsampling.chroma_dims(luma.width(), luma.height());
                for p in planes {
                    if p.width() != cw || p.height() != ch {
                        return Err(CdefError::Dimensions(format!(
                            "chroma plane {}x{}, expected {cw}x{ch}",
                            p.width(),
                            p.height()
                        )));
                    }
                    if p.bit_depth() != luma.bit_depth() {
                        return Err(CdefError::Dimensions("planes differ in bit depth".into()));
                    }
                }
            }
            (None, true) => return Err(CdefError::Dimensions("missing chroma planes".into())),
            (Some(_), false) => {
                return Err(CdefError::Dimensions("monochrome frame with chroma planes".into()))
            }
        }
        Ok(Frame {
            luma,
            chroma,
            subsampling,
        })
    }

    pub fn luma(&self) -> &Plane {
        &self.luma
    }

    pub fn chroma(&self) -> Option<&[Plane; 2]> {
        self.chroma.as_ref()
    }

    pub fn subsampling(&self) -> Subsampling {
        self.subsampling
    }

    pub fn bit_depth(&self) -> u8 {
        self.luma.bit_depth()
    }

    pub fn width(&self) -> usize {
        self.luma.width()
    }

    pub fn height(&self) -> usize {
        self.luma.height()
    }

    /// Luma first, then the chroma planes if present.
    pub fn planes(&self) -> impl Iterator<Item = &Plane> {
        std::iter::once(&self.luma).chain(self.chroma.iter().flat_map(|c| c.iter()))
    }

    pub fn plane(&self, index: usize) -> &Plane {
        match index {
            0 => &self.luma,
            i => &self.chroma.as_ref().expect("frame has no chroma")[i - 1],
        }
    }

    pub fn num_planes(&self) -> usize {
        if self.chroma.is_some() {
            3
        } else {
            1
        }
    }

    pub fn same_shape(&self, other: &Frame) -> bool {
        self.subsampling == other.subsampling
            && self.planes().zip(other.planes()).all(|(a, b)| a.same_shape(b))
    }

    pub fn into_planes(self) -> (Plane, Option<[Plane; 2]>, Subsampling) {
        (self.luma, self.chroma, self.subsampling)
    }
}

/// 8×8 unit and 64×64 filter-block counts for a luma plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    pub unit_cols: usize,
    pub unit_rows: usize,
    pub fb_cols: usize,
    pub fb_rows: usize,
}

impl BlockGrid {
    pub fn for_dims(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(CdefError::EmptyFrame);
        }
        Ok(BlockGrid {
            unit_cols: width.div_ceil(UNIT_SIZE),
            unit_rows: height.div_ceil(UNIT_SIZE),
            fb_cols: width.div_ceil(FB_SIZE),
            fb_rows: height.div_ceil(FB_SIZE),
        })
    }

    pub fn num_units(&self) -> usize {
        self.unit_cols * self.unit_rows
    }

    pub fn num_fbs(&self) -> usize {
        self.fb_cols * self.fb_rows
    }

    /// Filter block containing the given luma unit.
    pub fn fb_of_unit(&self, unit_row: usize, unit_col: usize) -> (usize, usize) {
        (unit_row / UNITS_PER_FB, unit_col / UNITS_PER_FB)
    }

    /// Luma units contained in a filter block, in raster order.
    pub fn units_in_fb(&self, fb_row: usize, fb_col: usize) -> impl Iterator<Item = (usize, usize)> {
        let r0 = fb_row * UNITS_PER_FB;
        let c0 = fb_col * UNITS_PER_FB;
        let r1 = (r0 + UNITS_PER_FB).min(self.unit_rows);
        let c1 = (c0 + UNITS_PER_FB).min(self.unit_cols);
        (r0..r1).flat_map(move |r| (c0..c1).map(move |c| (r, c)))
    }
}

pub fn partition(frame: &Frame) -> Result<BlockGrid> {
    BlockGrid::for_dims(frame.width(), frame.height())
}

/// Per luma 8×8 unit flag: `true` when the unit has coded residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipMap {
    unit_cols: usize,
    unit_rows: usize,
    coded: Vec<bool>,
}

impl SkipMap {
    pub fn all_coded(grid: &BlockGrid) -> Self {
        SkipMap {
            unit_cols: grid.unit_cols,
            unit_rows: grid.unit_rows,
            coded: vec![true; grid.num_units()],
        }
    }

    pub fn from_flags(unit_cols: usize, unit_rows: usize, coded: Vec<bool>) -> Result<Self> {
        if coded.len() != unit_cols * unit_rows {
            return Err(CdefError::Dimensions(format!(
                "{} skip flags for {unit_cols}x{unit_rows} units",
                coded.len()
            )));
        }
        Ok(SkipMap {
            unit_cols,
            unit_rows,
            coded,
        })
    }

    pub fn unit_cols(&self) -> usize {
        self.unit_cols
    }

    pub fn unit_rows(&self) -> usize {
        self.unit_rows
    }

    pub fn flags(&self) -> &[bool] {
        &self.coded
    }

    pub fn check_grid(&self, grid: &BlockGrid) -> Result<()> {
        if self.unit_cols != grid.unit_cols || self.unit_rows != grid.unit_rows {
            return Err(CdefError::Dimensions(format!(
                "skip map {}x{} units, frame has {}x{}",
                self.unit_cols, self.unit_rows, grid.unit_cols, grid.unit_rows
            )));
        }
        Ok(())
    }

    pub fn unit_coded(&self, unit_row: usize, unit_col: usize) -> bool {
        self.coded[unit_row * self.unit_cols + unit_col]
    }

    pub fn set(&mut self, unit_row: usize, unit_col: usize, coded: bool) {
        self.coded[unit_row * self.unit_cols + unit_col] = coded;
    }

    /// OR over the units of a filter block.
    pub fn fb_coded(&self, grid: &BlockGrid, fb_row: usize, fb_col: usize) -> bool {
        grid.units_in_fb(fb_row, fb_col)
            .any(|(r, c)| self.unit_coded(r, c))
    }

    /// Coded filter blocks in raster order.
    pub fn coded_fbs(&self, grid: &BlockGrid) -> Vec<(usize, usize)> {
        (0..grid.fb_rows)
            .flat_map(|r| (0..grid.fb_cols).map(move |c| (r, c)))
            .filter(|&(r, c)| self.fb_coded(grid, r, c))
            .collect()
    }
}
