//! The non-linear directional filter.
//!
//! Every output pixel is the input pixel plus a rounded, constrained
//! weighted sum of differences to 4 primary taps (along the block direction)
//! and 8 secondary taps (on the two directions 45° away), clamped to the
//! range of the taps it used. Filtering reads only the input plane.

use rayon::prelude::*;

use crate::error::{CdefError, Result};
use crate::frame::{Plane, UNIT_SIZE};

/// `⌊log2 v⌋` for `v > 0`.
#[inline]
pub fn floor_log2(v: u32) -> u32 {
    debug_assert!(v > 0);
    31 - v.leading_zeros()
}

/// Limits a tap difference: differences up to roughly the strength pass
/// through, larger ones decay to zero at a rate set by the damping.
///
/// A strength of zero disables the tap. The shift `damping - ⌊log2 S⌋` is
/// floored at zero, which is the same as raising the damping to `⌊log2 S⌋`.
#[inline]
pub fn constraint(diff: i32, strength: i32, damping: i32) -> i32 {
    if strength == 0 {
        return 0;
    }
    let shift = (damping - floor_log2(strength as u32) as i32).max(0);
    let magnitude = diff.abs().min((strength - (diff.abs() >> shift)).max(0));
    if diff < 0 {
        -magnitude
    } else {
        magnitude
    }
}

/// Scales the signaled luma primary strength by the block's directional
/// contrast. Low-contrast blocks are not filtered along the direction.
pub fn adjust_primary_strength(strength: i32, contrast: i32) -> i32 {
    debug_assert!(contrast >= 0);
    if contrast < 1 << 10 {
        return 0;
    }
    let coarse = (contrast >> 16) as u32;
    let log = if coarse == 0 { 0 } else { floor_log2(coarse).min(12) } as i32;
    (strength * (4 + log) + 8) >> 4
}

/// Near and far primary tap offsets `(row, col)` per direction; the filter
/// also uses their negations.
pub const PRIMARY_OFFSETS: [[(isize, isize); 2]; 8] = [
    [(-1, 1), (-2, 2)],
    [(0, 1), (-1, 2)],
    [(0, 1), (0, 2)],
    [(0, 1), (1, 2)],
    [(1, 1), (2, 2)],
    [(1, 0), (2, 1)],
    [(1, 0), (2, 0)],
    [(1, 0), (2, -1)],
];

/// Primary weights (near, far) in 1/16 units, indexed by strength parity.
pub const PRIMARY_WEIGHTS: [[i32; 2]; 2] = [[4, 2], [3, 3]];
/// Secondary weights (near, far) in 1/16 units.
pub const SECONDARY_WEIGHTS: [i32; 2] = [2, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(strength: i32) -> Self {
        if strength & 1 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tap {
    pub di: isize,
    pub dj: isize,
    /// Weight in 1/16 units.
    pub weight: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TapSet {
    pub direction: u8,
    pub parity: Parity,
    pub primary: [Tap; 4],
    pub secondary: [Tap; 8],
}

impl TapSet {
    pub fn primary_weight(&self) -> i32 {
        self.primary.iter().map(|t| t.weight).sum()
    }

    pub fn secondary_weight(&self) -> i32 {
        self.secondary.iter().map(|t| t.weight).sum()
    }
}

fn tap_pair(offset: (isize, isize), weight: i32) -> [Tap; 2] {
    [
        Tap {
            di: offset.0,
            dj: offset.1,
            weight,
        },
        Tap {
            di: -offset.0,
            dj: -offset.1,
            weight,
        },
    ]
}

pub fn taps_for(direction: u8, parity: Parity) -> TapSet {
    let d = direction as usize & 7;
    let [near_w, far_w] = PRIMARY_WEIGHTS[(parity == Parity::Odd) as usize];
    let [near, far] = PRIMARY_OFFSETS[d];
    let [p0, p1] = tap_pair(near, near_w);
    let [p2, p3] = tap_pair(far, far_w);
    let mut secondary = [Tap {
        di: 0,
        dj: 0,
        weight: 0,
    }; 8];
    for (n, sd) in [(d + 2) & 7, (d + 6) & 7].into_iter().enumerate() {
        let [near, far] = PRIMARY_OFFSETS[sd];
        let taps = [tap_pair(near, SECONDARY_WEIGHTS[0]), tap_pair(far, SECONDARY_WEIGHTS[1])];
        secondary[n * 4..n * 4 + 4].copy_from_slice(&[taps[0][0], taps[0][1], taps[1][0], taps[1][1]]);
    }
    TapSet {
        direction: d as u8,
        parity,
        primary: [p0, p1, p2, p3],
        secondary,
    }
}

/// Filter parameters for one 8×8 unit of one plane, in the plane's bit-depth
/// domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedBlockParams {
    pub pri_strength: i32,
    pub sec_strength: i32,
    pub damping: i32,
    pub direction: u8,
    pub parity: Parity,
    pub enabled: bool,
}

impl ResolvedBlockParams {
    pub const DISABLED: ResolvedBlockParams = ResolvedBlockParams {
        pri_strength: 0,
        sec_strength: 0,
        damping: 3,
        direction: 0,
        parity: Parity::Even,
        enabled: false,
    };

    /// Builds parameters from 8-bit-domain strengths. The primary tap parity
    /// is taken before the strengths are scaled to `bit_depth`.
    pub fn from_8bit(pri: i32, sec: i32, damping: i32, direction: u8, bit_depth: u8, enabled: bool) -> Self {
        let shift = u32::from(bit_depth - 8);
        ResolvedBlockParams {
            pri_strength: pri << shift,
            sec_strength: sec << shift,
            damping,
            direction,
            parity: Parity::of(pri),
            enabled,
        }
    }

    /// True when filtering would change nothing.
    pub fn is_identity(&self) -> bool {
        !self.enabled || (self.pri_strength == 0 && self.sec_strength == 0)
    }
}

/// Values under each tap of a [`TapSet`]; `None` marks an out-of-frame tap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TapValues {
    pub primary: [Option<i32>; 4],
    pub secondary: [Option<i32>; 8],
}

pub fn gather_taps(plane: &Plane, row: usize, col: usize, taps: &TapSet) -> TapValues {
    let read = |t: &Tap| {
        let r = row as isize + t.di;
        let c = col as isize + t.dj;
        if r < 0 || c < 0 || r >= plane.height() as isize || c >= plane.width() as isize {
            None
        } else {
            Some(i32::from(plane.get(r as usize, c as usize)))
        }
    };
    TapValues {
        primary: taps.primary.each_ref().map(read),
        secondary: taps.secondary.each_ref().map(read),
    }
}

/// `round(delta / 16)` with ties away from zero.
#[inline]
pub fn round_sixteenths(delta: i32) -> i32 {
    (delta + 8 - i32::from(delta < 0)) >> 4
}

/// Filters one pixel given the values under its taps.
pub fn filter_pixel(x: i32, values: &TapValues, taps: &TapSet, params: &ResolvedBlockParams) -> i32 {
    let mut delta = 0;
    let (mut lo, mut hi) = (x, x);
    let mut visit = |v: Option<i32>, weight: i32, strength: i32| {
        if let Some(v) = v {
            delta += weight * constraint(v - x, strength, params.damping);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    };
    for (t, v) in taps.primary.iter().zip(values.primary) {
        visit(v, t.weight, params.pri_strength);
    }
    for (t, v) in taps.secondary.iter().zip(values.secondary) {
        visit(v, t.weight, params.sec_strength);
    }
    (x + round_sixteenths(delta)).clamp(lo, hi)
}

/// Resolved parameters for every 8×8 unit of a plane, raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitParamGrid {
    pub cols: usize,
    pub rows: usize,
    pub params: Vec<ResolvedBlockParams>,
}

impl UnitParamGrid {
    pub fn disabled_for(plane: &Plane) -> Self {
        let cols = plane.width().div_ceil(UNIT_SIZE);
        let rows = plane.height().div_ceil(UNIT_SIZE);
        UnitParamGrid {
            cols,
            rows,
            params: vec![ResolvedBlockParams::DISABLED; cols * rows],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> &ResolvedBlockParams {
        &self.params[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, p: ResolvedBlockParams) {
        self.params[row * self.cols + col] = p;
    }

    fn check(&self, plane: &Plane) -> Result<()> {
        let cols = plane.width().div_ceil(UNIT_SIZE);
        let rows = plane.height().div_ceil(UNIT_SIZE);
        if cols != self.cols || rows != self.rows || self.params.len() != cols * rows {
            return Err(CdefError::Dimensions(format!(
                "parameter grid {}x{} for a plane with {cols}x{rows} units",
                self.cols, self.rows
            )));
        }
        Ok(())
    }
}

/// Straightforward per-pixel filtering with explicit bounds checks. Serves as
/// the reference for [`filter_plane`].
pub fn filter_plane_reference(plane: &Plane, grid: &UnitParamGrid) -> Result<Plane> {
    grid.check(plane)?;
    let mut out = plane.clone();
    for ur in 0..grid.rows {
        for uc in 0..grid.cols {
            let p = grid.get(ur, uc);
            if p.is_identity() {
                continue;
            }
            let taps = taps_for(p.direction, p.parity);
            for r in ur * UNIT_SIZE..((ur + 1) * UNIT_SIZE).min(plane.height()) {
                for c in uc * UNIT_SIZE..((uc + 1) * UNIT_SIZE).min(plane.width()) {
                    let values = gather_taps(plane, r, c, &taps);
                    let y = filter_pixel(i32::from(plane.get(r, c)), &values, &taps, p);
                    out.set(r, c, y as u16);
                }
            }
        }
    }
    Ok(out)
}

const BORDER: usize = 2;
const OUTSIDE: i32 = i32::MIN;

/// Copy of a plane surrounded by a 2-pixel border of out-of-frame markers,
/// so tap reads need no bounds checks.
#[derive(Debug, Clone)]
pub struct PaddedPlane {
    width: usize,
    height: usize,
    stride: usize,
    data: Vec<i32>,
}

impl PaddedPlane {
    pub fn new(plane: &Plane) -> Self {
        let stride = plane.width() + 2 * BORDER;
        let mut data = vec![OUTSIDE; stride * (plane.height() + 2 * BORDER)];
        for r in 0..plane.height() {
            let dst = &mut data[(r + BORDER) * stride + BORDER..][..plane.width()];
            for (d, &s) in dst.iter_mut().zip(plane.row(r)) {
                *d = i32::from(s);
            }
        }
        PaddedPlane {
            width: plane.width(),
            height: plane.height(),
            stride,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.data[(row + BORDER) * self.stride + col + BORDER]
    }

    /// Filters the 8×8 unit at (`unit_row`, `unit_col`) into `out`, row-major
    /// with stride 8. Returns the in-frame height and width of the unit.
    pub fn filter_unit(
        &self,
        unit_row: usize,
        unit_col: usize,
        params: &ResolvedBlockParams,
        out: &mut [u16; 64],
    ) -> (usize, usize) {
        let r0 = unit_row * UNIT_SIZE;
        let c0 = unit_col * UNIT_SIZE;
        let h = UNIT_SIZE.min(self.height - r0);
        let w = UNIT_SIZE.min(self.width - c0);
        if params.is_identity() {
            for i in 0..h {
                for j in 0..w {
                    out[i * 8 + j] = self.get(r0 + i, c0 + j) as u16;
                }
            }
            return (h, w);
        }
        let taps = taps_for(params.direction, params.parity);
        let stride = self.stride as isize;
        let offset = |t: &Tap| t.di * stride + t.dj;
        let pri: [(isize, i32); 4] = taps.primary.each_ref().map(|t| (offset(t), t.weight));
        let sec: [(isize, i32); 8] = taps.secondary.each_ref().map(|t| (offset(t), t.weight));
        let (ps, ss, damping) = (params.pri_strength, params.sec_strength, params.damping);
        for i in 0..h {
            let base = (r0 + i + BORDER) * self.stride + c0 + BORDER;
            for j in 0..w {
                let idx = (base + j) as isize;
                let x = self.data[idx as usize];
                let mut delta = 0;
                let (mut lo, mut hi) = (x, x);
                for &(off, wt) in &pri {
                    let v = self.data[(idx + off) as usize];
                    if v != OUTSIDE {
                        delta += wt * constraint(v - x, ps, damping);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                for &(off, wt) in &sec {
                    let v = self.data[(idx + off) as usize];
                    if v != OUTSIDE {
                        delta += wt * constraint(v - x, ss, damping);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                out[i * 8 + j] = (x + round_sixteenths(delta)).clamp(lo, hi) as u16;
            }
        }
        (h, w)
    }
}

/// Filters a whole plane, 8×8 unit by unit, from the unmodified input.
/// Unit rows are processed in parallel on the current rayon pool; the
/// result does not depend on the schedule.
pub fn filter_plane(plane: &Plane, grid: &UnitParamGrid) -> Result<Plane> {
    grid.check(plane)?;
    let padded = PaddedPlane::new(plane);
    let width = plane.width();
    let mut out = plane.clone();
    out.data_mut()
        .par_chunks_mut(width * UNIT_SIZE)
        .enumerate()
        .for_each(|(ur, rows)| {
            let mut buf = [0u16; 64];
            for uc in 0..grid.cols {
                let p = grid.get(ur, uc);
                if p.is_identity() {
                    continue;
                }
                let (h, w) = padded.filter_unit(ur, uc, p, &mut buf);
                for i in 0..h {
                    rows[i * width + uc * UNIT_SIZE..][..w].copy_from_slice(&buf[i * 8..i * 8 + w]);
                }
            }
        });
    Ok(out)
}
