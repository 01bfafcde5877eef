//! Frame-level filtering from signaled parameters. The encoder and the
//! decoder both go through [`apply_frame_params`].

use rayon::prelude::*;

use crate::direction::{search_direction, DirectionResult};
use crate::error::{CdefError, Result};
use crate::filter::{filter_plane, UnitParamGrid};
use crate::frame::{BlockGrid, Frame, Plane, PlaneKind, SkipMap, Subsampling, UNIT_SIZE};
use crate::params::{block_filter_enable, resolve_block, resolve_effective, EffectivePlaneParams, FrameParams};

/// Direction search results for every luma 8×8 unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameDirections {
    pub grid: BlockGrid,
    pub results: Vec<DirectionResult>,
}

impl FrameDirections {
    pub fn get(&self, unit_row: usize, unit_col: usize) -> &DirectionResult {
        &self.results[unit_row * self.grid.unit_cols + unit_col]
    }

    /// Count of units per direction.
    pub fn histogram(&self) -> [usize; 8] {
        let mut h = [0; 8];
        for r in &self.results {
            h[r.direction as usize] += 1;
        }
        h
    }
}

/// Runs the direction search on every 8×8 luma unit. Units at the right or
/// bottom edge read replicated edge samples.
pub fn search_frame_directions(luma: &Plane) -> FrameDirections {
    let grid = BlockGrid::for_dims(luma.width(), luma.height()).expect("non-empty plane");
    let results = (0..grid.num_units())
        .into_par_iter()
        .map(|u| {
            let (ur, uc) = (u / grid.unit_cols, u % grid.unit_cols);
            search_direction(&luma.block8_clamped(ur * UNIT_SIZE, uc * UNIT_SIZE), luma.bit_depth())
        })
        .collect();
    FrameDirections { grid, results }
}

/// Geometry linking an 8×8 unit of some plane to the luma unit holding its
/// top-left collocated sample.
#[derive(Debug, Clone, Copy)]
pub(crate) struct UnitLink {
    pub unit_row: usize,
    pub unit_col: usize,
    pub luma_row: usize,
    pub luma_col: usize,
}

pub(crate) fn plane_units(plane: &Plane, kind: PlaneKind, subsampling: Subsampling) -> Vec<UnitLink> {
    let (xd, yd) = match kind {
        PlaneKind::Luma => (0, 0),
        PlaneKind::Chroma => subsampling.decimation(),
    };
    let cols = plane.width().div_ceil(UNIT_SIZE);
    let rows = plane.height().div_ceil(UNIT_SIZE);
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(unit_row, unit_col)| UnitLink {
            unit_row,
            unit_col,
            luma_row: unit_row << yd,
            luma_col: unit_col << xd,
        })
        .collect()
}

/// Builds the per-unit parameter grid of one plane. `eff_for_fb` yields the
/// effective parameters of a filter block, or `None` when it is skipped.
pub(crate) fn plane_param_grid(
    plane: &Plane,
    kind: PlaneKind,
    subsampling: Subsampling,
    skip: &SkipMap,
    dirs: &FrameDirections,
    eff_for_fb: impl Fn(usize, usize) -> Option<EffectivePlaneParams>,
) -> UnitParamGrid {
    let mut grid = UnitParamGrid::disabled_for(plane);
    for link in plane_units(plane, kind, subsampling) {
        let (fr, fc) = dirs.grid.fb_of_unit(link.luma_row, link.luma_col);
        let dir = dirs.get(link.luma_row, link.luma_col);
        let eff = eff_for_fb(fr, fc);
        let enabled = match &eff {
            Some(e) => block_filter_enable(true, skip.unit_coded(link.luma_row, link.luma_col), e.skip),
            None => false,
        };
        let resolved = match eff {
            Some(e) => resolve_block(&e, kind, dir, enabled),
            None => resolve_block(&disabled_params(plane.bit_depth()), kind, dir, false),
        };
        grid.set(link.unit_row, link.unit_col, resolved);
    }
    grid
}

fn disabled_params(bit_depth: u8) -> EffectivePlaneParams {
    EffectivePlaneParams {
        pri: 0,
        sec: 0,
        damping: 3,
        skip: false,
        enabled: false,
        bit_depth,
    }
}

/// Filters every plane of `frame` with the signaled parameters.
pub fn apply_frame_params(
    frame: &Frame,
    params: &FrameParams,
    skip: &SkipMap,
    dirs: &FrameDirections,
) -> Result<Frame> {
    let grid = BlockGrid::for_dims(frame.width(), frame.height())?;
    skip.check_grid(&grid)?;
    if dirs.grid != grid {
        return Err(CdefError::Dimensions("direction map does not match frame".into()));
    }
    let coded = skip.coded_fbs(&grid);
    params.validate(frame.subsampling(), coded.len())?;
    let mut fb_preset: Vec<Option<usize>> = vec![None; grid.num_fbs()];
    for (&(fr, fc), &id) in coded.iter().zip(&params.fb_preset_ids) {
        fb_preset[fr * grid.fb_cols + fc] = Some(usize::from(id));
    }
    let ss = frame.subsampling();
    let bd = frame.bit_depth();
    let effective = |kind: PlaneKind| -> Result<Vec<EffectivePlaneParams>> {
        params
            .presets
            .iter()
            .map(|p| resolve_effective(p, kind, bd, ss, params.damping))
            .collect()
    };
    let filter = |plane: &Plane, kind: PlaneKind, effs: &[EffectivePlaneParams]| {
        let g = plane_param_grid(plane, kind, ss, skip, dirs, |fr, fc| {
            fb_preset[fr * grid.fb_cols + fc].map(|i| effs[i])
        });
        filter_plane(plane, &g)
    };
    let luma_eff = effective(PlaneKind::Luma)?;
    let luma = filter(frame.luma(), PlaneKind::Luma, &luma_eff)?;
    let chroma = match frame.chroma() {
        Some([u, v]) => {
            let chroma_eff = effective(PlaneKind::Chroma)?;
            Some([
                filter(u, PlaneKind::Chroma, &chroma_eff)?,
                filter(v, PlaneKind::Chroma, &chroma_eff)?,
            ])
        }
        None => None,
    };
    Frame::new(luma, chroma, ss)
}
