//! Frame- and filter-block-level filter parameters and their resolution into
//! per-plane effective strengths.

use crate::direction::DirectionResult;
use crate::error::{CdefError, Result};
use crate::filter::{adjust_primary_strength, floor_log2, ResolvedBlockParams};
use crate::frame::{PlaneKind, Subsampling};

/// Primary strength used when a plane signals zero primary and secondary.
pub const SPECIAL_PRIMARY: i32 = 19;
/// Secondary strength paired with [`SPECIAL_PRIMARY`].
pub const SPECIAL_SECONDARY: i32 = 7;

pub const MIN_DAMPING: u8 = 3;
pub const MAX_DAMPING: u8 = 6;

/// Maps a 2-bit secondary strength index to its strength.
pub fn decode_secondary(idx: u8) -> i32 {
    match idx {
        0 => 0,
        1 => 1,
        2 => 2,
        3 => 4,
        _ => panic!("secondary index {idx} out of range"),
    }
}

/// One signaled preset: strengths and skip-condition bits for luma and chroma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CdefPreset {
    pub luma_pri: u8,
    pub luma_skip: bool,
    pub luma_sec_idx: u8,
    pub chroma_pri: u8,
    pub chroma_skip: bool,
    pub chroma_sec_idx: u8,
}

impl CdefPreset {
    /// Number of bits the preset occupies.
    pub fn signaled_bits(subsampling: Subsampling) -> usize {
        if subsampling.chroma_filtered() {
            14
        } else {
            7
        }
    }

    /// Packs the 14 preset bits in signaling order (luma fields high).
    pub fn to_bits14(&self) -> u16 {
        let half = |pri: u8, skip: bool, sec: u8| (u16::from(pri) << 3) | (u16::from(skip) << 2) | u16::from(sec);
        (half(self.luma_pri, self.luma_skip, self.luma_sec_idx) << 7)
            | half(self.chroma_pri, self.chroma_skip, self.chroma_sec_idx)
    }

    pub fn from_bits14(bits: u16) -> Self {
        let l = bits >> 7;
        let c = bits & 0x7f;
        CdefPreset {
            luma_pri: (l >> 3) as u8 & 15,
            luma_skip: l & 4 != 0,
            luma_sec_idx: l as u8 & 3,
            chroma_pri: (c >> 3) as u8,
            chroma_skip: c & 4 != 0,
            chroma_sec_idx: c as u8 & 3,
        }
    }

    pub fn validate(&self, subsampling: Subsampling) -> Result<()> {
        if self.luma_pri > 15 || self.chroma_pri > 15 || self.luma_sec_idx > 3 || self.chroma_sec_idx > 3 {
            return Err(CdefError::InvalidParam(format!("preset field out of range: {self:?}")));
        }
        if !subsampling.chroma_filtered()
            && (self.chroma_pri != 0 || self.chroma_skip || self.chroma_sec_idx != 0)
        {
            return Err(CdefError::InvalidParam(
                "chroma preset fields must be zero when chroma is not filtered".into(),
            ));
        }
        Ok(())
    }

    fn fields(&self, kind: PlaneKind) -> (u8, bool, u8) {
        match kind {
            PlaneKind::Luma => (self.luma_pri, self.luma_skip, self.luma_sec_idx),
            PlaneKind::Chroma => (self.chroma_pri, self.chroma_skip, self.chroma_sec_idx),
        }
    }
}

/// Everything signaled for one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameParams {
    /// Luma damping in the 8-bit domain, 3..=6.
    pub damping: u8,
    /// Bits per filter-block preset id, 0..=3.
    pub fb_bits: u8,
    /// Exactly `1 << fb_bits` presets.
    pub presets: Vec<CdefPreset>,
    /// One id per coded filter block, raster order.
    pub fb_preset_ids: Vec<u8>,
}

impl FrameParams {
    /// A single preset and no coded filter blocks.
    pub fn empty(damping: u8) -> Self {
        FrameParams {
            damping,
            fb_bits: 0,
            presets: vec![CdefPreset::default()],
            fb_preset_ids: Vec::new(),
        }
    }

    pub fn validate(&self, subsampling: Subsampling, coded_fbs: usize) -> Result<()> {
        if !(MIN_DAMPING..=MAX_DAMPING).contains(&self.damping) {
            return Err(CdefError::InvalidParam(format!("damping {} outside 3..=6", self.damping)));
        }
        if self.fb_bits > 3 {
            return Err(CdefError::InvalidParam(format!("fb_bits {} > 3", self.fb_bits)));
        }
        if self.presets.len() != 1 << self.fb_bits {
            return Err(CdefError::InvalidParam(format!(
                "{} presets for fb_bits {}",
                self.presets.len(),
                self.fb_bits
            )));
        }
        for p in &self.presets {
            p.validate(subsampling)?;
        }
        if self.fb_preset_ids.len() != coded_fbs {
            return Err(CdefError::InvalidParam(format!(
                "{} preset ids for {coded_fbs} coded filter blocks",
                self.fb_preset_ids.len()
            )));
        }
        if let Some(id) = self.fb_preset_ids.iter().find(|&&id| usize::from(id) >= self.presets.len()) {
            return Err(CdefError::InvalidParam(format!("preset id {id} out of range")));
        }
        Ok(())
    }

    /// Signaled size in bits: header, presets, then one id per coded block.
    pub fn bit_length(&self, subsampling: Subsampling) -> usize {
        4 + self.presets.len() * CdefPreset::signaled_bits(subsampling)
            + self.fb_preset_ids.len() * usize::from(self.fb_bits)
    }
}

/// Strengths, damping and skip behavior one preset implies for one plane.
/// Strengths stay in the 8-bit domain; damping is in the plane's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EffectivePlaneParams {
    pub pri: i32,
    pub sec: i32,
    pub damping: i32,
    pub skip: bool,
    /// False for chroma of frames whose chroma is never filtered.
    pub enabled: bool,
    pub bit_depth: u8,
}

impl EffectivePlaneParams {
    pub fn pri_scaled(&self) -> i32 {
        self.pri << (self.bit_depth - 8)
    }

    pub fn sec_scaled(&self) -> i32 {
        self.sec << (self.bit_depth - 8)
    }
}

pub fn resolve_effective(
    preset: &CdefPreset,
    kind: PlaneKind,
    bit_depth: u8,
    subsampling: Subsampling,
    luma_damping: u8,
) -> Result<EffectivePlaneParams> {
    crate::frame::check_bit_depth(bit_depth)?;
    preset.validate(subsampling)?;
    if !(MIN_DAMPING..=MAX_DAMPING).contains(&luma_damping) {
        return Err(CdefError::InvalidParam(format!("damping {luma_damping} outside 3..=6")));
    }
    let extra = i32::from(bit_depth - 8);
    let luma_d = i32::from(luma_damping) + extra;
    if kind == PlaneKind::Chroma && !subsampling.chroma_filtered() {
        return Ok(EffectivePlaneParams {
            pri: 0,
            sec: 0,
            damping: luma_d - 1,
            skip: false,
            enabled: false,
            bit_depth,
        });
    }
    let (pri, skip, sec_idx) = preset.fields(kind);
    let (pri, sec, skip) = match (i32::from(pri), decode_secondary(sec_idx)) {
        (0, 0) => (SPECIAL_PRIMARY, SPECIAL_SECONDARY, true),
        (p, s) => (p, s, skip),
    };
    let damping = match kind {
        PlaneKind::Luma => luma_d,
        PlaneKind::Chroma if pri > 0 => (luma_d - 1).max(floor_log2((pri << extra) as u32) as i32),
        PlaneKind::Chroma => luma_d - 1,
    };
    Ok(EffectivePlaneParams {
        pri,
        sec,
        damping,
        skip,
        enabled: true,
        bit_depth,
    })
}

/// Whether an 8×8 unit is filtered.
pub fn block_filter_enable(fb_coded: bool, unit_coded: bool, skip_bit: bool) -> bool {
    fb_coded && (unit_coded || skip_bit)
}

/// Per-unit parameters: luma primary strength follows the unit's
/// directional contrast, chroma strengths are used as signaled.
pub fn resolve_block(
    eff: &EffectivePlaneParams,
    kind: PlaneKind,
    dir: &DirectionResult,
    enabled: bool,
) -> ResolvedBlockParams {
    if !(eff.enabled && enabled) {
        return ResolvedBlockParams {
            direction: dir.direction,
            ..ResolvedBlockParams::DISABLED
        };
    }
    let pri = match kind {
        PlaneKind::Luma => adjust_primary_strength(eff.pri, dir.contrast),
        PlaneKind::Chroma => eff.pri,
    };
    ResolvedBlockParams::from_8bit(pri, eff.sec, eff.damping, dir.direction, eff.bit_depth, true)
}
