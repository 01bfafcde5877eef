//! Encoder-side preset search.
//!
//! The first pass filters every coded filter block with every candidate and
//! records the distortion per plane group. Presets are then grown greedily
//! against the cost `λ·B·log2 N + Σ_b min_preset (D_luma + D_chroma)`, where
//! one id per filter block selects a (luma, chroma) candidate pair.

use rayon::prelude::*;

use crate::apply::{plane_units, FrameDirections, UnitLink};
use crate::error::{CdefError, Result};
use crate::filter::PaddedPlane;
use crate::frame::{BlockGrid, Frame, Plane, PlaneKind, SkipMap, UNIT_SIZE};
use crate::params::{
    block_filter_enable, resolve_block, resolve_effective, CdefPreset, FrameParams, MAX_DAMPING, MIN_DAMPING,
};

/// Constant stabilizing the contrast term, 8-bit domain.
pub const C1: f64 = 6.25;
/// Constant stabilizing the variance-product term, 8-bit domain.
pub const C2: f64 = 312.5;

/// Primary strengths considered in the reduced search.
pub const REDUCED_PRIMARY: [u8; 9] = [0, 1, 2, 3, 5, 7, 10, 13, 15];

/// Upper bound on `combinations × blocks` for [`exhaustive_select`].
pub const EXHAUSTIVE_LIMIT: u128 = 200_000_000;

/// One plane's half of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Candidate {
    pub pri: u8,
    pub sec_idx: u8,
    pub skip: bool,
}

impl Candidate {
    /// All 16 × 4 × 2 combinations, primary-major.
    pub fn all() -> Vec<Candidate> {
        Self::grid(&(0..16).collect::<Vec<_>>())
    }

    pub fn reduced() -> Vec<Candidate> {
        Self::grid(&REDUCED_PRIMARY)
    }

    fn grid(primaries: &[u8]) -> Vec<Candidate> {
        primaries
            .iter()
            .flat_map(|&pri| {
                (0..4).flat_map(move |sec_idx| [false, true].map(|skip| Candidate { pri, sec_idx, skip }))
            })
            .collect()
    }

    fn as_luma(self) -> CdefPreset {
        CdefPreset {
            luma_pri: self.pri,
            luma_skip: self.skip,
            luma_sec_idx: self.sec_idx,
            ..Default::default()
        }
    }

    fn as_chroma(self) -> CdefPreset {
        CdefPreset {
            chroma_pri: self.pri,
            chroma_skip: self.skip,
            chroma_sec_idx: self.sec_idx,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Contrast-weighted SSE over 8×8 blocks.
    #[default]
    CdefDist,
    Sse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub lambda: f64,
    /// Largest preset count to consider: 1, 2, 4 or 8.
    pub max_presets: usize,
    pub metric: Metric,
    /// Restrict the candidates to [`Candidate::reduced`].
    pub fast: bool,
    /// Coordinate-descent passes after the greedy search.
    pub refine_passes: usize,
    /// Luma damping, 8-bit domain.
    pub damping: u8,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            lambda: 0.0,
            max_presets: 8,
            metric: Metric::CdefDist,
            fast: false,
            refine_passes: 4,
            damping: 3,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(CdefError::InvalidParam(format!("lambda {} must be finite and >= 0", self.lambda)));
        }
        if ![1, 2, 4, 8].contains(&self.max_presets) {
            return Err(CdefError::InvalidParam(format!("max presets {} not in {{1,2,4,8}}", self.max_presets)));
        }
        if !(MIN_DAMPING..=MAX_DAMPING).contains(&self.damping) {
            return Err(CdefError::InvalidParam(format!("damping {} outside 3..=6", self.damping)));
        }
        Ok(())
    }

    pub fn candidates(&self) -> Vec<Candidate> {
        if self.fast {
            Candidate::reduced()
        } else {
            Candidate::all()
        }
    }
}

/// Luma damping (8-bit domain) from a quantizer index in 0..=255.
pub fn damping_from_q(q_index: u8) -> u8 {
    (3 + q_index / 64).clamp(MIN_DAMPING, MAX_DAMPING)
}

fn variance(v: &[u16]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().map(|&x| f64::from(x)).sum::<f64>() / n;
    let var = v.iter().map(|&x| (f64::from(x) - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

pub fn sse(src: &[u16], dec: &[u16]) -> f64 {
    assert_eq!(src.len(), dec.len());
    src.iter()
        .zip(dec)
        .map(|(&a, &b)| {
            let d = i64::from(a) - i64::from(b);
            (d * d) as f64
        })
        .sum()
}

/// Contrast-weighted SSE of one block. Variances are population variances;
/// the stabilizing constants scale with the bit depth as variance units.
pub fn cdef_distortion(src: &[u16], dec: &[u16], bit_depth: u8) -> f64 {
    assert_eq!(src.len(), dec.len());
    assert!(!src.is_empty());
    let e = sse(src, dec);
    if e == 0.0 {
        return 0.0;
    }
    let scale = f64::from(1u32 << (2 * u32::from(bit_depth - 8)));
    let c1 = C1 * scale;
    let c2 = C2 * scale * scale;
    let (_, vs) = variance(src);
    let (_, vd) = variance(dec);
    (vs + vd + c1) / (2.0 * (vs * vd + c2).sqrt()) * e
}

fn distortion(metric: Metric, src: &[u16], dec: &[u16], bit_depth: u8) -> f64 {
    match metric {
        Metric::CdefDist => cdef_distortion(src, dec, bit_depth),
        Metric::Sse => sse(src, dec),
    }
}

/// Distortions per coded filter block and candidate, for luma and for the
/// sum of both chroma planes.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionTable {
    /// Coded filter blocks (row, col), raster order.
    pub blocks: Vec<(usize, usize)>,
    pub luma_candidates: Vec<Candidate>,
    /// A single all-zero candidate when chroma is not filtered.
    pub chroma_candidates: Vec<Candidate>,
    luma: Vec<f64>,
    chroma: Vec<f64>,
}

impl DistortionTable {
    /// Builds a table from raw values laid out `[block][candidate]`.
    pub fn from_values(
        blocks: Vec<(usize, usize)>,
        luma_candidates: Vec<Candidate>,
        chroma_candidates: Vec<Candidate>,
        luma: Vec<f64>,
        chroma: Vec<f64>,
    ) -> Result<Self> {
        if luma.len() != blocks.len() * luma_candidates.len()
            || chroma.len() != blocks.len() * chroma_candidates.len()
        {
            return Err(CdefError::Dimensions("distortion table size".into()));
        }
        if luma_candidates.is_empty() || chroma_candidates.is_empty() {
            return Err(CdefError::InvalidParam("empty candidate list".into()));
        }
        Ok(DistortionTable {
            blocks,
            luma_candidates,
            chroma_candidates,
            luma,
            chroma,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn luma(&self, block: usize, cand: usize) -> f64 {
        self.luma[block * self.luma_candidates.len() + cand]
    }

    pub fn chroma(&self, block: usize, cand: usize) -> f64 {
        self.chroma[block * self.chroma_candidates.len() + cand]
    }

    fn num_pairs(&self) -> usize {
        self.luma_candidates.len() * self.chroma_candidates.len()
    }

    fn pair(&self, index: usize) -> (usize, usize) {
        (index / self.chroma_candidates.len(), index % self.chroma_candidates.len())
    }

    fn pair_cost(&self, block: usize, pair: (usize, usize)) -> f64 {
        self.luma(block, pair.0) + self.chroma(block, pair.1)
    }
}

struct PlaneJob<'a> {
    source: &'a Plane,
    padded: PaddedPlane,
    kind: PlaneKind,
    /// Units inside coded filter blocks with their block index.
    units: Vec<(UnitLink, usize)>,
}

fn plane_job<'a>(
    source: &'a Plane,
    decoded: &Plane,
    kind: PlaneKind,
    ss: crate::frame::Subsampling,
    grid: &BlockGrid,
    block_index: &[Option<usize>],
) -> PlaneJob<'a> {
    PlaneJob {
        source,
        padded: PaddedPlane::new(decoded),
        kind,
        units: plane_units(decoded, kind, ss)
            .into_iter()
            .filter_map(|l| {
                let (fr, fc) = grid.fb_of_unit(l.luma_row, l.luma_col);
                block_index[fr * grid.fb_cols + fc].map(|b| (l, b))
            })
            .collect(),
    }
}

fn unit_samples(plane: &Plane, unit_row: usize, unit_col: usize) -> Vec<u16> {
    let r0 = unit_row * UNIT_SIZE;
    let c0 = unit_col * UNIT_SIZE;
    let mut v = Vec::with_capacity(64);
    for r in r0..(r0 + UNIT_SIZE).min(plane.height()) {
        v.extend_from_slice(&plane.row(r)[c0..(c0 + UNIT_SIZE).min(plane.width())]);
    }
    v
}

/// First pass: filter every coded filter block with every candidate.
/// Parallel over candidates; each column is computed independently so the
/// table is identical for any thread count.
pub fn build_table(
    source: &Frame,
    decoded: &Frame,
    dirs: &FrameDirections,
    skip: &SkipMap,
    config: &SearchConfig,
) -> Result<DistortionTable> {
    config.validate()?;
    if !source.same_shape(decoded) {
        return Err(CdefError::Dimensions("source and decoded frames differ in shape".into()));
    }
    let grid = BlockGrid::for_dims(decoded.width(), decoded.height())?;
    skip.check_grid(&grid)?;
    if dirs.grid != grid {
        return Err(CdefError::Dimensions("direction map does not match frame".into()));
    }
    let ss = decoded.subsampling();
    let bd = decoded.bit_depth();
    let blocks = skip.coded_fbs(&grid);
    let mut block_index = vec![None; grid.num_fbs()];
    for (i, &(fr, fc)) in blocks.iter().enumerate() {
        block_index[fr * grid.fb_cols + fc] = Some(i);
    }
    let make_job = |src, dec, kind| plane_job(src, dec, kind, ss, &grid, &block_index);
    let luma_jobs = vec![make_job(source.luma(), decoded.luma(), PlaneKind::Luma)];
    let chroma_jobs: Vec<PlaneJob> = match (source.chroma(), decoded.chroma()) {
        (Some([su, sv]), Some([du, dv])) if ss.chroma_filtered() => vec![
            make_job(su, du, PlaneKind::Chroma),
            make_job(sv, dv, PlaneKind::Chroma),
        ],
        _ => Vec::new(),
    };
    let luma_candidates = config.candidates();
    let chroma_candidates = if chroma_jobs.is_empty() {
        vec![Candidate::default()]
    } else {
        config.candidates()
    };

    let column = |jobs: &[PlaneJob], cand: Candidate| -> Result<Vec<f64>> {
        let mut col = vec![0.0; blocks.len()];
        for job in jobs {
            let preset = match job.kind {
                PlaneKind::Luma => cand.as_luma(),
                PlaneKind::Chroma => cand.as_chroma(),
            };
            let eff = resolve_effective(&preset, job.kind, bd, ss, config.damping)?;
            let mut buf = [0u16; 64];
            for &(link, b) in &job.units {
                let enabled = block_filter_enable(true, skip.unit_coded(link.luma_row, link.luma_col), eff.skip);
                let params = resolve_block(&eff, job.kind, dirs.get(link.luma_row, link.luma_col), enabled);
                let (h, w) = job.padded.filter_unit(link.unit_row, link.unit_col, &params, &mut buf);
                let filtered: Vec<u16> = (0..h).flat_map(|i| buf[i * 8..i * 8 + w].iter().copied()).collect();
                let src = unit_samples(job.source, link.unit_row, link.unit_col);
                col[b] += distortion(config.metric, &src, &filtered, bd);
            }
        }
        Ok(col)
    };
    let to_rows = |cols: Vec<Vec<f64>>, n: usize| -> Vec<f64> {
        let mut out = vec![0.0; blocks.len() * n];
        for (c, col) in cols.iter().enumerate() {
            for (b, &v) in col.iter().enumerate() {
                out[b * n + c] = v;
            }
        }
        out
    };
    let luma_cols = luma_candidates
        .par_iter()
        .map(|&c| column(&luma_jobs, c))
        .collect::<Result<Vec<_>>>()?;
    let chroma_cols = chroma_candidates
        .par_iter()
        .map(|&c| column(&chroma_jobs, c))
        .collect::<Result<Vec<_>>>()?;
    let luma = to_rows(luma_cols, luma_candidates.len());
    let chroma = to_rows(chroma_cols, chroma_candidates.len());
    DistortionTable::from_values(blocks, luma_candidates, chroma_candidates, luma, chroma)
}

/// Chosen presets as (luma, chroma) candidate indices, the per-block ids and
/// the resulting cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub presets: Vec<(usize, usize)>,
    pub ids: Vec<u8>,
    /// Σ over blocks of the chosen preset's distortion.
    pub distortion: f64,
    /// `distortion + λ·B·log2 N`.
    pub cost: f64,
}

fn rate(lambda: f64, blocks: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        lambda * blocks as f64 * (n as f64).log2()
    }
}

/// Per-block argmin over `presets` (ties to the lowest id) and the summed
/// distortion.
pub fn assign_ids(table: &DistortionTable, presets: &[(usize, usize)]) -> (Vec<u8>, f64) {
    let mut total = 0.0;
    let ids = (0..table.num_blocks())
        .map(|b| {
            let mut best = 0;
            let mut best_cost = f64::INFINITY;
            for (i, &p) in presets.iter().enumerate() {
                let c = table.pair_cost(b, p);
                if c < best_cost {
                    best = i;
                    best_cost = c;
                }
            }
            total += best_cost;
            best as u8
        })
        .collect();
    (ids, total)
}

fn selection(table: &DistortionTable, presets: Vec<(usize, usize)>, lambda: f64) -> Selection {
    let (ids, distortion) = assign_ids(table, &presets);
    let cost = distortion + rate(lambda, table.num_blocks(), presets.len());
    Selection {
        presets,
        ids,
        distortion,
        cost,
    }
}

/// Pair minimizing `Σ_b min(floor[b], cost(b, pair))`; ties to the lowest
/// pair index.
fn best_addition(table: &DistortionTable, floor: &[f64]) -> ((usize, usize), f64) {
    let mut best = (0, f64::INFINITY);
    for p in 0..table.num_pairs() {
        let pair = table.pair(p);
        let mut total = 0.0;
        for (b, &f) in floor.iter().enumerate() {
            total += f.min(table.pair_cost(b, pair));
            if total >= best.1 {
                break;
            }
        }
        if total < best.1 {
            best = (p, total);
        }
    }
    (table.pair(best.0), best.1)
}

/// Greedy preset growth: the best single preset, then repeatedly the preset
/// that most lowers the distortion with earlier choices fixed. Returns the
/// prefix of size 1, 2, 4 or 8 (up to `max_presets`) with the lowest cost.
pub fn greedy_select(table: &DistortionTable, config: &SearchConfig) -> Selection {
    if table.num_blocks() == 0 {
        return Selection {
            presets: vec![(0, 0)],
            ids: Vec::new(),
            distortion: 0.0,
            cost: 0.0,
        };
    }
    let mut floor = vec![f64::INFINITY; table.num_blocks()];
    let mut chosen = Vec::new();
    let mut best: Option<Selection> = None;
    while chosen.len() < config.max_presets {
        let (pair, _) = best_addition(table, &floor);
        chosen.push(pair);
        for (b, f) in floor.iter_mut().enumerate() {
            *f = f.min(table.pair_cost(b, pair));
        }
        if chosen.len().is_power_of_two() {
            let s = selection(table, chosen.clone(), config.lambda);
            if best.as_ref().is_none_or(|b| s.cost < b.cost) {
                best = Some(s);
            }
        }
    }
    best.expect("at least one preset")
}

/// Coordinate descent over preset slots with the preset count fixed. Each
/// slot is replaced by the best pair given the others; the cost never
/// increases. Returns the final selection and the cost after each pass.
pub fn refine(sel: &Selection, table: &DistortionTable, config: &SearchConfig) -> (Selection, Vec<f64>) {
    let mut presets = sel.presets.clone();
    let mut current = selection(table, presets.clone(), config.lambda);
    let mut history = vec![current.cost];
    if table.num_blocks() == 0 {
        return (current, history);
    }
    for _ in 0..config.refine_passes {
        let mut changed = false;
        for slot in 0..presets.len() {
            let floor: Vec<f64> = (0..table.num_blocks())
                .map(|b| {
                    presets
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != slot)
                        .map(|(_, &p)| table.pair_cost(b, p))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let (pair, total) = best_addition(table, &floor);
            if pair != presets[slot] && total < current.distortion {
                presets[slot] = pair;
                current = selection(table, presets.clone(), config.lambda);
                changed = true;
            }
        }
        history.push(current.cost);
        if !changed {
            break;
        }
    }
    (current, history)
}

/// Greedy search followed by refinement.
pub fn select(table: &DistortionTable, config: &SearchConfig) -> Selection {
    let greedy = greedy_select(table, config);
    refine(&greedy, table, config).0
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Global minimum of the cost over sets of 1, 2, 4 or 8 distinct presets.
/// Only for small instances.
pub fn exhaustive_select(table: &DistortionTable, config: &SearchConfig) -> Result<Selection> {
    if table.num_blocks() == 0 {
        return Ok(greedy_select(table, config));
    }
    let pairs = table.num_pairs();
    let sizes: Vec<usize> = [1, 2, 4, 8].into_iter().filter(|&n| n <= config.max_presets && n <= pairs).collect();
    let work: u128 = sizes
        .iter()
        .map(|&n| binomial(pairs as u128, n as u128).saturating_mul(table.num_blocks() as u128))
        .fold(0, u128::saturating_add);
    if work > EXHAUSTIVE_LIMIT {
        return Err(CdefError::TooLarge(work));
    }
    let mut best: Option<Selection> = None;
    for n in sizes {
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let presets: Vec<_> = idx.iter().map(|&i| table.pair(i)).collect();
            let s = selection(table, presets, config.lambda);
            if best.as_ref().is_none_or(|b| s.cost < b.cost) {
                best = Some(s);
            }
            // next combination in lexicographic order
            let Some(pos) = (0..n).rev().find(|&i| idx[i] < pairs - n + i) else {
                break;
            };
            idx[pos] += 1;
            for i in pos + 1..n {
                idx[i] = idx[i - 1] + 1;
            }
        }
    }
    Ok(best.expect("non-empty search"))
}

/// Signaled parameters for a selection.
pub fn selection_to_params(sel: &Selection, table: &DistortionTable, damping: u8) -> FrameParams {
    let n = sel.presets.len();
    debug_assert!(n.is_power_of_two() && n <= 8);
    let presets = sel
        .presets
        .iter()
        .map(|&(l, c)| {
            let l = table.luma_candidates[l].as_luma();
            let c = table.chroma_candidates[c].as_chroma();
            CdefPreset {
                chroma_pri: c.chroma_pri,
                chroma_skip: c.chroma_skip,
                chroma_sec_idx: c.chroma_sec_idx,
                ..l
            }
        })
        .collect();
    FrameParams {
        damping,
        fb_bits: n.trailing_zeros() as u8,
        presets,
        fb_preset_ids: sel.ids.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(luma: Vec<Vec<f64>>, chroma: Vec<Vec<f64>>) -> DistortionTable {
        let nb = luma.len();
        let nl = luma[0].len();
        let nc = chroma[0].len();
        DistortionTable::from_values(
            (0..nb).map(|b| (0, b)).collect(),
            Candidate::all()[..nl].to_vec(),
            Candidate::all()[..nc].to_vec(),
            luma.concat(),
            chroma.concat(),
        )
        .unwrap()
    }

    #[test]
    fn candidate_spaces() {
        assert_eq!(Candidate::all().len(), 128);
        assert_eq!(Candidate::reduced().len(), 72);
        assert!(Candidate::reduced().contains(&Candidate::default()));
    }

    #[test]
    fn distortion_examples() {
        let flat = [100u16; 64];
        assert_eq!(cdef_distortion(&flat, &flat, 8), 0.0);
        let plus4 = [104u16; 64];
        let d = cdef_distortion(&flat, &plus4, 8);
        assert!((d - 6.25 / (2.0 * 312.5f64.sqrt()) * 1024.0).abs() < 1e-9);
        assert!((d - 181.02).abs() < 0.01);
    }

    #[test]
    fn distortion_with_matched_variance() {
        // alternating ±10 has population variance 100; shifting a copy
        // keeps the variance and changes the SSE
        let src: Vec<u16> = (0..64).map(|i| if i % 2 == 0 { 90 } else { 110 }).collect();
        let dec: Vec<u16> = src.iter().map(|&v| v + 4).collect();
        let e = sse(&src, &dec);
        assert_eq!(e, 1024.0);
        let expected = (100.0 + 100.0 + C1) / (2.0 * (100.0f64 * 100.0 + C2).sqrt()) * e;
        assert!((cdef_distortion(&src, &dec, 8) - expected).abs() < 1e-9);
        let factor = (206.25f64) / (2.0 * 10312.5f64.sqrt());
        assert!((factor * 1000.0 - 1015.5).abs() < 0.05);
    }

    #[test]
    fn damping_endpoints() {
        assert_eq!(damping_from_q(0), 3);
        assert_eq!(damping_from_q(100), 4);
        assert_eq!(damping_from_q(255), 6);
    }

    #[test]
    fn one_block_greedy_is_argmin() {
        let t = table(vec![vec![5.0, 3.0, 4.0]], vec![vec![2.0, 1.0]]);
        let cfg = SearchConfig {
            max_presets: 8,
            ..Default::default()
        };
        let s = greedy_select(&t, &cfg);
        assert_eq!(s.presets, vec![(1, 1)]);
        assert_eq!(s.cost, 4.0);
        assert_eq!(exhaustive_select(&t, &cfg).unwrap().cost, 4.0);
    }

    #[test]
    fn disjoint_optima_both_selected() {
        let t = table(vec![vec![0.0, 10.0], vec![10.0, 0.0]], vec![vec![0.0], vec![0.0]]);
        let cfg = SearchConfig {
            max_presets: 2,
            ..Default::default()
        };
        let s = greedy_select(&t, &cfg);
        assert_eq!(s.cost, 0.0);
        assert_eq!(s.presets.len(), 2);
        assert_eq!(s.ids, vec![0, 1]);
    }

    #[test]
    fn huge_lambda_selects_one_preset() {
        let t = table(vec![vec![0.0, 10.0], vec![10.0, 0.0]], vec![vec![0.0], vec![0.0]]);
        let cfg = SearchConfig {
            lambda: 1e12,
            max_presets: 8,
            ..Default::default()
        };
        assert_eq!(greedy_select(&t, &cfg).presets.len(), 1);
    }

    #[test]
    fn refine_fixes_greedy_compromise() {
        // Candidate 0 is the best single preset but a poor partner for either
        // specialist; greedy keeps it, refinement swaps it out.
        let t = table(
            vec![vec![5.0, 0.0, 20.0], vec![5.0, 20.0, 0.0], vec![5.0, 0.0, 20.0]],
            vec![vec![0.0]; 3],
        );
        let cfg = SearchConfig {
            max_presets: 2,
            ..Default::default()
        };
        let g = greedy_select(&t, &cfg);
        let opt = exhaustive_select(&t, &cfg).unwrap();
        let (r, history) = refine(&g, &t, &cfg);
        assert!(g.cost > opt.cost);
        assert!(r.cost <= g.cost);
        assert_eq!(r.cost, opt.cost);
        assert!(history.windows(2).all(|w| w[1] <= w[0]));
        // fixpoint
        let (again, _) = refine(&r, &t, &cfg);
        assert_eq!(again.presets, r.presets);
    }

    #[test]
    fn empty_table() {
        let t = DistortionTable::from_values(vec![], Candidate::all(), vec![Candidate::default()], vec![], vec![])
            .unwrap();
        let s = greedy_select(&t, &SearchConfig::default());
        assert!(s.ids.is_empty());
        let p = selection_to_params(&s, &t, 3);
        assert_eq!(p.presets.len(), 1);
    }

    #[test]
    fn exhaustive_guard() {
        let t = table(vec![vec![1.0; 128]; 4], vec![vec![1.0; 128]; 4]);
        let cfg = SearchConfig::default();
        assert!(matches!(exhaustive_select(&t, &cfg), Err(CdefError::TooLarge(_))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SearchConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.max_presets = 3;
        assert!(cfg.validate().is_err());
        cfg.max_presets = 4;
        cfg.lambda = f64::NAN;
        assert!(cfg.validate().is_err());
    }
}
