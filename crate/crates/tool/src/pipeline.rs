//! Frame pipeline: direction search, preset search, signaling and filtering.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use cdef_core::bitstream::{pack, unpack, Bitstring};
use cdef_core::search::{build_table, damping_from_q, select, selection_to_params, Metric, SearchConfig, Selection};
use cdef_core::sidecar::Sidecar;
use cdef_core::{
    apply_frame_params, count_operations, search_frame_directions, BlockGrid, CdefError, Frame, FrameDirections,
    FrameParams, OpCounts, SkipMap,
};

use crate::metrics::{frame_psnr, Psnr, ShapeMismatch};
use crate::y4m::{Y4mError, Y4mStream};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Cdef(#[from] CdefError),
    #[error(transparent)]
    Y4m(#[from] Y4mError),
    #[error(transparent)]
    Shape(#[from] ShapeMismatch),
    #[error("thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Rate multiplier for a quantization step.
pub fn lambda_for_step(q_step: f64) -> f64 {
    0.03 * q_step * q_step
}

/// Quantizer index in 0..=255 for a quantization step.
pub fn q_index_for_step(q_step: f64) -> u8 {
    (4.0 * q_step).round().clamp(0.0, 255.0) as u8
}

/// Search settings from command-line style inputs. λ and damping follow the
/// quantization step unless given explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub q_step: Option<f64>,
    pub lambda: Option<f64>,
    pub damping: Option<u8>,
    pub max_presets: usize,
    pub metric: Metric,
    pub fast: bool,
    pub refine_passes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let c = SearchConfig::default();
        SearchOptions {
            q_step: None,
            lambda: None,
            damping: None,
            max_presets: c.max_presets,
            metric: c.metric,
            fast: c.fast,
            refine_passes: c.refine_passes,
        }
    }
}

impl SearchOptions {
    pub fn config(&self) -> Result<SearchConfig> {
        let lambda = match (self.lambda, self.q_step) {
            (Some(l), _) => l,
            (None, Some(q)) => lambda_for_step(q),
            (None, None) => return Err(PipelineError::Input("either a quantization step or lambda is required".into())),
        };
        let damping = self
            .damping
            .or(self.q_step.map(|q| damping_from_q(q_index_for_step(q))))
            .unwrap_or(3);
        let config = SearchConfig {
            lambda,
            max_presets: self.max_presets,
            metric: self.metric,
            fast: self.fast,
            refine_passes: self.refine_passes,
            damping,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timing {
    pub directions: Duration,
    pub table: Duration,
    pub select: Duration,
    pub filter: Duration,
}

#[derive(Debug, Clone)]
pub struct EncodedFrame {
    pub directions: FrameDirections,
    pub selection: Selection,
    pub params: FrameParams,
    pub bits: Bitstring,
    pub filtered: Frame,
    pub timing: Timing,
}

/// Searches presets for one decoded frame against its source and filters it.
pub fn encode_frame(source: &Frame, decoded: &Frame, skip: &SkipMap, config: &SearchConfig) -> Result<EncodedFrame> {
    let grid = BlockGrid::for_dims(decoded.width(), decoded.height())?;
    let t0 = Instant::now();
    let directions = search_frame_directions(decoded.luma());
    let t1 = Instant::now();
    let table = build_table(source, decoded, &directions, skip, config)?;
    let t2 = Instant::now();
    let selection = select(&table, config);
    let params = selection_to_params(&selection, &table, config.damping);
    let bits = pack(&params, &grid, skip, decoded.subsampling())?;
    let t3 = Instant::now();
    let filtered = apply_frame_params(decoded, &params, skip, &directions)?;
    let t4 = Instant::now();
    Ok(EncodedFrame {
        directions,
        selection,
        params,
        bits,
        filtered,
        timing: Timing {
            directions: t1 - t0,
            table: t2 - t1,
            select: t3 - t2,
            filter: t4 - t3,
        },
    })
}

/// Decoder side: recovers the parameters from `bits` and filters.
pub fn decode_frame(decoded: &Frame, bits: &Bitstring, skip: &SkipMap) -> Result<Frame> {
    let grid = BlockGrid::for_dims(decoded.width(), decoded.height())?;
    let params = unpack(bits, &grid, skip, decoded.subsampling())?;
    let directions = search_frame_directions(decoded.luma());
    Ok(apply_frame_params(decoded, &params, skip, &directions)?)
}

#[derive(Debug, Clone)]
pub struct FrameStats {
    pub frame: usize,
    pub degraded: (Vec<Psnr>, Psnr),
    pub filtered: (Vec<Psnr>, Psnr),
    pub params: FrameParams,
    pub histogram: [usize; 8],
    pub bits: usize,
    pub timing: Timing,
    /// Direction search operations summed over all units.
    pub ops: OpCounts,
}

#[derive(Debug, Clone, Default)]
pub struct StatsReport {
    pub frames: Vec<FrameStats>,
}

fn psnr_field(p: &Psnr) -> String {
    match p.db() {
        Some(db) => format!("{db:.4}"),
        None => "inf".into(),
    }
}

impl StatsReport {
    pub const HEADER: &'static str = "frame,plane,psnr_degraded,psnr_filtered,lossless,presets,fb_bits,damping,bits,\
        presets_dump,hist_d0,hist_d1,hist_d2,hist_d3,hist_d4,hist_d5,hist_d6,hist_d7,\
        ms_directions,ms_table,ms_select,ms_filter,additions,multiplies,comparisons,line_sums";

    /// One row per plane plus an `all` row per frame.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for f in &self.frames {
            let dump: Vec<String> = f
                .params
                .presets
                .iter()
                .map(|p| {
                    format!(
                        "y{}.{}.{}/c{}.{}.{}",
                        p.luma_pri,
                        p.luma_sec_idx,
                        u8::from(p.luma_skip),
                        p.chroma_pri,
                        p.chroma_sec_idx,
                        u8::from(p.chroma_skip)
                    )
                })
                .collect();
            let hist: Vec<String> = f.histogram.iter().map(ToString::to_string).collect();
            let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
            let names = ["y", "u", "v"];
            let rows = f
                .degraded
                .0
                .iter()
                .zip(&f.filtered.0)
                .enumerate()
                .map(|(i, (d, o))| (names[i], d, o))
                .chain(std::iter::once(("all", &f.degraded.1, &f.filtered.1)));
            for (name, d, o) in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    f.frame,
                    name,
                    psnr_field(d),
                    psnr_field(o),
                    u8::from(o.is_lossless()),
                    f.params.presets.len(),
                    f.params.fb_bits,
                    f.params.damping,
                    f.bits,
                    dump.join(";"),
                    hist.join(","),
                    ms(f.timing.directions),
                    ms(f.timing.table),
                    ms(f.timing.select),
                    ms(f.timing.filter),
                    f.ops.additions,
                    f.ops.multiplies,
                    f.ops.comparisons,
                    f.ops.line_sums,
                );
            }
        }
        out
    }
}

fn frame_ops(decoded: &Frame, units: usize) -> OpCounts {
    let block = decoded.luma().block8_clamped(0, 0);
    let (_, per_unit) = count_operations(&block, decoded.bit_depth());
    let n = u32::try_from(units).unwrap_or(u32::MAX);
    OpCounts {
        additions: per_unit.additions.saturating_mul(n),
        multiplies: per_unit.multiplies.saturating_mul(n),
        comparisons: per_unit.comparisons.saturating_mul(n),
        line_sums: per_unit.line_sums.saturating_mul(n),
        max_intermediate: per_unit.max_intermediate,
    }
}

pub struct SearchRun {
    pub filtered: Y4mStream,
    pub sidecar: Sidecar,
    pub report: StatsReport,
}

fn sidecar_for(stream: &Y4mStream) -> Result<Sidecar> {
    let h = &stream.header;
    let dim = |v: usize| u16::try_from(v).map_err(|_| PipelineError::Input(format!("dimension {v} exceeds 65535")));
    Ok(Sidecar {
        width: dim(h.width)?,
        height: dim(h.height)?,
        bit_depth: h.bit_depth,
        subsampling: h.subsampling,
        frames: Vec::new(),
    })
}

fn frame_skip(stream: &Y4mStream, skip: Option<&SkipMap>) -> Result<SkipMap> {
    let grid = BlockGrid::for_dims(stream.header.width, stream.header.height)?;
    match skip {
        Some(s) => {
            s.check_grid(&grid)?;
            Ok(s.clone())
        }
        None => Ok(SkipMap::all_coded(&grid)),
    }
}

/// Encoder side over a whole stream. The skip map applies to every frame.
pub fn run_search(
    source: &Y4mStream,
    decoded: &Y4mStream,
    skip: Option<&SkipMap>,
    config: &SearchConfig,
) -> Result<SearchRun> {
    if source.frames.len() != decoded.frames.len() {
        return Err(PipelineError::Input(format!(
            "source has {} frames, decoded has {}",
            source.frames.len(),
            decoded.frames.len()
        )));
    }
    let skip = frame_skip(decoded, skip)?;
    let mut sidecar = sidecar_for(decoded)?;
    let mut report = StatsReport::default();
    let mut filtered = Vec::new();
    for (i, (src, dec)) in source.frames().zip(decoded.frames()).enumerate() {
        let enc = encode_frame(src, dec, &skip, config)?;
        report.frames.push(FrameStats {
            frame: i,
            degraded: frame_psnr(src, dec)?,
            filtered: frame_psnr(src, &enc.filtered)?,
            histogram: enc.directions.histogram(),
            bits: enc.bits.len(),
            timing: enc.timing,
            ops: frame_ops(dec, enc.directions.results.len()),
            params: enc.params,
        });
        sidecar.frames.push(enc.bits);
        filtered.push(enc.filtered);
    }
    Ok(SearchRun {
        filtered: decoded.with_frames(filtered)?,
        sidecar,
        report,
    })
}

/// Decoder side over a whole stream.
pub fn run_decode(decoded: &Y4mStream, sidecar: &Sidecar, skip: Option<&SkipMap>) -> Result<Y4mStream> {
    let h = &decoded.header;
    if (usize::from(sidecar.width), usize::from(sidecar.height), sidecar.bit_depth, sidecar.subsampling)
        != (h.width, h.height, h.bit_depth, h.subsampling)
    {
        return Err(PipelineError::Input("sidecar does not describe this stream".into()));
    }
    if sidecar.frames.len() != decoded.frames.len() {
        return Err(PipelineError::Input(format!(
            "sidecar has {} frames, stream has {}",
            sidecar.frames.len(),
            decoded.frames.len()
        )));
    }
    let skip = frame_skip(decoded, skip)?;
    let frames = decoded
        .frames()
        .zip(&sidecar.frames)
        .map(|(f, bits)| decode_frame(f, bits, &skip))
        .collect::<Result<Vec<_>>>()?;
    Ok(decoded.with_frames(frames)?)
}

/// Runs `f` on a dedicated pool, or the global pool when `threads` is `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degrade::degrade;
    use crate::testimage::natural_image;

    #[test]
    fn q_mapping() {
        assert_eq!(q_index_for_step(40.0), 160);
        assert_eq!(q_index_for_step(100.0), 255);
        assert_eq!(lambda_for_step(10.0), 3.0);
        let c = SearchOptions { q_step: Some(40.0), ..Default::default() }.config().unwrap();
        assert_eq!((c.damping, c.lambda), (5, 48.0));
        assert!(SearchOptions::default().config().is_err());
    }

    #[test]
    fn decode_reproduces_encode() {
        let src = natural_image(80, 72, 3);
        let dec = degrade(&src, 30.0);
        let grid = BlockGrid::for_dims(80, 72).unwrap();
        let mut skip = SkipMap::all_coded(&grid);
        for c in 0..grid.unit_cols {
            skip.set(1, c, false);
        }
        let config = SearchOptions { q_step: Some(30.0), fast: true, ..Default::default() }.config().unwrap();
        let enc = encode_frame(&src, &dec, &skip, &config).unwrap();
        assert_eq!(decode_frame(&dec, &enc.bits, &skip).unwrap(), enc.filtered);
    }

    #[test]
    fn csv_shape() {
        let src = natural_image(32, 32, 1);
        let dec = degrade(&src, 20.0);
        let s = Y4mStream::from_frames(vec![src]).unwrap();
        let d = Y4mStream::from_frames(vec![dec]).unwrap();
        let config = SearchOptions { q_step: Some(20.0), fast: true, ..Default::default() }.config().unwrap();
        let run = run_search(&s, &d, None, &config).unwrap();
        let csv = run.report.to_csv();
        let cols = StatsReport::HEADER.split(',').count();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 4);
        assert!(lines.iter().all(|l| l.split(',').count() == cols));
        assert_eq!(run.report.frames[0].histogram.iter().sum::<usize>(), 16);
        assert_eq!(run.report.frames[0].ops.line_sums, 16 * 90);
    }
}
