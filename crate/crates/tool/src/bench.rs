//! Stage timings on the synthetic image.

use std::time::{Duration, Instant};

use cdef_core::search::{build_table, select, SearchConfig};
use cdef_core::{apply_frame_params, search_frame_directions, BlockGrid, SkipMap};

use crate::degrade::degrade;
use crate::pipeline::Result;
use crate::testimage::natural_image;

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub stage: &'static str,
    /// Best of the runs.
    pub best: Duration,
    pub mean: Duration,
}

pub fn run_bench(size: usize, q_step: f64, seed: u64, runs: usize, config: &SearchConfig) -> Result<Vec<BenchRow>> {
    let source = natural_image(size, size, seed);
    let decoded = degrade(&source, q_step);
    let grid = BlockGrid::for_dims(size, size)?;
    let skip = SkipMap::all_coded(&grid);
    let mut samples: [Vec<Duration>; 4] = Default::default();
    for _ in 0..runs.max(1) {
        let t0 = Instant::now();
        let dirs = search_frame_directions(decoded.luma());
        let t1 = Instant::now();
        let table = build_table(&source, &decoded, &dirs, &skip, config)?;
        let t2 = Instant::now();
        let sel = select(&table, config);
        let params = cdef_core::search::selection_to_params(&sel, &table, config.damping);
        let t3 = Instant::now();
        apply_frame_params(&decoded, &params, &skip, &dirs)?;
        let t4 = Instant::now();
        for (s, d) in samples.iter_mut().zip([t1 - t0, t2 - t1, t3 - t2, t4 - t3]) {
            s.push(d);
        }
    }
    let stages = ["directions", "table", "select", "filter"];
    Ok(stages
        .into_iter()
        .zip(samples)
        .map(|(stage, s)| BenchRow {
            stage,
            best: s.iter().copied().min().unwrap_or_default(),
            mean: s.iter().sum::<Duration>() / s.len() as u32,
        })
        .collect())
}
