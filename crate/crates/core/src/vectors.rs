//! Text conformance vectors: constraint function, line tables, tap tables
//! and filtered 8×8 blocks.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::direction::{search_direction, LineTables};
use crate::filter::{constraint, filter_pixel, floor_log2, gather_taps, taps_for, Parity, ResolvedBlockParams};
use crate::frame::Plane;

pub const VECTOR_SEED: u64 = 0xCDEF_2017;
pub const FILTERED_BLOCKS: usize = 64;

/// Primary strengths exercised by the constraint table: the signaled range
/// plus the special strength.
pub fn constraint_strengths() -> impl Iterator<Item = i32> {
    (0..16).chain(std::iter::once(19))
}

/// Valid luma dampings for a strength.
pub fn valid_dampings(strength: i32) -> impl Iterator<Item = i32> {
    let min = if strength > 0 { floor_log2(strength as u32) as i32 } else { 0 };
    (3..=6).filter(move |&d| d >= min)
}

pub fn constraint_table() -> String {
    let mut s = String::from("# strength damping: f(d) for d = -255..=255\n");
    for strength in constraint_strengths() {
        for damping in valid_dampings(strength) {
            write!(s, "{strength} {damping}:").unwrap();
            for d in -255..=255 {
                write!(s, " {}", constraint(d, strength, damping)).unwrap();
            }
            s.push('\n');
        }
    }
    s
}

pub fn line_tables() -> String {
    let t = LineTables;
    let mut s = String::new();
    for d in 0..8 {
        writeln!(s, "direction {d}").unwrap();
        for i in 0..8 {
            let row: Vec<String> = (0..8).map(|j| t.line_index(d, i, j).to_string()).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        let counts: Vec<String> = (0..t.line_count(d)).map(|k| t.pixels_in_line(d, k).to_string()).collect();
        writeln!(s, "counts {}", counts.join(" ")).unwrap();
    }
    s
}

pub fn tap_tables() -> String {
    let mut s = String::from("# direction parity: (di,dj,w16) primary | secondary\n");
    for d in 0..8 {
        for parity in [Parity::Even, Parity::Odd] {
            let t = taps_for(d, parity);
            let fmt = |taps: &[crate::filter::Tap]| {
                taps.iter()
                    .map(|t| format!("({},{},{})", t.di, t.dj, t.weight))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(s, "{d} {parity:?}: {} | {}", fmt(&t.primary), fmt(&t.secondary)).unwrap();
        }
    }
    s
}

/// A 12×12 window around an 8×8 block, filtered with its own direction and
/// random parameters.
pub fn filtered_blocks() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(VECTOR_SEED);
    let mut s = String::new();
    for n in 0..FILTERED_BLOCKS {
        let bit_depth = [8u8, 10, 12][n % 3];
        let max = (1i32 << bit_depth) - 1;
        let shift = bit_depth - 8;
        let base = rng.gen_range(0..=max);
        let gx = rng.gen_range(-6i32..=6) << shift;
        let gy = rng.gen_range(-6i32..=6) << shift;
        let noise = rng.gen_range(1i32..=12) << shift;
        let edge = rng.gen_range(0..4);
        let samples: Vec<u16> = (0..144i32)
            .map(|p| {
                let (i, j) = (p / 12, p % 12);
                let step = match edge {
                    1 if j > i => 60 << shift,
                    2 if i + j > 11 => -(50 << shift),
                    _ => 0,
                };
                let v = base + gx * (j - 6) + gy * (i - 6) + step + rng.gen_range(-noise..=noise);
                v.clamp(0, max) as u16
            })
            .collect();
        let plane = Plane::from_samples(12, 12, bit_depth, samples).unwrap();
        let mut inner = [[0u16; 8]; 8];
        for (i, row) in inner.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = plane.get(i + 2, j + 2);
            }
        }
        let dir = search_direction(&inner, bit_depth);
        let pri = rng.gen_range(0..16);
        let sec = [0, 1, 2, 4][rng.gen_range(0..4)];
        let min_d = if pri > 0 { floor_log2(pri as u32) as i32 } else { 0 };
        let damping = rng.gen_range(3.max(min_d)..=6) + i32::from(shift);
        let params = ResolvedBlockParams::from_8bit(pri, sec, damping, dir.direction, bit_depth, true);
        let taps = taps_for(params.direction, params.parity);
        writeln!(
            s,
            "vector {n} bit_depth {bit_depth} direction {} pri {} sec {} damping {damping}",
            dir.direction, params.pri_strength, params.sec_strength
        )
        .unwrap();
        for i in 0..12 {
            let row: Vec<String> = plane.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        writeln!(s, "out").unwrap();
        for i in 2..10 {
            let row: Vec<String> = (2..10)
                .map(|j| {
                    let values = gather_taps(&plane, i, j, &taps);
                    filter_pixel(i32::from(plane.get(i, j)), &values, &taps, &params).to_string()
                })
                .collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
    }
    s
}

/// All vector files as (file name, contents).
pub fn golden_vectors() -> Vec<(&'static str, String)> {
    vec![
        ("constraint.txt", constraint_table()),
        ("line_tables.txt", line_tables()),
        ("taps.txt", tap_tables()),
        ("filtered_blocks.txt", filtered_blocks()),
    ]
}
