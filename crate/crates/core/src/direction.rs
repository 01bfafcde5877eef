//! Per-8×8 direction estimation.
//!
//! Each of the 8 directions partitions the block into lines of pixels. The
//! best direction is the one whose line means best approximate the block,
//! which reduces to maximizing `s[d] = Σ_k (Σ_{p∈line k} x_p)² / N_k`. All
//! scores are scaled by 840 (lcm of 1..=8) so the search stays in integers.

/// Least common multiple of the possible line lengths.
pub const LCM: i32 = 840;

/// `840 / n` for line lengths `n` in `1..=8`.
pub const DIV_TABLE: [i32; 9] = [0, 840, 420, 280, 210, 168, 140, 120, 105];

/// Maximum number of lines in any direction.
pub const MAX_LINES: usize = 15;

/// Line number of pixel (`i`, `j`) under direction `d`. Direction 0 is the
/// 45° up-right diagonal, 2 is horizontal, 4 is 135°, 6 vertical; odd
/// directions sit 22.5° in between.
pub const fn line_index(d: usize, i: usize, j: usize) -> usize {
    match d {
        0 => i + j,
        1 => i + j / 2,
        2 => i,
        3 => 3 + i - j / 2,
        4 => 7 + i - j,
        5 => 3 - i / 2 + j,
        6 => j,
        7 => i / 2 + j,
        _ => panic!("direction out of range"),
    }
}

const fn build_line_table() -> [[[u8; 8]; 8]; 8] {
    let mut t = [[[0u8; 8]; 8]; 8];
    let mut d = 0;
    while d < 8 {
        let mut i = 0;
        while i < 8 {
            let mut j = 0;
            while j < 8 {
                t[d][i][j] = line_index(d, i, j) as u8;
                j += 1;
            }
            i += 1;
        }
        d += 1;
    }
    t
}

const fn build_line_counts() -> [[u8; MAX_LINES]; 8] {
    let mut n = [[0u8; MAX_LINES]; 8];
    let mut d = 0;
    while d < 8 {
        let mut i = 0;
        while i < 8 {
            let mut j = 0;
            while j < 8 {
                n[d][line_index(d, i, j)] += 1;
                j += 1;
            }
            i += 1;
        }
        d += 1;
    }
    n
}

pub const LINE_TABLE: [[[u8; 8]; 8]; 8] = build_line_table();
pub const LINE_COUNTS: [[u8; MAX_LINES]; 8] = build_line_counts();

/// Read-only view over the line geometry of all 8 directions.
#[derive(Debug, Clone, Copy, Default)]
pub struct LineTables;

impl LineTables {
    pub fn line_index(&self, d: usize, i: usize, j: usize) -> usize {
        LINE_TABLE[d][i][j] as usize
    }

    /// Number of non-empty lines for direction `d`.
    pub fn line_count(&self, d: usize) -> usize {
        LINE_COUNTS[d].iter().filter(|&&n| n > 0).count()
    }

    /// Pixel count `N_{d,k}`.
    pub fn pixels_in_line(&self, d: usize, k: usize) -> usize {
        LINE_COUNTS[d][k] as usize
    }

    /// Precomputed `840 / N_{d,k}`.
    pub fn weight(&self, d: usize, k: usize) -> i32 {
        DIV_TABLE[LINE_COUNTS[d][k] as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionResult {
    pub direction: u8,
    /// 840-scaled scores, one per direction.
    pub scores: [i32; 8],
    /// `scores[direction] - scores[(direction + 4) % 8]`.
    pub contrast: i32,
}

/// Centers an 8×8 block in the 8-bit domain.
#[inline]
fn centered(block: &[[u16; 8]; 8], bit_depth: u8) -> [[i32; 8]; 8] {
    let shift = u32::from(bit_depth - 8);
    let mut x = [[0i32; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            x[i][j] = (i32::from(block[i][j]) >> shift) - 128;
        }
    }
    x
}

/// Index of the first maximum.
fn first_max(scores: &[i32; 8]) -> usize {
    let mut best = 0;
    for d in 1..8 {
        if scores[d] > scores[best] {
            best = d;
        }
    }
    best
}

pub fn search_direction(block: &[[u16; 8]; 8], bit_depth: u8) -> DirectionResult {
    let x = centered(block, bit_depth);
    let mut partial = [[0i32; MAX_LINES]; 8];
    for i in 0..8 {
        for j in 0..8 {
            let v = x[i][j];
            for (d, lines) in partial.iter_mut().enumerate() {
                lines[LINE_TABLE[d][i][j] as usize] += v;
            }
        }
    }
    let mut scores = [0i32; 8];
    for d in 0..8 {
        for k in 0..MAX_LINES {
            let n = LINE_COUNTS[d][k] as usize;
            if n > 0 {
                scores[d] += partial[d][k] * partial[d][k] * DIV_TABLE[n];
            }
        }
    }
    let best = first_max(&scores);
    DirectionResult {
        direction: best as u8,
        scores,
        contrast: scores[best] - scores[(best + 4) & 7],
    }
}

/// Brute-force reference: per-direction squared error against the closest
/// perfectly directional block, evaluated from the line means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleResult {
    pub direction: u8,
    /// `840 · E_d²` for each direction, exact.
    pub scaled_ssd: [i64; 8],
}

pub fn search_direction_oracle(block: &[[u16; 8]; 8], bit_depth: u8) -> OracleResult {
    let x = centered(block, bit_depth);
    let mut scaled_ssd = [0i64; 8];
    for (d, out) in scaled_ssd.iter_mut().enumerate() {
        let mut lines: Vec<Vec<i64>> = vec![Vec::new(); MAX_LINES];
        for i in 0..8 {
            for j in 0..8 {
                lines[line_index(d, i, j)].push(i64::from(x[i][j]));
            }
        }
        for line in lines.iter().filter(|l| !l.is_empty()) {
            // x - mean = (n*x - sum) / n, so the squared error of the line is
            // Σ (n*x - sum)² / n², which is exact after scaling by 840.
            let n = line.len() as i64;
            let sum: i64 = line.iter().sum();
            let num: i64 = line.iter().map(|&v| (n * v - sum).pow(2)).sum();
            let scaled = 840 * num;
            assert_eq!(scaled % (n * n), 0, "840·E² is integral");
            *out += scaled / (n * n);
        }
    }
    let mut best = 0;
    for d in 1..8 {
        if scaled_ssd[d] < scaled_ssd[best] {
            best = d;
        }
    }
    OracleResult {
        direction: best as u8,
        scaled_ssd,
    }
}

/// Arithmetic tally of one instrumented direction search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounts {
    pub additions: u32,
    pub multiplies: u32,
    pub comparisons: u32,
    pub line_sums: u32,
    /// Largest magnitude reached by any intermediate value, including
    /// `840 · Σ x²`.
    pub max_intermediate: i64,
}

struct Tally {
    ops: OpCounts,
}

impl Tally {
    fn see(&mut self, v: i64) -> i64 {
        self.ops.max_intermediate = self.ops.max_intermediate.max(v.abs());
        v
    }

    fn add(&mut self, a: i64, b: i64) -> i64 {
        self.ops.additions += 1;
        self.see(a + b)
    }

    fn mul(&mut self, a: i64, b: i64) -> i64 {
        self.ops.multiplies += 1;
        self.see(a * b)
    }

    /// Sums `terms` into lines; the first term of each line is a move.
    fn accumulate(&mut self, terms: impl Iterator<Item = (usize, i64)>) -> Vec<Option<i64>> {
        let mut lines = vec![None; MAX_LINES];
        for (k, v) in terms {
            lines[k] = Some(match lines[k] {
                None => v,
                Some(acc) => self.add(acc, v),
            });
        }
        lines
    }
}

/// Instrumented scalar search with partial-sum reuse.
///
/// Horizontally adjacent pixel pairs share a line in directions 1, 2 and 3,
/// vertically adjacent pairs in 5, 6 and 7, so those pair sums are formed
/// once and reused. Squared line sums of equal length are added before the
/// single multiply by `840 / N`. Returns the counts together with the
/// search result so callers can check the two paths agree.
pub fn count_operations(block: &[[u16; 8]; 8], bit_depth: u8) -> (DirectionResult, OpCounts) {
    let x = centered(block, bit_depth);
    let mut t = Tally {
        ops: OpCounts::default(),
    };
    let px = |i: usize, j: usize| i64::from(x[i][j]);

    let energy: i64 = (0..64).map(|p| px(p / 8, p % 8).pow(2)).sum();
    t.see(energy * i64::from(LCM));

    let mut hpair = [[0i64; 4]; 8];
    let mut vpair = [[0i64; 8]; 4];
    for i in 0..8 {
        for m in 0..4 {
            hpair[i][m] = t.add(px(i, 2 * m), px(i, 2 * m + 1));
        }
    }
    for m in 0..4 {
        for j in 0..8 {
            vpair[m][j] = t.add(px(2 * m, j), px(2 * m + 1, j));
        }
    }
    let hp = |d: usize| {
        (0..8).flat_map(move |i| (0..4).map(move |m| (line_index(d, i, 2 * m), hpair[i][m])))
    };
    let vp = |d: usize| {
        (0..4).flat_map(move |m| (0..8).map(move |j| (line_index(d, 2 * m, j), vpair[m][j])))
    };
    let direct = |d: usize| (0..64).map(move |p| (line_index(d, p / 8, p % 8), px(p / 8, p % 8)));

    let mut partial: [Vec<Option<i64>>; 8] = Default::default();
    partial[0] = t.accumulate(direct(0));
    partial[1] = t.accumulate(hp(1));
    partial[2] = t.accumulate(hp(2));
    partial[3] = t.accumulate(hp(3));
    partial[4] = t.accumulate(direct(4));
    partial[5] = t.accumulate(vp(5));
    partial[6] = t.accumulate(vp(6));
    partial[7] = t.accumulate(vp(7));

    let mut scores = [0i32; 8];
    for d in 0..8 {
        // Group squared line sums by line length.
        let mut groups: [Option<i64>; 9] = [None; 9];
        for (k, sum) in partial[d].iter().enumerate() {
            if let Some(sum) = *sum {
                t.ops.line_sums += 1;
                let sq = t.mul(sum, sum);
                let n = LINE_COUNTS[d][k] as usize;
                groups[n] = Some(match groups[n] {
                    None => sq,
                    Some(acc) => t.add(acc, sq),
                });
            }
        }
        let mut score: Option<i64> = None;
        for (n, g) in groups.iter().enumerate() {
            if let Some(g) = *g {
                let term = t.mul(g, i64::from(DIV_TABLE[n]));
                score = Some(match score {
                    None => term,
                    Some(acc) => t.add(acc, term),
                });
            }
        }
        scores[d] = i32::try_from(score.unwrap_or(0)).expect("score fits in 32 bits");
    }

    let mut best = 0;
    for d in 1..8 {
        t.ops.comparisons += 1;
        if scores[d] > scores[best] {
            best = d;
        }
    }
    let result = DirectionResult {
        direction: best as u8,
        scores,
        contrast: scores[best] - scores[(best + 4) & 7],
    };
    (result, t.ops)
}
