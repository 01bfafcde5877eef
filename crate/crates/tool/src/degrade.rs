//! Blockwise DCT quantization, used to stand in for a coded reconstruction.

use cdef_core::{Frame, Plane};
use rayon::prelude::*;

const N: usize = 8;

/// Orthonormal DCT-II basis, `BASIS[k][x]`.
fn basis() -> [[f64; N]; N] {
    let mut b = [[0.0; N]; N];
    for (k, row) in b.iter_mut().enumerate() {
        let scale = if k == 0 { (1.0 / N as f64).sqrt() } else { (2.0 / N as f64).sqrt() };
        for (x, v) in row.iter_mut().enumerate() {
            *v = scale * (std::f64::consts::PI * (2 * x + 1) as f64 * k as f64 / (2 * N) as f64).cos();
        }
    }
    b
}

fn forward(block: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut tmp = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            tmp[i][k] = (0..N).map(|x| b[k][x] * block[i][x]).sum();
        }
    }
    let mut out = [[0.0; N]; N];
    for k in 0..N {
        for l in 0..N {
            out[k][l] = (0..N).map(|i| b[k][i] * tmp[i][l]).sum();
        }
    }
    out
}

fn inverse(coeffs: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut tmp = [[0.0; N]; N];
    for i in 0..N {
        for l in 0..N {
            tmp[i][l] = (0..N).map(|k| b[k][i] * coeffs[k][l]).sum();
        }
    }
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for x in 0..N {
            out[i][x] = (0..N).map(|l| b[l][x] * tmp[i][l]).sum();
        }
    }
    out
}

/// Quantizes the AC coefficients of every 8×8 block with a uniform step and
/// reconstructs. The DC coefficient passes through, so flat blocks come back
/// unchanged. Edge blocks are padded by replication.
pub fn degrade_plane(plane: &Plane, q_step: f64) -> Plane {
    assert!(q_step >= 1.0 && q_step.is_finite(), "q_step must be >= 1");
    let b = basis();
    let (w, h) = (plane.width(), plane.height());
    let max = f64::from(plane.max_value());
    let block_cols = w.div_ceil(N);
    let rows: Vec<Vec<u16>> = (0..h.div_ceil(N))
        .into_par_iter()
        .map(|br| {
            let mut strip = vec![0u16; w * N];
            for bc in 0..block_cols {
                let mut block = [[0.0; N]; N];
                for (i, row) in block.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        let r = (br * N + i).min(h - 1);
                        let c = (bc * N + j).min(w - 1);
                        *v = f64::from(plane.get(r, c));
                    }
                }
                let mut coeffs = forward(&block, &b);
                for (k, row) in coeffs.iter_mut().enumerate() {
                    for (l, c) in row.iter_mut().enumerate() {
                        if k + l > 0 {
                            *c = (*c / q_step).round() * q_step;
                        }
                    }
                }
                let rec = inverse(&coeffs, &b);
                for (i, row) in rec.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        let c = bc * N + j;
                        if c < w {
                            strip[i * w + c] = v.round().clamp(0.0, max) as u16;
                        }
                    }
                }
            }
            strip
        })
        .collect();
    let mut data = Vec::with_capacity(w * h);
    for (br, strip) in rows.into_iter().enumerate() {
        let valid = (h - br * N).min(N);
        data.extend_from_slice(&strip[..valid * w]);
    }
    Plane::from_samples(w, h, plane.bit_depth(), data).expect("clamped samples")
}

pub fn degrade(frame: &Frame, q_step: f64) -> Frame {
    let luma = degrade_plane(frame.luma(), q_step);
    let chroma = frame
        .chroma()
        .map(|[u, v]| [degrade_plane(u, q_step), degrade_plane(v, q_step)]);
    Frame::new(luma, chroma, frame.subsampling()).expect("same geometry")
}
