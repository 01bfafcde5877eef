//! Procedural 4:2:0 test image: smooth gradients, fractal texture, oriented
//! stripes and anti-aliased shapes at assorted angles.

use cdef_core::{Frame, Plane, Subsampling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed;

struct ValueNoise {
    size: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut impl Rng, size: usize) -> Self {
        ValueNoise {
            size,
            lattice: (0..size * size).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (x0, y0) = (x.floor(), y.floor());
        let (tx, ty) = (smooth(x - x0), smooth(y - y0));
        let wrap = |v: f64| (v as i64).rem_euclid(self.size as i64) as usize;
        let v = |i: f64, j: f64| self.lattice[wrap(j) * self.size + wrap(i)];
        let top = v(x0, y0) * (1.0 - tx) + v(x0 + 1.0, y0) * tx;
        let bottom = v(x0, y0 + 1.0) * (1.0 - tx) + v(x0 + 1.0, y0 + 1.0) * tx;
        top * (1.0 - ty) + bottom * ty
    }

    fn fractal(&self, x: f64, y: f64, base: f64, octaves: u32) -> f64 {
        (0..octaves)
            .map(|o| {
                let f = base * f64::from(1u32 << o);
                self.at(x * f + 17.0 * f64::from(o), y * f) / f64::from(1u32 << o)
            })
            .sum()
    }
}

enum Shape {
    Disc { cx: f64, cy: f64, r: f64 },
    Rect { cx: f64, cy: f64, hw: f64, hh: f64, angle: f64 },
    Line { x0: f64, y0: f64, x1: f64, y1: f64, half_width: f64 },
}

impl Shape {
    /// Signed distance, negative inside.
    fn distance(&self, x: f64, y: f64) -> f64 {
        match *self {
            Shape::Disc { cx, cy, r } => (x - cx).hypot(y - cy) - r,
            Shape::Rect { cx, cy, hw, hh, angle } => {
                let (s, c) = angle.sin_cos();
                let (dx, dy) = (x - cx, y - cy);
                let u = (dx * c + dy * s).abs() - hw;
                let v = (-dx * s + dy * c).abs() - hh;
                u.max(0.0).hypot(v.max(0.0)) + u.max(v).min(0.0)
            }
            Shape::Line { x0, y0, x1, y1, half_width } => {
                let (vx, vy) = (x1 - x0, y1 - y0);
                let t = (((x - x0) * vx + (y - y0) * vy) / (vx * vx + vy * vy)).clamp(0.0, 1.0);
                (x - x0 - t * vx).hypot(y - y0 - t * vy) - half_width
            }
        }
    }
}

struct Layer {
    shape: Shape,
    color: [f64; 3],
    /// Edge softness in pixels.
    blur: f64,
}

/// Synthetic 8-bit 4:2:0 frame with the given luma size.
pub fn natural_image(width: usize, height: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = ValueNoise::new(&mut rng, 64);
    let fine = ValueNoise::new(&mut rng, 64);
    let (w, h) = (width as f64, height as f64);
    let scale = w.min(h);

    let mut layers = Vec::new();
    for _ in 0..14 {
        let color = [rng.gen_range(30.0..230.0), rng.gen_range(70.0..190.0), rng.gen_range(70.0..190.0)];
        let blur = rng.gen_range(0.6..2.0);
        let shape = match rng.gen_range(0..3) {
            0 => Shape::Disc {
                cx: rng.gen_range(0.0..w),
                cy: rng.gen_range(0.0..h),
                r: rng.gen_range(0.03..0.15) * scale,
            },
            1 => Shape::Rect {
                cx: rng.gen_range(0.0..w),
                cy: rng.gen_range(0.0..h),
                hw: rng.gen_range(0.03..0.18) * scale,
                hh: rng.gen_range(0.02..0.10) * scale,
                angle: rng.gen_range(0.0..std::f64::consts::PI),
            },
            _ => {
                let (x0, y0) = (rng.gen_range(0.0..w), rng.gen_range(0.0..h));
                let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let len = rng.gen_range(0.2..0.6) * scale;
                Shape::Line {
                    x0,
                    y0,
                    x1: x0 + len * angle.cos(),
                    y1: y0 + len * angle.sin(),
                    half_width: rng.gen_range(0.6..3.0),
                }
            }
        };
        layers.push(Layer { shape, color, blur });
    }
    // oriented stripe patches
    let stripes: Vec<(f64, f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(0.1..0.9) * w,
                rng.gen_range(0.1..0.9) * h,
                rng.gen_range(0.06..0.12) * scale,
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(3.0..9.0),
            )
        })
        .collect();

    let render = |x: f64, y: f64| -> [f64; 3] {
        let (u, v) = (x / scale, y / scale);
        let base = 110.0 + 60.0 * (u - 0.5) + 25.0 * (v * 2.3).sin() + 45.0 * coarse.fractal(u, v, 3.0, 4);
        let mut px = [
            base,
            128.0 + 30.0 * coarse.fractal(u + 5.0, v, 2.0, 3),
            128.0 + 30.0 * coarse.fractal(u, v + 9.0, 2.0, 3),
        ];
        for &(cx, cy, r, angle, period) in &stripes {
            let d = (x - cx).hypot(y - cy);
            if d < r {
                let t = (x * angle.cos() + y * angle.sin()) * std::f64::consts::TAU / period;
                let fade = (1.0 - d / r).min(0.25) * 4.0;
                px[0] += 40.0 * t.sin() * fade;
            }
        }
        for layer in &layers {
            let d = layer.shape.distance(x, y);
            let alpha = (0.5 - d / (2.0 * layer.blur)).clamp(0.0, 1.0);
            if alpha > 0.0 {
                for (p, c) in px.iter_mut().zip(layer.color) {
                    *p = *p * (1.0 - alpha) + c * alpha;
                }
            }
        }
        px[0] += 35.0 * fine.fractal(u, v, 48.0, 4) * (0.4 + 0.6 * (coarse.at(u * 4.0 + 31.0, v * 4.0) + 1.0) / 2.0);
        px
    };

    let mut planes = [vec![0.0; width * height], vec![0.0; width * height], vec![0.0; width * height]];
    for i in 0..height {
        for j in 0..width {
            let px = render(j as f64 + 0.5, i as f64 + 0.5);
            for (p, v) in planes.iter_mut().zip(px) {
                p[i * width + j] = v;
            }
        }
    }
    let to_plane = |w: usize, h: usize, data: Vec<f64>| {
        Plane::from_samples(w, h, 8, data.into_iter().map(|v| v.round().clamp(0.0, 255.0) as u16).collect())
            .expect("8-bit samples")
    };
    let (cw, ch) = Subsampling::Cs420.chroma_dims(width, height);
    let down = |full: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(cw * ch);
        for i in 0..ch {
            for j in 0..cw {
                let mut sum = 0.0;
                for (di, dj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let r = (2 * i + di).min(height - 1);
                    let c = (2 * j + dj).min(width - 1);
                    sum += full[r * width + c];
                }
                out.push(sum / 4.0);
            }
        }
        out
    };
    let [y, u, v] = planes;
    let (u, v) = (down(&u), down(&v));
    Frame::new(to_plane(width, height, y), Some([to_plane(cw, ch, u), to_plane(cw, ch, v)]), Subsampling::Cs420)
        .expect("consistent geometry")
}
