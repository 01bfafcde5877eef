use cdef_core::{Frame, Plane};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psnr {
    pub mse: f64,
    pub peak: f64,
}

impl Psnr {
    /// Identical inputs.
    pub fn is_lossless(&self) -> bool {
        self.mse == 0.0
    }

    /// Decibels, `None` when lossless.
    pub fn db(&self) -> Option<f64> {
        (!self.is_lossless()).then(|| 10.0 * (self.peak * self.peak / self.mse).log10())
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.db() {
            Some(db) => write!(f, "{db:.4}"),
            None => f.write_str("lossless"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("dimension mismatch: {0}")]
pub struct ShapeMismatch(String);

fn squared_error(a: &Plane, b: &Plane) -> Result<(f64, usize), ShapeMismatch> {
    if !a.same_shape(b) {
        return Err(ShapeMismatch(format!(
            "{}x{}@{} vs {}x{}@{}",
            a.width(),
            a.height(),
            a.bit_depth(),
            b.width(),
            b.height(),
            b.bit_depth()
        )));
    }
    let sum: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    Ok((sum as f64, a.samples().len()))
}

pub fn mse(a: &Plane, b: &Plane) -> Result<f64, ShapeMismatch> {
    let (sum, n) = squared_error(a, b)?;
    Ok(sum / n as f64)
}

pub fn psnr(a: &Plane, b: &Plane) -> Result<Psnr, ShapeMismatch> {
    Ok(Psnr {
        mse: mse(a, b)?,
        peak: f64::from(a.max_value()),
    })
}

/// Per-plane values followed by the value over all samples of the frame.
pub fn frame_psnr(a: &Frame, b: &Frame) -> Result<(Vec<Psnr>, Psnr), ShapeMismatch> {
    if a.num_planes() != b.num_planes() {
        return Err(ShapeMismatch("plane count".into()));
    }
    let mut planes = Vec::new();
    let (mut total, mut count) = (0.0, 0);
    for (pa, pb) in a.planes().zip(b.planes()) {
        let (sum, n) = squared_error(pa, pb)?;
        total += sum;
        count += n;
        planes.push(Psnr {
            mse: sum / n as f64,
            peak: f64::from(pa.max_value()),
        });
    }
    let overall = Psnr {
        mse: total / count as f64,
        peak: f64::from(a.luma().max_value()),
    };
    Ok((planes, overall))
}
