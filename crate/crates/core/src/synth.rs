//! Synthetic fog generation for full-reference evaluation.
//!
//! Fog is laid over a clean image through the haze formation model with a
//! transmission derived from a depth field, `t = exp(-beta * d)`, optionally
//! multiplied by a smooth random perturbation so the degradation is not
//! perfectly uniform. The ground-truth transmission is returned alongside
//! the hazy image so recovery can be verified exactly.

use crate::dehaze::{koschmieder_forward, AtmosphericLight, TransmissionMap};
use crate::error::{Error, Result};
use crate::raster::ImageF;
use crate::rng::Stream;

/// Number of bands in the `steps` depth preset.
pub const STEP_BANDS: usize = 4;

/// Smallest stored transmission, one step of the sample grid.
const MIN_T: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Relative scene depth per pixel, non-negative and unbounded above.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DepthField {
    /// Wraps row-major depth values.
    ///
    /// # Errors
    /// `InvalidParameter` if the length disagrees with the dimensions or any
    /// value is negative or not finite.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(
                "depth field dimensions must be positive".into(),
            ));
        }
        if values.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "depth field of {}x{} needs {} values, got {}",
                width,
                height,
                width * height,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "depth values must be finite and non-negative, got {v}"
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Reads a single-channel raster as relative depth in `[0, 1]`.
    pub fn from_raster(img: &ImageF) -> Result<Self> {
        if img.channels() != 1 {
            return Err(Error::InvalidParameter(format!(
                "depth rasters must have one channel, got {}",
                img.channels()
            )));
        }
        Self::new(img.width(), img.height(), img.plane(0).to_vec())
    }

    /// Field width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Field height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major depth values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Depth at `(x, y)`.
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// Fog parameters: extinction, airlight color, and the perturbation shape.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FogSpec {
    beta: f64,
    airlight: AtmosphericLight,
    perturb_amp: f64,
    perturb_scale: usize,
    seed: u64,
}

impl FogSpec {
    /// # Errors
    /// `InvalidParameter` if `beta` is negative or not finite, `perturb_amp`
    /// lies outside `[0, 0.5]`, or `perturb_scale` is zero.
    pub fn new(
        beta: f64,
        airlight: AtmosphericLight,
        perturb_amp: f64,
        perturb_scale: usize,
        seed: u64,
    ) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        if !(0.0..=0.5).contains(&perturb_amp) {
            return Err(Error::InvalidParameter(format!(
                "perturb_amp must lie in [0, 0.5], got {perturb_amp}"
            )));
        }
        if perturb_scale == 0 {
            return Err(Error::InvalidParameter(
                "perturb_scale must be positive".into(),
            ));
        }
        Ok(Self {
            beta,
            airlight,
            perturb_amp,
            perturb_scale,
            seed,
        })
    }

    /// Extinction coefficient.
    pub fn beta(self) -> f64 {
        self.beta
    }

    /// Airlight color blended in by the haze.
    pub fn airlight(self) -> AtmosphericLight {
        self.airlight
    }

    /// Perturbation amplitude as a fraction of the unperturbed transmission.
    pub fn perturb_amp(self) -> f64 {
        self.perturb_amp
    }

    /// Perturbation correlation length in pixels.
    pub fn perturb_scale(self) -> usize {
        self.perturb_scale
    }

    /// Seed of the perturbation noise.
    pub fn seed(self) -> u64 {
        self.seed
    }
}

/// Beer-Lambert attenuation: `t = exp(-beta * d)`.
///
/// Values are stored as computed; the lower clamp for model inversion is
/// applied only where the model is actually inverted.
pub fn depth_to_transmission(d: &DepthField, beta: f64) -> TransmissionMap {
    assert!(
        beta.is_finite() && beta >= 0.0,
        "beta must be finite and non-negative, got {beta}"
    );
    let t: Vec<f64> = d.values().iter().map(|v| (-beta * v).exp()).collect();
    TransmissionMap::from_values(d.width(), d.height(), t).expect("attenuation stays in (0, 1]")
}

fn smoothstep(u: f64) -> f64 {
    u * u * (3.0 - 2.0 * u)
}

/// Smooth multiplicative value noise with empirical mean exactly one.
///
/// Lattice nodes every `scale` pixels carry seeded values in `[-1, 1]`,
/// interpolated with a smoothstep. De-meaning keeps the expected fog density
/// unchanged by the perturbation; 4-neighbor differences stay below
/// `3 * amp / scale`.
fn perturbation_field(w: usize, h: usize, amp: f64, scale: usize, seed: u64) -> Vec<f64> {
    let n = w * h;
    if amp == 0.0 {
        return vec![1.0; n];
    }
    let cells_x = (w - 1) / scale + 2;
    let cells_y = (h - 1) / scale + 2;
    let mut lattice = vec![0.0; cells_x * cells_y];
    for j in 0..cells_y {
        for i in 0..cells_x {
            let mut s = Stream::new(seed, i as u64, j as u64);
            lattice[j * cells_x + i] = 2.0 * s.unit_open() - 1.0;
        }
    }

    let inv = 1.0 / scale as f64;
    let mut field = Vec::with_capacity(n);
    for y in 0..h {
        let fy = y as f64 * inv;
        let j = fy as usize;
        let v = smoothstep(fy - j as f64);
        for x in 0..w {
            let fx = x as f64 * inv;
            let i = fx as usize;
            let u = smoothstep(fx - i as f64);
            let row0 = &lattice[j * cells_x + i..];
            let row1 = &lattice[(j + 1) * cells_x + i..];
            let top = row0[0] + u * (row0[1] - row0[0]);
            let bottom = row1[0] + u * (row1[1] - row1[0]);
            field.push(1.0 + amp * (top + v * (bottom - top)));
        }
    }

    let shift = field.iter().sum::<f64>() / n as f64 - 1.0;
    for v in &mut field {
        *v -= shift;
    }
    field
}

/// Lays fog over `j` and returns the hazy image with its ground-truth
/// transmission.
///
/// The transmission is `exp(-beta * d)` times the perturbation field,
/// clipped to `(0, 1]`. The returned pair satisfies the haze formation
/// model against `j` and the configured airlight pointwise.
pub fn synth_fog(j: &ImageF, d: &DepthField, spec: &FogSpec) -> (ImageF, TransmissionMap) {
    assert!(
        j.width() == d.width() && j.height() == d.height(),
        "synth_fog: image {}x{} does not match depth {}x{}",
        j.width(),
        j.height(),
        d.width(),
        d.height()
    );
    let field = perturbation_field(
        d.width(),
        d.height(),
        spec.perturb_amp,
        spec.perturb_scale,
        spec.seed,
    );
    let t: Vec<f64> = d
        .values()
        .iter()
        .zip(&field)
        .map(|(depth, f)| ((-spec.beta * depth).exp() * f).clamp(MIN_T, 1.0))
        .collect();
    let map = TransmissionMap::from_values(d.width(), d.height(), t)
        .expect("perturbed transmission stays in range");
    let hazy = koschmieder_forward(j, &map, spec.airlight);
    (hazy, map)
}

/// Deterministic depth fixtures: `ramp`, `corridor`, or `steps`.
///
/// `ramp` rises linearly from the bottom row (depth 0) to the top row;
/// `corridor` vanishes toward the image center, which carries the maximal
/// depth; `steps` splits the height into [`STEP_BANDS`] constant bands,
/// deepest at the top.
///
/// # Errors
/// `InvalidParameter` for an unknown preset name.
pub fn depth_presets(name: &str, width: usize, height: usize) -> Result<DepthField> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(
            "depth field dimensions must be positive".into(),
        ));
    }
    let values = match name {
        "ramp" => {
            let denom = (height - 1).max(1) as f64;
            (0..width * height)
                .map(|k| (height - 1 - k / width) as f64 / denom)
                .collect()
        }
        "corridor" => {
            let cx = (width - 1) as f64 / 2.0;
            let cy = (height - 1) as f64 / 2.0;
            let max_cheb = cx.max(cy);
            if max_cheb == 0.0 {
                vec![1.0]
            } else {
                (0..width * height)
                    .map(|k| {
                        let x = (k % width) as f64;
                        let y = (k / width) as f64;
                        let cheb = (x - cx).abs().max((y - cy).abs());
                        1.0 - cheb / max_cheb
                    })
                    .collect()
            }
        }
        "steps" => (0..width * height)
            .map(|k| {
                let band = (k / width) * STEP_BANDS / height;
                (STEP_BANDS - band) as f64 / STEP_BANDS as f64
            })
            .collect(),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown depth preset {other:?}; expected ramp, corridor, or steps"
            )))
        }
    };
    DepthField::new(width, height, values)
}
