//! Atmospheric haze model and Dark Channel Prior dehazing.
//!
//! The haze formation model is `I = t * J + (1 - t) * A`: observed intensity
//! `I` blends scene radiance `J` and atmospheric light `A` according to the
//! transmission `t` of the medium. This module provides the forward model,
//! its inversion, and the Dark Channel Prior estimators for `t` and `A`,
//! composed into [`dcp_dehaze`].

use crate::error::{Error, Result};
use crate::filter::{guided_filter, sliding_min};
use crate::raster::{EpsilonPolicy, ImageF};

/// Lower clamp for transmission during inversion.
///
/// The model inversion divides by `t` and is singular at zero; the clamp
/// bounds noise amplification in dense haze.
pub const T_MIN: f64 = 0.1;

/// Fraction of brightest dark-channel pixels inspected by the airlight
/// estimator.
pub const AIRLIGHT_TOP_FRACTION: f64 = 0.001;

/// Default guided-filter window radius for transmission refinement.
pub const REFINE_RADIUS: usize = 20;

/// Default guided-filter regularization for transmission refinement.
pub const REFINE_REG: f64 = 1e-3;

/// Default retained haze fraction; 1.0 removes all detected haze.
pub const DEFAULT_RETAIN: f64 = 1.0;

/// Square neighborhood of side `2 * radius + 1` used by the patch minima.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatchSpec {
    radius: usize,
}

impl PatchSpec {
    /// Creates a patch of side `2 * radius + 1`; `radius = 0` degenerates to
    /// a single pixel.
    pub fn new(radius: usize) -> Self {
        Self { radius }
    }

    /// Window radius in pixels.
    pub fn radius(self) -> usize {
        self.radius
    }

    /// Window side length in pixels.
    pub fn side(self) -> usize {
        2 * self.radius + 1
    }
}

impl Default for PatchSpec {
    fn default() -> Self {
        Self { radius: 7 }
    }
}

/// Global atmospheric light color, each component in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtmosphericLight {
    values: [f64; 3],
}

impl AtmosphericLight {
    /// Validates that every component is finite and in `(0, 1]`.
    pub fn new(values: [f64; 3]) -> Result<Self> {
        for v in values {
            if !v.is_finite() || v <= 0.0 || v > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "atmospheric light components must lie in (0, 1], got {v}"
                )));
            }
        }
        Ok(Self { values })
    }

    /// Pure white airlight, the usual assumption for well-balanced imagery.
    pub fn white() -> Self {
        Self { values: [1.0; 3] }
    }

    /// Uniform gray airlight with the same value in every channel.
    pub fn gray(value: f64) -> Result<Self> {
        Self::new([value; 3])
    }

    /// Component for channel `c`.
    pub fn component(self, c: usize) -> f64 {
        self.values[c]
    }

    /// All three components.
    pub fn values(self) -> [f64; 3] {
        self.values
    }
}

/// Per-pixel transmission of the medium, a single-channel raster in `[0, 1]`.
///
/// Estimators clamp their output to `[T_MIN, 1]`; maps built from depth can
/// carry smaller values and are floored only when the model is inverted.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionMap {
    map: ImageF,
}

impl TransmissionMap {
    /// Wraps a single-channel raster as a transmission map.
    pub fn new(map: ImageF) -> Result<Self> {
        if map.channels() != 1 {
            return Err(Error::InvalidParameter(format!(
                "transmission map must have one channel, got {}",
                map.channels()
            )));
        }
        Ok(Self { map })
    }

    /// Constant transmission `t` everywhere.
    pub fn constant(width: usize, height: usize, t: f64) -> Result<Self> {
        Self::new(ImageF::new(width, height, 1, t)?)
    }

    /// Builds a map from row-major values, clamping them to `[0, 1]`.
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(ImageF::from_vec(width, height, 1, values)?)
    }

    /// The underlying raster.
    pub fn image(&self) -> &ImageF {
        &self.map
    }

    /// Consumes the map and returns the underlying raster.
    pub fn into_image(self) -> ImageF {
        self.map
    }

    /// Map width in pixels.
    pub fn width(&self) -> usize {
        self.map.width()
    }

    /// Map height in pixels.
    pub fn height(&self) -> usize {
        self.map.height()
    }

    /// Transmission at `(x, y)`.
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.map.get(0, x, y)
    }
}

fn channel_min(img: &ImageF) -> Vec<f64> {
    let n = img.pixel_count();
    let mut out = img.plane(0).to_vec();
    for c in 1..img.channels() {
        let plane = img.plane(c);
        for k in 0..n {
            if plane[k] < out[k] {
                out[k] = plane[k];
            }
        }
    }
    out
}

/// Dark channel: minimum over channels, then over the patch neighborhood.
///
/// Haze-free outdoor images tend to a near-zero dark channel; haze lifts it
/// toward the airlight, which is what the transmission estimator measures.
pub fn dark_channel(img: &ImageF, patch: PatchSpec) -> ImageF {
    let mins = channel_min(img);
    let dark = sliding_min(&mins, img.width(), img.height(), patch.radius());
    ImageF::from_vec(img.width(), img.height(), 1, dark).expect("dark channel stays in range")
}

/// Estimates the atmospheric light from the brightest dark-channel pixels.
///
/// Among the `top_fraction` pixels with the highest dark channel, the input
/// pixel with the largest channel sum is chosen; ties break toward the lowest
/// pixel index so the estimate is deterministic. Components are floored to
/// keep them strictly positive on all-black input.
pub fn estimate_airlight(img: &ImageF, patch: PatchSpec, top_fraction: f64) -> AtmosphericLight {
    assert!(
        top_fraction > 0.0 && top_fraction <= 1.0,
        "top_fraction must lie in (0, 1], got {top_fraction}"
    );
    let dark = dark_channel(img, patch);
    let dark = dark.plane(0);
    let n = dark.len();
    let count = ((top_fraction * n as f64).ceil() as usize).clamp(1, n);

    let mut order: Vec<u32> = (0..n as u32).collect();
    let by_dark_desc = |&a: &u32, &b: &u32| {
        dark[b as usize]
            .partial_cmp(&dark[a as usize])
            .expect("dark channel is finite")
            .then(a.cmp(&b))
    };
    if count < n {
        order.select_nth_unstable_by(count - 1, by_dark_desc);
    }

    let channels = img.channels();
    let sum_at = |k: usize| (0..channels).map(|c| img.plane(c)[k]).sum::<f64>();
    let mut best = order[0] as usize;
    let mut best_sum = sum_at(best);
    for &idx in &order[1..count] {
        let idx = idx as usize;
        let s = sum_at(idx);
        if s > best_sum || (s == best_sum && idx < best) {
            best = idx;
            best_sum = s;
        }
    }

    let floor = EpsilonPolicy::DEFAULT_FLOOR;
    let component = |c: usize| img.plane(c.min(channels - 1))[best].max(floor);
    AtmosphericLight {
        values: [component(0), component(1), component(2)],
    }
}

/// Estimates transmission as one minus the retained dark channel of `I / A`.
///
/// `retain = 1` removes all detected haze; slightly smaller values keep a
/// trace of aerial perspective. The result is clamped to `[T_MIN, 1]`.
pub fn estimate_transmission(
    img: &ImageF,
    a: AtmosphericLight,
    patch: PatchSpec,
    retain: f64,
) -> TransmissionMap {
    assert!(
        retain > 0.0 && retain <= 1.0,
        "retain must lie in (0, 1], got {retain}"
    );
    let (w, h, channels) = (img.width(), img.height(), img.channels());
    let n = w * h;
    let mut ratio = vec![f64::INFINITY; n];
    for c in 0..channels {
        let plane = img.plane(c);
        let inv_a = 1.0 / a.component(c);
        for k in 0..n {
            let v = plane[k] * inv_a;
            if v < ratio[k] {
                ratio[k] = v;
            }
        }
    }
    let dark = sliding_min(&ratio, w, h, patch.radius());
    let t: Vec<f64> = dark
        .iter()
        .map(|d| (1.0 - retain * d).clamp(T_MIN, 1.0))
        .collect();
    TransmissionMap::from_values(w, h, t).expect("estimator output stays in range")
}

/// Smooths a transmission map with a guided filter steered by `guide`.
///
/// Color guides are collapsed to luma. The raw patch-minimum transmission is
/// blocky at depth edges; guided smoothing transfers the guide's edges onto
/// the map while averaging out the blocks.
pub fn refine_transmission(
    t: &TransmissionMap,
    guide: &ImageF,
    radius: usize,
    reg: f64,
) -> TransmissionMap {
    require_same_shape_wh(t.image(), guide, "refine_transmission");
    let (w, h) = (t.width(), t.height());
    let mono = if guide.channels() == 1 {
        guide.plane(0).to_vec()
    } else {
        guide.luma()
    };
    let refined = guided_filter(&mono, t.image().plane(0), w, h, radius, reg);
    let clamped: Vec<f64> = refined.iter().map(|v| v.clamp(T_MIN, 1.0)).collect();
    TransmissionMap::from_values(w, h, clamped).expect("refined map stays in range")
}

/// Inverts the haze model: `J = (I - A) / t + A`, clipped to `[0, 1]`.
///
/// Transmission is floored at [`T_MIN`] before the division.
pub fn invert_haze_model(img: &ImageF, t: &TransmissionMap, a: AtmosphericLight) -> ImageF {
    require_same_shape_wh(img, t.image(), "invert_haze_model");
    let plane = t.image().plane(0);
    let (w, h, channels) = (img.width(), img.height(), img.channels());
    let n = w * h;
    let mut data = Vec::with_capacity(n * channels);
    for c in 0..channels {
        let src = img.plane(c);
        let ac = a.component(c);
        for k in 0..n {
            let tk = plane[k].max(T_MIN);
            data.push((src[k] - ac) / tk + ac);
        }
    }
    ImageF::from_vec(w, h, channels, data).expect("shape is preserved")
}

/// Applies the haze model forward: `I = t * J + (1 - t) * A`.
pub fn koschmieder_forward(j: &ImageF, t: &TransmissionMap, a: AtmosphericLight) -> ImageF {
    require_same_shape_wh(j, t.image(), "koschmieder_forward");
    let plane = t.image().plane(0);
    let (w, h, channels) = (j.width(), j.height(), j.channels());
    let n = w * h;
    let mut data = Vec::with_capacity(n * channels);
    for c in 0..channels {
        let src = j.plane(c);
        let ac = a.component(c);
        for k in 0..n {
            data.push(plane[k] * src[k] + (1.0 - plane[k]) * ac);
        }
    }
    ImageF::from_vec(w, h, channels, data).expect("shape is preserved")
}

/// Full Dark Channel Prior pipeline returning the dehazed image.
///
/// Estimates the airlight, estimates transmission with `retain`, optionally
/// refines it with a guided filter steered by the input, and inverts the
/// model. See [`dcp_dehaze_with_diagnostics`] to also obtain `t` and `A`.
pub fn dcp_dehaze(img: &ImageF, patch: PatchSpec, retain: f64, refine: bool) -> ImageF {
    dcp_dehaze_with_diagnostics(img, patch, retain, refine).0
}

/// [`dcp_dehaze`] that also returns the transmission map and airlight used.
pub fn dcp_dehaze_with_diagnostics(
    img: &ImageF,
    patch: PatchSpec,
    retain: f64,
    refine: bool,
) -> (ImageF, TransmissionMap, AtmosphericLight) {
    let a = estimate_airlight(img, patch, AIRLIGHT_TOP_FRACTION);
    let mut t = estimate_transmission(img, a, patch, retain);
    if refine {
        t = refine_transmission(&t, img, REFINE_RADIUS, REFINE_REG);
    }
    let j = invert_haze_model(img, &t, a);
    (j, t, a)
}

fn require_same_shape_wh(a: &ImageF, b: &ImageF, what: &str) {
    assert!(
        a.width() == b.width() && a.height() == b.height(),
        "{what}: {}x{} does not match {}x{}",
        a.width(),
        a.height(),
        b.width(),
        b.height()
    );
}
