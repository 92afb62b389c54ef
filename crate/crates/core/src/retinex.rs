//! Retinex-family enhancement backends.
//!
//! All operators share the same contract: the input is floored by the
//! default [`EpsilonPolicy`] so ratios and logarithms stay finite, each
//! channel is processed independently (randomized backends share sample
//! geometry across channels), and the output is a unit-range raster.
//!
//! The path, spray, and kernel backends estimate a local white per pixel
//! and return the ratio of the pixel to that white, so their output never
//! falls below the (floored) input. The center/surround backends (`ssr`,
//! `msr`, `homomorphic`) work in the log domain and finish with a
//! percentile contrast stretch instead.

use crate::filter::{box_mean, gaussian_blur, gaussian_radius};
use crate::error::{Error, Result};
use crate::raster::{clamp_floor, tail_values, EpsilonPolicy, ImageF};
use crate::rng::Stream;

/// Default center/surround scale for [`ssr`].
pub const DEFAULT_SSR_SIGMA: f64 = 80.0;

/// Tail fraction used by the final contrast stretch of the log-domain
/// backends.
const STRETCH_TAIL: f64 = 0.01;

/// Span below which a stretch would amplify noise; the raw values are used
/// directly instead.
const DEGENERATE_SPAN: f64 = 1e-6;

/// Scaling applied to intensity ratios before averaging.
///
/// Ratios above 1 always map to 1, so a pixel can never be pushed below its
/// own intensity by a darker neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalingFn {
    #[default]
    Identity,
    Log,
}

impl ScalingFn {
    #[inline]
    pub fn apply(self, ratio: f64) -> f64 {
        match self {
            ScalingFn::Identity => ratio.min(1.0),
            ScalingFn::Log => (1.0 + ratio.ln()).clamp(0.0, 1.0),
        }
    }
}

/// Configuration for [`path_retinex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    num_paths: usize,
    path_length: usize,
    scaling: ScalingFn,
    seed: u64,
}

impl PathConfig {
    /// # Errors
    /// `InvalidParameter` if `num_paths` or `path_length` is zero.
    pub fn new(num_paths: usize, path_length: usize, scaling: ScalingFn, seed: u64) -> Result<Self> {
        if num_paths == 0 {
            return Err(Error::InvalidParameter("num_paths must be positive".into()));
        }
        if path_length == 0 {
            return Err(Error::InvalidParameter("path_length must be positive".into()));
        }
        Ok(PathConfig {
            num_paths,
            path_length,
            scaling,
            seed,
        })
    }

    /// Default configuration for a `width x height` image: 50 walks of
    /// length `2 * (width + height)` per pixel.
    pub fn defaults_for(width: usize, height: usize, seed: u64) -> Self {
        PathConfig {
            num_paths: 50,
            path_length: 2 * (width + height),
            scaling: ScalingFn::Identity,
            seed,
        }
    }

    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    pub fn path_length(&self) -> usize {
        self.path_length
    }

    pub fn scaling(&self) -> ScalingFn {
        self.scaling
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Configuration for the spray backends [`rsr`], [`spray_max`], and the
/// spray stage of [`lrsr`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprayConfig {
    sprays: usize,
    samples: usize,
    radius: Option<f64>,
    seed: u64,
}

impl SprayConfig {
    /// `sprays` sprays per pixel, each holding the target pixel plus
    /// `samples - 1` random points within `radius` (`None` = the image
    /// diagonal).
    ///
    /// # Errors
    /// `InvalidParameter` if `sprays` is zero, `samples < 2`, or `radius`
    /// is not finite and positive.
    pub fn new(sprays: usize, samples: usize, radius: Option<f64>, seed: u64) -> Result<Self> {
        if sprays == 0 {
            return Err(Error::InvalidParameter("sprays must be positive".into()));
        }
        if samples < 2 {
            return Err(Error::InvalidParameter(
                "samples must be at least 2 (the target pixel plus one draw)".into(),
            ));
        }
        if let Some(r) = radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "radius must be finite and positive, got {r}"
                )));
            }
        }
        Ok(SprayConfig {
            sprays,
            samples,
            radius,
            seed,
        })
    }

    /// Defaults for [`rsr`]: 20 sprays of 75 samples, radius = diagonal.
    pub fn rsr_defaults(seed: u64) -> Self {
        SprayConfig {
            sprays: 20,
            samples: 75,
            radius: None,
            seed,
        }
    }

    /// Defaults for the [`lrsr`] spray stage: one spray of 75 samples.
    pub fn lrsr_defaults(seed: u64) -> Self {
        SprayConfig {
            sprays: 1,
            samples: 75,
            radius: None,
            seed,
        }
    }

    pub fn sprays(&self) -> usize {
        self.sprays
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Effective spray radius for a `width x height` image.
    pub fn radius_for(&self, width: usize, height: usize) -> f64 {
        self.radius
            .unwrap_or_else(|| ((width * width + height * height) as f64).sqrt())
    }
}

/// Configuration for [`lrsr`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrsrConfig {
    spray: SprayConfig,
    k1: usize,
    k2: usize,
}

impl LrsrConfig {
    /// `k1` and `k2` are the odd side lengths of the two box smoothings
    /// (envelope and correction).
    ///
    /// # Errors
    /// `InvalidParameter` if either side length is even or zero.
    pub fn new(spray: SprayConfig, k1: usize, k2: usize) -> Result<Self> {
        for (name, k) in [("k1", k1), ("k2", k2)] {
            if k == 0 || k % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be an odd positive side length, got {k}"
                )));
            }
        }
        Ok(LrsrConfig { spray, k1, k2 })
    }

    /// Defaults: one spray of 75 samples, 25x25 smoothing for both passes.
    pub fn defaults(seed: u64) -> Self {
        LrsrConfig {
            spray: SprayConfig::lrsr_defaults(seed),
            k1: 25,
            k2: 25,
        }
    }

    pub fn spray(&self) -> &SprayConfig {
        &self.spray
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }
}

/// Configuration for [`kbr`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KbrConfig {
    sigma: f64,
    window: usize,
    scaling: ScalingFn,
}

impl KbrConfig {
    /// Gaussian weighting of scale `sigma`, truncated to the default window
    /// side `2 * floor(3 sigma) + 1`.
    ///
    /// # Errors
    /// `InvalidParameter` if `sigma` is not finite and positive.
    pub fn new(sigma: f64, scaling: ScalingFn) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be finite and positive, got {sigma}"
            )));
        }
        Ok(KbrConfig {
            sigma,
            window: 2 * gaussian_radius(sigma) + 1,
            scaling,
        })
    }

    /// Overrides the window side length.
    ///
    /// # Errors
    /// `InvalidParameter` if `window` is even or zero.
    pub fn with_window(mut self, window: usize) -> Result<Self> {
        if window == 0 || window % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "window must be an odd positive side length, got {window}"
            )));
        }
        self.window = window;
        Ok(self)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn scaling(&self) -> ScalingFn {
        self.scaling
    }
}

/// Scales and weights for [`msr`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleBank {
    pairs: Vec<(f64, f64)>,
}

impl ScaleBank {
    /// `(sigma, weight)` pairs; weights must sum to 1 within `1e-9`.
    ///
    /// # Errors
    /// `InvalidParameter` on an empty bank, a non-positive scale, a negative
    /// weight, or weights that do not sum to 1.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("scale bank must not be empty".into()));
        }
        for &(sigma, weight) in &pairs {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "scale must be finite and positive, got {sigma}"
                )));
            }
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "weight must be finite and non-negative, got {weight}"
                )));
            }
        }
        let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to 1 within 1e-9, got {total}"
            )));
        }
        Ok(ScaleBank { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }
}

impl Default for ScaleBank {
    /// Three equally weighted scales: 15, 80, 250.
    fn default() -> Self {
        ScaleBank {
            pairs: vec![(15.0, 1.0 / 3.0), (80.0, 1.0 / 3.0), (250.0, 1.0 / 3.0)],
        }
    }
}

/// Lightness contribution of one path: the endpoint over the running
/// maximum. Chained ratios with reset collapse to exactly this quantity,
/// so only the largest value seen along the path matters.
#[inline]
fn path_ratio(endpoint: f64, path_max: f64) -> f64 {
    endpoint / path_max.max(endpoint)
}

/// Path-based lightness with reset.
///
/// For every pixel, `num_paths` fixed-length unbiased 4-neighbor random
/// walks are sampled (steps that would leave the image stay in place). The
/// lightness is the average over walks of the scaled ratio of the pixel to
/// the maximum intensity along the walk. Walk geometry is shared across
/// channels; each channel keeps its own maximum. Output is at least the
/// floored input.
pub fn path_retinex(img: &ImageF, cfg: &PathConfig) -> ImageF {
    let f = clamp_floor(img, EpsilonPolicy::default());
    let (w, h, c) = (f.width(), f.height(), f.channels());
    let n = w * h;
    let planes: Vec<&[f64]> = (0..c).map(|ch| f.plane(ch)).collect();
    let mut out = vec![0.0; c * n];
    let inv_paths = 1.0 / cfg.num_paths as f64;
    for y in 0..h {
        for x in 0..w {
            let pix = y * w + x;
            let mut center = [0.0f64; 3];
            for ch in 0..c {
                center[ch] = planes[ch][pix];
            }
            let mut acc = [0.0f64; 3];
            for p in 0..cfg.num_paths {
                let mut stream = Stream::new(cfg.seed, pix as u64, p as u64);
                let mut maxes = center;
                let (mut cx, mut cy) = (x, y);
                let mut bits = 0u64;
                let mut left = 0u32;
                for _ in 0..cfg.path_length {
                    if left == 0 {
                        bits = stream.next_u64();
                        left = 32;
                    }
                    match bits & 3 {
                        0 => cx = (cx + 1).min(w - 1),
                        1 => cx = cx.saturating_sub(1),
                        2 => cy = (cy + 1).min(h - 1),
                        _ => cy = cy.saturating_sub(1),
                    }
                    bits >>= 2;
                    left -= 1;
                    let idx = cy * w + cx;
                    for ch in 0..c {
                        let v = planes[ch][idx];
                        if v > maxes[ch] {
                            maxes[ch] = v;
                        }
                    }
                }
                for ch in 0..c {
                    acc[ch] += cfg.scaling.apply(path_ratio(center[ch], maxes[ch]));
                }
            }
            for ch in 0..c {
                // The mean of per-path ratios cannot fall below the center
                // value in exact arithmetic; guard the final rounding.
                out[ch * n + pix] = (acc[ch] * inv_paths).max(center[ch]);
            }
        }
    }
    ImageF::from_data_clamped(w, h, c, out)
}

/// Interleaved copy of the floored image (`c` samples per pixel), so each
/// random spray access touches one cache line instead of one per plane.
fn interleaved_floored(img: &ImageF) -> (ImageF, Vec<f64>) {
    let f = clamp_floor(img, EpsilonPolicy::default());
    let (n, c) = (f.pixel_count(), f.channels());
    let mut buf = vec![0.0; n * c];
    for ch in 0..c {
        let plane = f.plane(ch);
        for i in 0..n {
            buf[i * c + ch] = plane[i];
        }
    }
    (f, buf)
}

/// Runs one spray for pixel `pix`: draws `samples - 1` offsets with radius
/// `R * u` (`u` uniform in `(0, 1]`) and direction uniform on the circle,
/// and folds the interleaved samples into `maxes[..c]`.
///
/// The draw rejection-samples the unit disk; for a uniform disk point the
/// squared norm `s` is itself uniform on `(0, 1]` and independent of the
/// direction, so it serves as `u` and the offset is `(a, b) * R * sqrt(s)`.
/// The induced planar density is `1 / (2 pi R sqrt(dx^2 + dy^2))`. Offsets
/// round half-up per axis and clamp to the image bounds.
///
/// Indices are generated into `scratch` before the gather so the scattered
/// loads are independent and can overlap in flight.
#[inline]
fn spray_fold_max(
    buf: &[f64],
    c: usize,
    w: usize,
    h: usize,
    pix: usize,
    stream: &mut Stream,
    samples: usize,
    radius: f64,
    scratch: &mut Vec<u32>,
    maxes: &mut [f64; 3],
) {
    let xf = (pix % w) as f64 + 0.5;
    let yf = (pix / w) as f64 + 0.5;
    // Clamping in the float domain keeps positions non-negative, so the
    // truncating cast below is exactly floor.
    let (wlim, hlim) = (w as f64 - 0.5, h as f64 - 0.5);
    scratch.clear();
    for _ in 1..samples {
        let (mut a, mut b, mut s);
        loop {
            let bits = stream.next_u64();
            a = Stream::symmetric_from(bits as u32);
            b = Stream::symmetric_from((bits >> 32) as u32);
            s = a * a + b * b;
            if s > 0.0 && s <= 1.0 {
                break;
            }
        }
        let scale = radius * s.sqrt();
        let sx = (xf + a * scale).clamp(0.0, wlim) as usize;
        let sy = (yf + b * scale).clamp(0.0, hlim) as usize;
        scratch.push((sy * w + sx) as u32);
    }
    for &idx in scratch.iter() {
        let base = idx as usize * c;
        let sample = &buf[base..base + c];
        for ch in 0..c {
            if sample[ch] > maxes[ch] {
                maxes[ch] = sample[ch];
            }
        }
    }
}

/// Random spray Retinex.
///
/// Each pixel is compared against the maximum of `samples` points (itself
/// plus `samples - 1` draws with density decreasing as 1/distance), and the
/// per-spray ratios are averaged over `sprays` sprays. Sample geometry is
/// shared across channels. Output is at least the floored input.
pub fn rsr(img: &ImageF, cfg: &SprayConfig) -> ImageF {
    let (f, buf) = interleaved_floored(img);
    let (w, h, c) = (f.width(), f.height(), f.channels());
    let n = w * h;
    let radius = cfg.radius_for(w, h);
    let mut out = vec![0.0; c * n];
    let inv_sprays = 1.0 / cfg.sprays as f64;
    let mut scratch = Vec::with_capacity(cfg.samples);
    for pix in 0..n {
        let mut center = [0.0f64; 3];
        center[..c].copy_from_slice(&buf[pix * c..pix * c + c]);
        let mut acc = [0.0f64; 3];
        for s in 0..cfg.sprays {
            let mut stream = Stream::new(cfg.seed, pix as u64, s as u64);
            let mut maxes = center;
            spray_fold_max(&buf, c, w, h, pix, &mut stream, cfg.samples, radius, &mut scratch, &mut maxes);
            for ch in 0..c {
                acc[ch] += center[ch] / maxes[ch];
            }
        }
        for ch in 0..c {
            // The mean of per-spray ratios cannot fall below the center
            // value in exact arithmetic; guard the final rounding.
            out[ch * n + pix] = (acc[ch] * inv_sprays).max(center[ch]);
        }
    }
    ImageF::from_data_clamped(w, h, c, out)
}

/// Per-pixel envelope: the maximum intensity over all spray samples (the
/// target pixel included), per channel. This is the local-white estimate
/// that [`lrsr`] smooths.
pub fn spray_max(img: &ImageF, cfg: &SprayConfig) -> ImageF {
    let (f, buf) = interleaved_floored(img);
    let (w, h, c) = (f.width(), f.height(), f.channels());
    let n = w * h;
    let radius = cfg.radius_for(w, h);
    let mut out = vec![0.0; c * n];
    let mut scratch = Vec::with_capacity(cfg.samples);
    for pix in 0..n {
        let mut maxes = [0.0f64; 3];
        maxes[..c].copy_from_slice(&buf[pix * c..pix * c + c]);
        for s in 0..cfg.sprays {
            let mut stream = Stream::new(cfg.seed, pix as u64, s as u64);
            spray_fold_max(&buf, c, w, h, pix, &mut stream, cfg.samples, radius, &mut scratch, &mut maxes);
        }
        for ch in 0..c {
            out[ch * n + pix] = maxes[ch];
        }
    }
    ImageF::from_data_clamped(w, h, c, out)
}

/// Light random spray Retinex.
///
/// A single smoothed correction field replaces per-pixel ratio averaging:
/// the spray envelope is box-smoothed (`k1`), inverted, box-smoothed again
/// (`k2`), and multiplied onto the image. With `k1 = k2 = 1` this reduces
/// to [`rsr`] with one spray. The correction never falls below 1, so the
/// output is at least the floored input.
pub fn lrsr(img: &ImageF, cfg: &LrsrConfig) -> ImageF {
    let f = clamp_floor(img, EpsilonPolicy::default());
    let (w, h, c) = (f.width(), f.height(), f.channels());
    let n = w * h;
    let envelope = spray_max(img, &cfg.spray);
    let floor = EpsilonPolicy::default().floor();
    let r1 = (cfg.k1 - 1) / 2;
    let r2 = (cfg.k2 - 1) / 2;
    let mut out = vec![0.0; c * n];
    for ch in 0..c {
        let smoothed = box_mean(envelope.plane(ch), w, h, r1);
        let inverse: Vec<f64> = smoothed.iter().map(|&v| 1.0 / v.max(floor)).collect();
        let correction = box_mean(&inverse, w, h, r2);
        let plane = f.plane(ch);
        let dst = &mut out[ch * n..(ch + 1) * n];
        for i in 0..n {
            dst[i] = (plane[i] * correction[i]).max(plane[i]);
        }
    }
    ImageF::from_data_clamped(w, h, c, out)
}

/// Kernel-based Retinex.
///
/// The stochastic path/spray average is replaced by its expectation under a
/// Gaussian visiting kernel: each pixel's lightness is the kernel-weighted
/// average of scaled intensity ratios against its window neighbors, with
/// weights renormalized over the in-bounds window. Output is at least the
/// floored input.
pub fn kbr(img: &ImageF, cfg: &KbrConfig) -> ImageF {
    let f = clamp_floor(img, EpsilonPolicy::default());
    let (w, h, c) = (f.width(), f.height(), f.channels());
    let n = w * h;
    let wr = (cfg.window - 1) / 2;
    let inv = if cfg.sigma > 0.0 {
        1.0 / (2.0 * cfg.sigma * cfg.sigma)
    } else {
        0.0
    };
    let taps: Vec<f64> = (-(wr as isize)..=wr as isize)
        .map(|i| (-(i * i) as f64 * inv).exp())
        .collect();
    // The in-bounds window is a rectangle, so the 2-D normalizer factors
    // into row and column tap sums.
    let row_sums: Vec<f64> = (0..w)
        .map(|x| {
            let lo = x.saturating_sub(wr);
            let hi = (x + wr).min(w - 1);
            (lo..=hi).map(|xx| taps[xx + wr - x]).sum()
        })
        .collect();
    let col_sums: Vec<f64> = (0..h)
        .map(|y| {
            let lo = y.saturating_sub(wr);
            let hi = (y + wr).min(h - 1);
            (lo..=hi).map(|yy| taps[yy + wr - y]).sum()
        })
        .collect();
    let mut out = vec![0.0; c * n];
    for ch in 0..c {
        let plane = f.plane(ch);
        let dst = &mut out[ch * n..(ch + 1) * n];
        for y in 0..h {
            let y0 = y.saturating_sub(wr);
            let y1 = (y + wr).min(h - 1);
            for x in 0..w {
                let x0 = x.saturating_sub(wr);
                let x1 = (x + wr).min(w - 1);
                let center = plane[y * w + x];
                let mut acc = 0.0;
                for yy in y0..=y1 {
                    let gy = taps[yy + wr - y];
                    let row = &plane[yy * w..yy * w + w];
                    let mut racc = 0.0;
                    for xx in x0..=x1 {
                        racc += taps[xx + wr - x] * cfg.scaling.apply(center / row[xx]);
                    }
                    acc += gy * racc;
                }
                dst[y * w + x] = (acc / (row_sums[x] * col_sums[y])).max(center);
            }
        }
    }
    ImageF::from_data_clamped(w, h, c, out)
}

/// Raw single-scale center/surround response: `ln I - ln (G_sigma * I)`,
/// plane-major, on the floored image. [`ssr`] and [`msr`] finalize this
/// with a percentile contrast stretch.
pub fn ssr_log(img: &ImageF, sigma: f64) -> Vec<f64> {
    let f = clamp_floor(img, EpsilonPolicy::default());
    let (w, h, c) = (f.width(), f.height(), f.channels());
    let mut raw = Vec::with_capacity(c * w * h);
    for ch in 0..c {
        let plane = f.plane(ch);
        let surround = gaussian_blur(plane, w, h, sigma);
        raw.extend(
            plane
                .iter()
                .zip(&surround)
                .map(|(&v, &s)| v.ln() - s.ln()),
        );
    }
    raw
}

/// Single-scale Retinex at scale `sigma`.
pub fn ssr(img: &ImageF, sigma: f64) -> ImageF {
    finalize_log(img, ssr_log(img, sigma))
}

/// Multi-scale Retinex: the weighted sum of raw single-scale responses,
/// stretched once at the end.
pub fn msr(img: &ImageF, bank: &ScaleBank) -> ImageF {
    let len = img.data().len();
    let mut combined = vec![0.0; len];
    for &(sigma, weight) in bank.pairs() {
        let raw = ssr_log(img, sigma);
        for (acc, v) in combined.iter_mut().zip(raw) {
            *acc += weight * v;
        }
    }
    finalize_log(img, combined)
}

/// Homomorphic filtering: divides out the smooth illumination estimated in
/// the log domain, then stretches.
pub fn homomorphic(img: &ImageF, sigma: f64) -> ImageF {
    let f = clamp_floor(img, EpsilonPolicy::default());
    let (w, h, c) = (f.width(), f.height(), f.channels());
    let mut raw = Vec::with_capacity(c * w * h);
    for ch in 0..c {
        let plane = f.plane(ch);
        let logs: Vec<f64> = plane.iter().map(|&v| v.ln()).collect();
        let smooth = gaussian_blur(&logs, w, h, sigma);
        raw.extend(logs.iter().zip(&smooth).map(|(&l, &s)| (l - s).exp()));
    }
    finalize_raw(img, raw)
}

/// Percentile stretch of a raw log-domain plane set; a degenerate span
/// falls back to exponentiation (a constant image maps to all ones).
fn finalize_log(img: &ImageF, raw: Vec<f64>) -> ImageF {
    let (lo, hi) = tail_values(&raw, STRETCH_TAIL, STRETCH_TAIL);
    if hi - lo < DEGENERATE_SPAN {
        let data = raw.into_iter().map(f64::exp).collect();
        return ImageF::from_data_clamped(img.width(), img.height(), img.channels(), data);
    }
    stretch(img, raw, lo, hi)
}

/// Percentile stretch of a raw positive plane set; a degenerate span keeps
/// the raw values (clipped).
fn finalize_raw(img: &ImageF, raw: Vec<f64>) -> ImageF {
    let (lo, hi) = tail_values(&raw, STRETCH_TAIL, STRETCH_TAIL);
    if hi - lo < DEGENERATE_SPAN {
        return ImageF::from_data_clamped(img.width(), img.height(), img.channels(), raw);
    }
    stretch(img, raw, lo, hi)
}

fn stretch(img: &ImageF, raw: Vec<f64>, lo: f64, hi: f64) -> ImageF {
    let span = hi - lo;
    let data = raw.into_iter().map(|v| (v - lo) / span).collect();
    ImageF::from_data_clamped(img.width(), img.height(), img.channels(), data)
}
