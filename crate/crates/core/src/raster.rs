//! Planar unit-range rasters and global tone operations.

use crate::error::{Error, Result};

/// Scale of the sample grid: stored samples are multiples of 2^-53.
const GRID: f64 = 9_007_199_254_740_992.0;

/// Rounds a unit-range value to the nearest point of the sample grid.
///
/// On the grid `1 - x` is exactly representable and the grid is closed under
/// it, which makes [`invert`] a bitwise involution. The rounding error is at
/// most 2^-54, far below every tolerance used in this crate, and 8/16-bit
/// codes survive a round-trip unchanged.
#[inline]
pub fn snap_unit(v: f64) -> f64 {
    (v * GRID).round() * (1.0 / GRID)
}

/// A floating-point image with 1 or 3 planes of samples in `[0, 1]`.
///
/// Storage is planar: plane `c` occupies `data[c*w*h .. (c+1)*w*h]` in
/// row-major order. Every stored sample lies on the 2^-53 sample grid (see
/// [`snap_unit`]); all constructors clamp to `[0, 1]` and snap.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageF {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageF {
    /// Creates a `width x height` image with `channels` planes filled with
    /// `fill`.
    ///
    /// # Errors
    /// `InvalidParameter` if a dimension is zero, `channels` is not 1 or 3,
    /// or `fill` is not finite.
    pub fn new(width: usize, height: usize, channels: usize, fill: f64) -> Result<Self> {
        check_shape(width, height, channels)?;
        if !fill.is_finite() {
            return Err(Error::InvalidParameter("fill value must be finite".into()));
        }
        let v = snap_unit(fill.clamp(0.0, 1.0));
        Ok(ImageF {
            width,
            height,
            channels,
            data: vec![v; width * height * channels],
        })
    }

    /// Builds an image by evaluating `f(channel, x, y)`.
    ///
    /// Values are clamped to `[0, 1]` and snapped to the sample grid.
    ///
    /// # Errors
    /// `InvalidParameter` on a bad shape or a non-finite sample.
    pub fn from_fn<F>(width: usize, height: usize, channels: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> f64,
    {
        check_shape(width, height, channels)?;
        let mut data = Vec::with_capacity(width * height * channels);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    let v = f(c, x, y);
                    if !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "non-finite sample at channel {c}, ({x}, {y})"
                        )));
                    }
                    data.push(snap_unit(v.clamp(0.0, 1.0)));
                }
            }
        }
        Ok(ImageF {
            width,
            height,
            channels,
            data,
        })
    }

    /// Wraps planar data (plane-major, row-major within a plane).
    ///
    /// Values are clamped to `[0, 1]` and snapped to the sample grid.
    ///
    /// # Errors
    /// `InvalidParameter` on a bad shape, a length mismatch, or a non-finite
    /// sample.
    pub fn from_vec(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(width, height, channels)?;
        if data.len() != width * height * channels {
            return Err(Error::InvalidParameter(format!(
                "data length {} does not match {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample {v}")));
        }
        Ok(Self::from_data_clamped(width, height, channels, data))
    }

    /// Internal constructor for already-validated shapes; clamps and snaps.
    pub(crate) fn from_data_clamped(
        width: usize,
        height: usize,
        channels: usize,
        mut data: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        for v in &mut data {
            debug_assert!(v.is_finite());
            *v = snap_unit(v.clamp(0.0, 1.0));
        }
        ImageF {
            width,
            height,
            channels,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Number of pixels in one plane.
    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// All samples, plane-major.
    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// One plane, row-major.
    #[inline]
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.pixel_count();
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    /// Sets one sample, clamping to `[0, 1]` and snapping to the grid.
    ///
    /// # Panics
    /// If `v` is not finite or the coordinates are out of bounds.
    #[inline]
    pub fn set(&mut self, c: usize, x: usize, y: usize, v: f64) {
        assert!(v.is_finite(), "sample must be finite");
        self.data[(c * self.height + y) * self.width + x] = snap_unit(v.clamp(0.0, 1.0));
    }

    /// Applies `f` to every sample, clamping and snapping the results.
    ///
    /// # Panics
    /// If `f` returns a non-finite value.
    pub fn map<F>(&self, mut f: F) -> ImageF
    where
        F: FnMut(f64) -> f64,
    {
        let data = self
            .data
            .iter()
            .map(|&v| {
                let r = f(v);
                assert!(r.is_finite(), "mapped sample must be finite");
                r
            })
            .collect();
        Self::from_data_clamped(self.width, self.height, self.channels, data)
    }

    /// Rec. 601 luma plane (for 1-channel images, a copy of the plane).
    pub fn luma(&self) -> Vec<f64> {
        let n = self.pixel_count();
        if self.channels == 1 {
            return self.data.clone();
        }
        let (r, g, b) = (self.plane(0), self.plane(1), self.plane(2));
        (0..n)
            .map(|i| 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i])
            .collect()
    }

    /// True when both images have identical width, height, and channels.
    #[inline]
    pub fn same_shape(&self, other: &ImageF) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.channels == other.channels
    }

    pub(crate) fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }
}

fn check_shape(width: usize, height: usize, channels: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(
            "width and height must be nonzero".into(),
        ));
    }
    if channels != 1 && channels != 3 {
        return Err(Error::InvalidParameter(format!(
            "channels must be 1 or 3, got {channels}"
        )));
    }
    Ok(())
}

/// Lower bound applied before divisions and logarithms.
///
/// The floor keeps ratios and logs finite on images containing true black.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonPolicy {
    floor: f64,
}

impl EpsilonPolicy {
    /// Default floor of one 8-bit step.
    pub const DEFAULT_FLOOR: f64 = 1.0 / 255.0;

    /// Creates a policy with the given floor.
    ///
    /// # Errors
    /// `InvalidParameter` unless `0 < floor < 0.1`.
    pub fn new(floor: f64) -> Result<Self> {
        if !(floor > 0.0 && floor < 0.1) {
            return Err(Error::InvalidParameter(format!(
                "floor must lie in (0, 0.1), got {floor}"
            )));
        }
        Ok(EpsilonPolicy { floor })
    }

    #[inline]
    pub fn floor(self) -> f64 {
        self.floor
    }
}

impl Default for EpsilonPolicy {
    fn default() -> Self {
        EpsilonPolicy {
            floor: Self::DEFAULT_FLOOR,
        }
    }
}

/// Pointwise inversion `v -> 1 - v`.
///
/// On the sample grid this is exact, so `invert(invert(img)) == img`
/// bitwise for every representable image.
pub fn invert(img: &ImageF) -> ImageF {
    let data = img.data.iter().map(|&v| 1.0 - v).collect();
    ImageF::from_data_clamped(img.width, img.height, img.channels, data)
}

/// Raises every sample to at least the policy floor.
pub fn clamp_floor(img: &ImageF, policy: EpsilonPolicy) -> ImageF {
    let floor = policy.floor();
    let data = img.data.iter().map(|&v| v.max(floor)).collect();
    ImageF::from_data_clamped(img.width, img.height, img.channels, data)
}

/// Affine contrast stretch between the `lower` and `upper` tail quantiles.
///
/// Quantiles are taken jointly over all channels. The value at tail fraction
/// `p` is `sorted[floor(n*p)]` from the respective end. Results are clipped
/// to `[0, 1]`. When the span between the two quantiles is below `1e-6` the
/// input is returned unchanged.
///
/// # Errors
/// `InvalidParameter` unless both fractions lie in `[0, 0.5)`.
pub fn percentile_rescale(img: &ImageF, lower: f64, upper: f64) -> Result<ImageF> {
    for (name, p) in [("lower", lower), ("upper", upper)] {
        if !(p.is_finite() && (0.0..0.5).contains(&p)) {
            return Err(Error::InvalidParameter(format!(
                "{name} tail fraction must lie in [0, 0.5), got {p}"
            )));
        }
    }
    let (lo, hi) = tail_values(&img.data, lower, upper);
    let span = hi - lo;
    if span < 1e-6 {
        return Ok(img.clone());
    }
    let data = img.data.iter().map(|&v| (v - lo) / span).collect();
    Ok(ImageF::from_data_clamped(
        img.width,
        img.height,
        img.channels,
        data,
    ))
}

/// Tail quantile index: `floor(n * p)`, clamped to the valid range.
#[inline]
pub(crate) fn tail_index(n: usize, p: f64) -> usize {
    ((n as f64 * p) as usize).min(n - 1)
}

/// Values at the lower and upper tail quantiles of `values`.
pub(crate) fn tail_values(values: &[f64], lower: f64, upper: f64) -> (f64, f64) {
    let n = values.len();
    let lo_i = tail_index(n, lower);
    let hi_i = n - 1 - tail_index(n, upper);
    let mut scratch = values.to_vec();
    let (_, &mut lo, _) = scratch.select_nth_unstable_by(lo_i, f64::total_cmp);
    let (_, &mut hi, _) = scratch.select_nth_unstable_by(hi_i, f64::total_cmp);
    (lo, hi)
}

/// Histogram equalization, each channel independently.
///
/// A sample maps to the inclusive cumulative frequency of its bin, so the
/// top occupied bin maps to exactly 1 and a constant image stays constant.
///
/// # Errors
/// `InvalidParameter` if `bins < 2`.
pub fn hist_equalize(img: &ImageF, bins: usize) -> Result<ImageF> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "bins must be at least 2, got {bins}"
        )));
    }
    let n = img.pixel_count();
    let mut out = Vec::with_capacity(img.data.len());
    for c in 0..img.channels {
        let plane = img.plane(c);
        let mut counts = vec![0u64; bins];
        for &v in plane {
            counts[bin_of(v, bins)] += 1;
        }
        let mut cum = 0u64;
        let cdf: Vec<f64> = counts
            .iter()
            .map(|&k| {
                cum += k;
                cum as f64 / n as f64
            })
            .collect();
        out.extend(plane.iter().map(|&v| cdf[bin_of(v, bins)]));
    }
    Ok(ImageF::from_data_clamped(
        img.width,
        img.height,
        img.channels,
        out,
    ))
}

#[inline]
fn bin_of(v: f64, bins: usize) -> usize {
    ((v * bins as f64) as usize).min(bins - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn random_image(seed: u64, w: usize, h: usize, c: usize) -> ImageF {
        let mut s = Stream::new(seed, 0, 0);
        ImageF::from_fn(w, h, c, |_, _, _| s.unit_open()).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(ImageF::new(0, 4, 1, 0.5).is_err());
        assert!(ImageF::new(4, 0, 1, 0.5).is_err());
        assert!(ImageF::new(4, 4, 2, 0.5).is_err());
        assert!(ImageF::new(4, 4, 4, 0.5).is_err());
        assert!(ImageF::new(4, 4, 3, f64::NAN).is_err());
        assert!(ImageF::new(4, 4, 3, 0.5).is_ok());
    }

    #[test]
    fn from_vec_validation() {
        assert!(ImageF::from_vec(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(ImageF::from_vec(2, 2, 1, vec![0.0, 0.1, f64::INFINITY, 0.3]).is_err());
        let img = ImageF::from_vec(2, 2, 1, vec![-0.5, 0.25, 1.5, 1.0]).unwrap();
        assert_eq!(img.data(), &[0.0, 0.25, 1.0, 1.0]);
    }

    #[test]
    fn planar_layout() {
        let img = ImageF::from_fn(2, 2, 3, |c, x, y| (c * 4 + y * 2 + x) as f64 / 16.0).unwrap();
        assert_eq!(img.get(1, 1, 0), 5.0 / 16.0);
        assert_eq!(img.plane(2), &[0.5, 9.0 / 16.0, 10.0 / 16.0, 11.0 / 16.0]);
    }

    #[test]
    fn snap_preserves_bit_codes() {
        for k in 0..=255u32 {
            let v = snap_unit(k as f64 / 255.0);
            assert_eq!((v * 255.0).round() as u32, k);
        }
        for k in (0..=65535u32).step_by(7) {
            let v = snap_unit(k as f64 / 65535.0);
            assert_eq!((v * 65535.0).round() as u32, k);
        }
    }

    #[test]
    fn invert_trivial() {
        let img = ImageF::new(3, 2, 1, 0.75).unwrap();
        assert_eq!(invert(&img).data()[0], 0.25);
    }

    #[test]
    fn invert_is_exact_involution_on_bit_levels() {
        let img8 = ImageF::from_fn(16, 16, 1, |_, x, y| ((y * 16 + x) % 256) as f64 / 255.0)
            .unwrap();
        assert_eq!(invert(&invert(&img8)), img8);
        let img16 =
            ImageF::from_fn(256, 256, 1, |_, x, y| (y * 256 + x) as f64 / 65535.0).unwrap();
        assert_eq!(invert(&invert(&img16)), img16);
    }

    #[test]
    fn invert_is_exact_involution_on_random_samples() {
        let img = random_image(9, 64, 64, 3);
        assert_eq!(invert(&invert(&img)), img);
    }

    #[test]
    fn epsilon_policy_range() {
        assert!(EpsilonPolicy::new(0.0).is_err());
        assert!(EpsilonPolicy::new(0.1).is_err());
        assert!(EpsilonPolicy::new(-0.01).is_err());
        assert!(EpsilonPolicy::new(0.05).is_ok());
        assert_eq!(EpsilonPolicy::default().floor(), 1.0 / 255.0);
    }

    #[test]
    fn clamp_floor_raises_black() {
        let img = ImageF::from_vec(2, 1, 1, vec![0.0, 0.5]).unwrap();
        let out = clamp_floor(&img, EpsilonPolicy::default());
        assert!((out.data()[0] - 1.0 / 255.0).abs() < 1e-12);
        assert_eq!(out.data()[1], 0.5);
    }

    #[test]
    fn percentile_rescale_full_range() {
        let img = ImageF::from_vec(4, 1, 1, vec![0.2, 0.4, 0.6, 0.8]).unwrap();
        let out = percentile_rescale(&img, 0.0, 0.0).unwrap();
        let d = out.data();
        assert!((d[0] - 0.0).abs() < 1e-12);
        assert!((d[3] - 1.0).abs() < 1e-12);
        assert!((d[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn percentile_rescale_degenerate_is_identity() {
        let img = ImageF::new(5, 5, 3, 0.42).unwrap();
        let out = percentile_rescale(&img, 0.01, 0.01).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn percentile_rescale_clips_tails() {
        // 100 samples: tail index floor(100 * 0.01) = 1, so the affine map
        // sends sorted[1] -> 0 and sorted[98] -> 1 and clips the extremes.
        let mut vals: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        vals[0] = 0.0;
        vals[99] = 1.0;
        let img = ImageF::from_vec(10, 10, 1, vals.clone()).unwrap();
        let out = percentile_rescale(&img, 0.01, 0.01).unwrap();
        assert_eq!(out.data()[0], 0.0);
        assert_eq!(out.data()[99], 1.0);
        let lo = vals[1];
        let hi = vals[98];
        let expect = (vals[50] - lo) / (hi - lo);
        assert!((out.data()[50] - expect).abs() < 1e-12);
    }

    #[test]
    fn percentile_rescale_rejects_bad_fractions() {
        let img = ImageF::new(2, 2, 1, 0.5).unwrap();
        assert!(percentile_rescale(&img, -0.1, 0.0).is_err());
        assert!(percentile_rescale(&img, 0.0, 0.5).is_err());
        assert!(percentile_rescale(&img, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn hist_equalize_two_level() {
        let img = ImageF::from_vec(2, 2, 1, vec![0.2, 0.8, 0.2, 0.8]).unwrap();
        let out = hist_equalize(&img, 256).unwrap();
        assert_eq!(out.data(), &[0.5, 1.0, 0.5, 1.0]);
    }

    #[test]
    fn hist_equalize_constant_stays_constant() {
        let img = ImageF::new(4, 4, 3, 0.3).unwrap();
        let out = hist_equalize(&img, 256).unwrap();
        assert!(out.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn hist_equalize_is_per_channel() {
        let img = ImageF::from_fn(2, 1, 3, |c, x, _| match (c, x) {
            (0, _) => 0.5,
            (_, x) => [0.1, 0.9][x],
        })
        .unwrap();
        let out = hist_equalize(&img, 256).unwrap();
        assert_eq!(out.plane(0), &[1.0, 1.0]);
        assert_eq!(out.plane(1), &[0.5, 1.0]);
    }

    #[test]
    fn hist_equalize_rejects_few_bins() {
        let img = ImageF::new(2, 2, 1, 0.5).unwrap();
        assert!(hist_equalize(&img, 1).is_err());
    }

    #[test]
    fn luma_matches_weights() {
        let img = ImageF::from_fn(1, 1, 3, |c, _, _| [0.25, 0.5, 0.75][c]).unwrap();
        let l = img.luma()[0];
        assert!((l - (0.299 * 0.25 + 0.587 * 0.5 + 0.114 * 0.75)).abs() < 1e-12);
    }
}
