//! Full-reference and no-reference image quality metrics.
//!
//! Full-reference: structural similarity ([`ssim`]), color peak
//! signal-to-noise ratio ([`cpsnr`]), and mean CIEDE2000 color difference
//! ([`de00`]). No-reference visibility: the visible-edge gain `e`, the
//! geometric-mean gradient ratio `r`, and the saturation percentage `sigma`
//! of [`visibility_metrics`]. Results are gathered into [`MetricReport`]
//! rows and serialized as CSV.

use std::io::Write;

use crate::error::{Error, Result};
use crate::filter::gaussian_kernel;
use crate::raster::{EpsilonPolicy, ImageF};

/// Side of the SSIM sliding window.
pub const SSIM_WINDOW: usize = 11;

/// Standard deviation of the SSIM window weights.
pub const SSIM_SIGMA: f64 = 1.5;

/// SSIM stabilization constant factors for a unit dynamic range.
pub const SSIM_K1: f64 = 0.01;
/// See [`SSIM_K1`].
pub const SSIM_K2: f64 = 0.03;

/// Decibel cap reported for (near-)identical images.
pub const CPSNR_CAP: f64 = 99.0;

/// Michelson contrast above which a pixel counts as a visible edge.
pub const EDGE_CONTRAST_THRESHOLD: f64 = 0.05;

fn require_same_shape(a: &ImageF, b: &ImageF) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch {
            expected: a.shape(),
            actual: b.shape(),
        });
    }
    Ok(())
}

/// Mean structural similarity over all fully contained 11x11 windows,
/// computed on luma with Gaussian weights of sigma 1.5.
///
/// # Errors
/// `DimensionMismatch` if shapes differ; `TooSmall` if either dimension
/// cannot fit one window.
pub fn ssim(a: &ImageF, b: &ImageF) -> Result<f64> {
    require_same_shape(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall {
            required: SSIM_WINDOW,
            width: w,
            height: h,
        });
    }
    let la = a.luma();
    let lb = b.luma();
    let radius = SSIM_WINDOW / 2;
    let line = gaussian_kernel(SSIM_SIGMA, radius);
    let c1 = (SSIM_K1 * SSIM_K1) as f64;
    let c2 = (SSIM_K2 * SSIM_K2) as f64;

    let mut total = 0.0;
    let mut windows = 0usize;
    for y0 in 0..=h - SSIM_WINDOW {
        for x0 in 0..=w - SSIM_WINDOW {
            let (mut ma, mut mb) = (0.0, 0.0);
            let (mut maa, mut mbb, mut mab) = (0.0, 0.0, 0.0);
            for dy in 0..SSIM_WINDOW {
                let row = (y0 + dy) * w + x0;
                let wy = line[dy];
                for dx in 0..SSIM_WINDOW {
                    let weight = wy * line[dx];
                    let va = la[row + dx];
                    let vb = lb[row + dx];
                    ma += weight * va;
                    mb += weight * vb;
                    maa += weight * va * va;
                    mbb += weight * vb * vb;
                    mab += weight * va * vb;
                }
            }
            let var_a = maa - ma * ma;
            let var_b = mbb - mb * mb;
            let cov = mab - ma * mb;
            let score = ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
            total += score;
            windows += 1;
        }
    }
    Ok(total / windows as f64)
}

/// Peak signal-to-noise ratio with the MSE pooled over all channels,
/// capped at [`CPSNR_CAP`] decibels.
///
/// # Errors
/// `DimensionMismatch` if shapes differ.
pub fn cpsnr(a: &ImageF, b: &ImageF) -> Result<f64> {
    require_same_shape(a, b)?;
    let mse = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.data().len() as f64;
    if mse == 0.0 {
        return Ok(CPSNR_CAP);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(CPSNR_CAP))
}

fn srgb_to_linear(u: f64) -> f64 {
    if u <= 0.04045 {
        u / 12.92
    } else {
        ((u + 0.055) / 1.055).powf(2.4)
    }
}

/// Converts an sRGB color in `[0, 1]` to CIELAB under the D65 white point.
pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let r = srgb_to_linear(rgb[0]);
    let g = srgb_to_linear(rgb[1]);
    let b = srgb_to_linear(rgb[2]);
    let x = (0.412453 * r + 0.357580 * g + 0.180423 * b) / 0.95047;
    let y = 0.212671 * r + 0.715160 * g + 0.072169 * b;
    let z = (0.019334 * r + 0.119193 * g + 0.950227 * b) / 1.08883;

    let eps = 216.0 / 24389.0;
    let f = |t: f64| {
        if t > eps {
            t.cbrt()
        } else {
            t * (841.0 / 108.0) + 4.0 / 29.0
        }
    };
    let (fx, fy, fz) = (f(x), f(y), f(z));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// CIEDE2000 color difference between two CIELAB colors, unit weights.
pub fn delta_e_2000_lab(lab1: [f64; 3], lab2: [f64; 3]) -> f64 {
    let (l1, a1, b1) = (lab1[0], lab1[1], lab1[2]);
    let (l2, a2, b2) = (lab2[0], lab2[1], lab2[2]);

    let c1 = a1.hypot(b1);
    let c2 = a2.hypot(b2);
    let cbar = 0.5 * (c1 + c2);
    let cbar7 = cbar.powi(7);
    let g = 0.5 * (1.0 - (cbar7 / (cbar7 + 25.0f64.powi(7))).sqrt());
    let a1p = (1.0 + g) * a1;
    let a2p = (1.0 + g) * a2;
    let c1p = a1p.hypot(b1);
    let c2p = a2p.hypot(b2);

    let hue = |a: f64, b: f64| {
        if a == 0.0 && b == 0.0 {
            0.0
        } else {
            let h = b.atan2(a).to_degrees();
            if h < 0.0 {
                h + 360.0
            } else {
                h
            }
        }
    };
    let h1p = hue(a1p, b1);
    let h2p = hue(a2p, b2);

    let dlp = l2 - l1;
    let dcp = c2p - c1p;
    let dhp = if c1p * c2p == 0.0 {
        0.0
    } else {
        let d = h2p - h1p;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let dhp_big = 2.0 * (c1p * c2p).sqrt() * (0.5 * dhp.to_radians()).sin();

    let lbar = 0.5 * (l1 + l2);
    let cbar_p = 0.5 * (c1p + c2p);
    let hbar = if c1p * c2p == 0.0 {
        h1p + h2p
    } else {
        let sum = h1p + h2p;
        if (h1p - h2p).abs() <= 180.0 {
            0.5 * sum
        } else if sum < 360.0 {
            0.5 * (sum + 360.0)
        } else {
            0.5 * (sum - 360.0)
        }
    };

    let t = 1.0 - 0.17 * (hbar - 30.0).to_radians().cos()
        + 0.24 * (2.0 * hbar).to_radians().cos()
        + 0.32 * (3.0 * hbar + 6.0).to_radians().cos()
        - 0.20 * (4.0 * hbar - 63.0).to_radians().cos();
    let dtheta = 30.0 * (-((hbar - 275.0) / 25.0).powi(2)).exp();
    let cbar_p7 = cbar_p.powi(7);
    let rc = 2.0 * (cbar_p7 / (cbar_p7 + 25.0f64.powi(7))).sqrt();
    let l50 = (lbar - 50.0) * (lbar - 50.0);
    let sl = 1.0 + 0.015 * l50 / (20.0 + l50).sqrt();
    let sc = 1.0 + 0.045 * cbar_p;
    let sh = 1.0 + 0.015 * cbar_p * t;
    let rt = -(2.0 * dtheta).to_radians().sin() * rc;

    let (vl, vc, vh) = (dlp / sl, dcp / sc, dhp_big / sh);
    (vl * vl + vc * vc + vh * vh + rt * vc * vh).sqrt()
}

fn pixel_rgb(img: &ImageF, k: usize) -> [f64; 3] {
    if img.channels() == 1 {
        let v = img.plane(0)[k];
        [v, v, v]
    } else {
        [img.plane(0)[k], img.plane(1)[k], img.plane(2)[k]]
    }
}

/// Mean per-pixel CIEDE2000 difference between two sRGB images.
///
/// Single-channel images are treated as gray sRGB.
///
/// # Errors
/// `DimensionMismatch` if shapes differ.
pub fn de00(a: &ImageF, b: &ImageF) -> Result<f64> {
    require_same_shape(a, b)?;
    let n = a.pixel_count();
    let total: f64 = (0..n)
        .map(|k| delta_e_2000_lab(srgb_to_lab(pixel_rgb(a, k)), srgb_to_lab(pixel_rgb(b, k))))
        .sum();
    Ok(total / n as f64)
}

/// No-reference visibility comparison of an enhancement result against its
/// input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Visibility {
    /// Relative gain in visible-edge count; absent when the input has none.
    pub e: Option<f64>,
    /// Geometric-mean gradient-magnitude ratio over the output's visible
    /// edges; absent when the output has none.
    pub r: Option<f64>,
    /// Percentage of pixels saturated by the enhancement.
    pub sigma: f64,
}

fn michelson_edges(luma: &[f64], w: usize, h: usize) -> Vec<bool> {
    let mut mask = vec![false; w * h];
    for y in 0..h {
        let y0 = y.saturating_sub(1);
        let y1 = (y + 1).min(h - 1);
        for x in 0..w {
            let x0 = x.saturating_sub(1);
            let x1 = (x + 1).min(w - 1);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for yy in y0..=y1 {
                for xx in x0..=x1 {
                    let v = luma[yy * w + xx];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            let sum = hi + lo;
            mask[y * w + x] = sum > 0.0 && (hi - lo) / sum > EDGE_CONTRAST_THRESHOLD;
        }
    }
    mask
}

fn gradient_magnitude(luma: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut grad = vec![0.0; w * h];
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            let gx = (luma[y * w + right] - luma[y * w + left]) / 2.0;
            let gy = (luma[down * w + x] - luma[up * w + x]) / 2.0;
            grad[y * w + x] = gx.hypot(gy);
        }
    }
    grad
}

/// Computes the visible-edge gain `e`, gradient ratio `r`, and saturation
/// percentage `sigma` of `after` relative to `before`, all on luma.
///
/// A pixel is a visible edge when its 3x3 Michelson contrast exceeds
/// [`EDGE_CONTRAST_THRESHOLD`]; gradients are central differences with
/// replicated borders, floored at 1/255 inside the ratio.
///
/// # Errors
/// `DimensionMismatch` if shapes differ.
pub fn visibility_metrics(before: &ImageF, after: &ImageF) -> Result<Visibility> {
    require_same_shape(before, after)?;
    let (w, h) = (before.width(), before.height());
    let lb = before.luma();
    let la = after.luma();

    let mask_b = michelson_edges(&lb, w, h);
    let mask_a = michelson_edges(&la, w, h);
    let n_b = mask_b.iter().filter(|m| **m).count();
    let n_a = mask_a.iter().filter(|m| **m).count();
    let e = (n_b > 0).then(|| (n_a as f64 - n_b as f64) / n_b as f64);

    let grad_b = gradient_magnitude(&lb, w, h);
    let grad_a = gradient_magnitude(&la, w, h);
    let floor = EpsilonPolicy::DEFAULT_FLOOR;
    let mut log_sum = 0.0;
    let mut edge_count = 0usize;
    for k in 0..w * h {
        if mask_a[k] {
            log_sum += (grad_a[k].max(floor) / grad_b[k].max(floor)).ln();
            edge_count += 1;
        }
    }
    let r = (edge_count > 0).then(|| (log_sum / edge_count as f64).exp());

    let saturated = |v: f64| v == 0.0 || v == 1.0;
    let newly = la
        .iter()
        .zip(&lb)
        .filter(|(a, b)| saturated(**a) && !saturated(**b))
        .count();
    let sigma = 100.0 * newly as f64 / (w * h) as f64;

    Ok(Visibility { e, r, sigma })
}

/// One evaluation row: metric values for a single image and method, with
/// absent metrics left empty rather than zero-filled.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub id: String,
    pub method: String,
    pub ssim: Option<f64>,
    pub cpsnr: Option<f64>,
    pub de00: Option<f64>,
    pub e: Option<f64>,
    pub r: Option<f64>,
    pub sigma: Option<f64>,
}

impl MetricReport {
    /// A row with every metric absent.
    pub fn empty(id: impl Into<String>, method: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            method: method.into(),
            ssim: None,
            cpsnr: None,
            de00: None,
            e: None,
            r: None,
            sigma: None,
        }
    }

    fn fields(&self) -> [Option<f64>; 6] {
        [self.ssim, self.cpsnr, self.de00, self.e, self.r, self.sigma]
    }
}

/// The fixed CSV column order of [`write_csv`].
pub const CSV_HEADER: [&str; 8] = ["id", "method", "ssim", "cpsnr", "de00", "e", "r", "sigma"];

fn format_field(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Serializes reports as CSV with the [`CSV_HEADER`] schema; absent metrics
/// become empty fields.
///
/// # Errors
/// `Io` on write failure.
pub fn write_csv<W: Write>(reports: &[MetricReport], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for report in reports {
        let mut record = vec![report.id.clone(), report.method.clone()];
        record.extend(report.fields().into_iter().map(format_field));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Aggregates rows into a `mean` row per metric, averaging only the values
/// that are present; a metric absent everywhere stays absent.
pub fn mean_report(reports: &[MetricReport], method: impl Into<String>) -> MetricReport {
    let mean_of = |pick: fn(&MetricReport) -> Option<f64>| {
        let values: Vec<f64> = reports.iter().filter_map(pick).collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    };
    MetricReport {
        id: "mean".into(),
        method: method.into(),
        ssim: mean_of(|r| r.ssim),
        cpsnr: mean_of(|r| r.cpsnr),
        de00: mean_of(|r| r.de00),
        e: mean_of(|r| r.e),
        r: mean_of(|r| r.r),
        sigma: mean_of(|r| r.sigma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn random_image(seed: u64, w: usize, h: usize, c: usize) -> ImageF {
        let mut s = Stream::new(seed, 0, 0);
        ImageF::from_fn(w, h, c, |_, _, _| s.unit_open()).unwrap()
    }

    /// Published CIEDE2000 verification pairs: `(lab1, lab2, expected)`.
    const DE00_PAIRS: [([f64; 3], [f64; 3], f64); 34] = [
        ([50.0, 2.6772, -79.7751], [50.0, 0.0, -82.7485], 2.0425),
        ([50.0, 3.1571, -77.2803], [50.0, 0.0, -82.7485], 2.8615),
        ([50.0, 2.8361, -74.02], [50.0, 0.0, -82.7485], 3.4412),
        ([50.0, -1.3802, -84.2814], [50.0, 0.0, -82.7485], 1.0),
        ([50.0, -1.1848, -84.8006], [50.0, 0.0, -82.7485], 1.0),
        ([50.0, -0.9009, -85.5211], [50.0, 0.0, -82.7485], 1.0),
        ([50.0, 0.0, 0.0], [50.0, -1.0, 2.0], 2.3669),
        ([50.0, -1.0, 2.0], [50.0, 0.0, 0.0], 2.3669),
        ([50.0, 2.49, -0.001], [50.0, -2.49, 0.0009], 7.1792),
        ([50.0, 2.49, -0.001], [50.0, -2.49, 0.001], 7.1792),
        ([50.0, 2.49, -0.001], [50.0, -2.49, 0.0011], 7.2195),
        ([50.0, 2.49, -0.001], [50.0, -2.49, 0.0012], 7.2195),
        ([50.0, -0.001, 2.49], [50.0, 0.0009, -2.49], 4.8045),
        ([50.0, -0.001, 2.49], [50.0, 0.001, -2.49], 4.8045),
        ([50.0, -0.001, 2.49], [50.0, 0.0011, -2.49], 4.7461),
        ([50.0, 2.5, 0.0], [50.0, 0.0, -2.5], 4.3065),
        ([50.0, 2.5, 0.0], [73.0, 25.0, -18.0], 27.1492),
        ([50.0, 2.5, 0.0], [61.0, -5.0, 29.0], 22.8977),
        ([50.0, 2.5, 0.0], [56.0, -27.0, -3.0], 31.903),
        ([50.0, 2.5, 0.0], [58.0, 24.0, 15.0], 19.4535),
        ([50.0, 2.5, 0.0], [50.0, 3.1736, 0.5854], 1.0),
        ([50.0, 2.5, 0.0], [50.0, 3.2972, 0.0], 1.0),
        ([50.0, 2.5, 0.0], [50.0, 1.8634, 0.5757], 1.0),
        ([50.0, 2.5, 0.0], [50.0, 3.2592, 0.335], 1.0),
        (
            [60.2574, -34.0099, 36.2677],
            [60.4626, -34.1751, 39.4387],
            1.2644,
        ),
        (
            [63.0109, -31.0961, -5.8663],
            [62.8187, -29.7946, -4.0864],
            1.263,
        ),
        (
            [61.2901, 3.7196, -5.3901],
            [61.4292, 2.248, -4.962],
            1.8731,
        ),
        (
            [35.0831, -44.1164, 3.7933],
            [35.0232, -40.0716, 1.5901],
            1.8645,
        ),
        (
            [22.7233, 20.0904, -46.694],
            [23.0331, 14.973, -42.5619],
            2.0373,
        ),
        (
            [36.4612, 47.858, 18.3852],
            [36.2715, 50.5065, 21.2231],
            1.4146,
        ),
        (
            [90.8027, -2.0831, 1.441],
            [91.1528, -1.6435, 0.0447],
            1.4441,
        ),
        (
            [90.9257, -0.5406, -0.9208],
            [88.6381, -0.8985, -0.7239],
            1.5381,
        ),
        (
            [6.7747, -0.2908, -2.4247],
            [5.8714, -0.0985, -2.2286],
            0.6377,
        ),
        (
            [2.0776, 0.0795, -1.135],
            [0.9033, -0.0636, -0.5514],
            0.9082,
        ),
    ];

    #[test]
    fn ssim_of_identical_images_is_one() {
        let img = random_image(101, 24, 20, 3);
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
    }

    #[test]
    fn ssim_is_symmetric() {
        let a = random_image(102, 20, 16, 3);
        let b = random_image(103, 20, 16, 3);
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn ssim_matches_centered_moment_reference() {
        let a = random_image(104, 16, 16, 1);
        let b = random_image(105, 16, 16, 1);
        let got = ssim(&a, &b).unwrap();

        let la = a.luma();
        let lb = b.luma();
        let line = gaussian_kernel(SSIM_SIGMA, SSIM_WINDOW / 2);
        let mut weights = vec![0.0; SSIM_WINDOW * SSIM_WINDOW];
        for (i, wy) in line.iter().enumerate() {
            for (j, wx) in line.iter().enumerate() {
                weights[i * SSIM_WINDOW + j] = wy * wx;
            }
        }
        let (c1, c2) = (1e-4, 9e-4);
        let mut total = 0.0;
        let mut count = 0;
        for y0 in 0..=16 - SSIM_WINDOW {
            for x0 in 0..=16 - SSIM_WINDOW {
                let sample = |src: &[f64], i: usize, j: usize| src[(y0 + i) * 16 + x0 + j];
                let mut mu_a = 0.0;
                let mut mu_b = 0.0;
                for i in 0..SSIM_WINDOW {
                    for j in 0..SSIM_WINDOW {
                        mu_a += weights[i * SSIM_WINDOW + j] * sample(&la, i, j);
                        mu_b += weights[i * SSIM_WINDOW + j] * sample(&lb, i, j);
                    }
                }
                let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
                for i in 0..SSIM_WINDOW {
                    for j in 0..SSIM_WINDOW {
                        let wgt = weights[i * SSIM_WINDOW + j];
                        let da = sample(&la, i, j) - mu_a;
                        let db = sample(&lb, i, j) - mu_b;
                        va += wgt * da * da;
                        vb += wgt * db * db;
                        cov += wgt * da * db;
                    }
                }
                total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                    / ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
                count += 1;
            }
        }
        assert!((got - total / count as f64).abs() < 1e-6);
    }

    #[test]
    fn ssim_rejects_small_or_mismatched_inputs() {
        let small = random_image(106, 8, 8, 1);
        assert!(matches!(
            ssim(&small, &small),
            Err(Error::TooSmall { .. })
        ));
        let a = random_image(107, 16, 16, 1);
        let b = random_image(108, 16, 12, 1);
        assert!(matches!(
            ssim(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cpsnr_reference_points() {
        let a = ImageF::new(10, 10, 3, 0.3).unwrap();
        let b = ImageF::new(10, 10, 3, 0.4).unwrap();
        assert!((cpsnr(&a, &b).unwrap() - 20.0).abs() < 1e-6);
        assert_eq!(cpsnr(&a, &a).unwrap(), CPSNR_CAP);
    }

    #[test]
    fn cpsnr_matches_definition() {
        let a = random_image(109, 12, 10, 3);
        let b = random_image(110, 12, 10, 3);
        let mse: f64 = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            / a.data().len() as f64;
        let want = 10.0 * (1.0 / mse).log10();
        assert!((cpsnr(&a, &b).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn noise_degrades_ssim_and_cpsnr_monotonically() {
        let base = ImageF::from_fn(32, 32, 3, |c, x, y| {
            0.3 + 0.2 * ((x + y + c) as f64 / 66.0)
        })
        .unwrap();
        let mut prev_ssim = f64::INFINITY;
        let mut prev_cpsnr = f64::INFINITY;
        for (i, amp) in [0.02, 0.05, 0.1, 0.2, 0.3].iter().enumerate() {
            let mut s = Stream::new(200 + i as u64, 0, 0);
            let noisy = base.map(|v| v + amp * (2.0 * s.unit_open() - 1.0));
            let cur_ssim = ssim(&base, &noisy).unwrap();
            let cur_cpsnr = cpsnr(&base, &noisy).unwrap();
            assert!(cur_ssim < prev_ssim, "ssim {cur_ssim} vs {prev_ssim}");
            assert!(cur_cpsnr < prev_cpsnr, "cpsnr {cur_cpsnr} vs {prev_cpsnr}");
            prev_ssim = cur_ssim;
            prev_cpsnr = cur_cpsnr;
        }
    }

    #[test]
    fn de00_matches_published_pairs() {
        for (i, (lab1, lab2, want)) in DE00_PAIRS.iter().enumerate() {
            let got = delta_e_2000_lab(*lab1, *lab2);
            assert!(
                (got - want).abs() < 1e-4,
                "pair {}: {got} vs {want}",
                i + 1
            );
        }
    }

    #[test]
    fn de00_is_symmetric_and_zero_on_identical() {
        let a = random_image(111, 10, 8, 3);
        let b = random_image(112, 10, 8, 3);
        assert_eq!(de00(&a, &a).unwrap(), 0.0);
        assert!((de00(&a, &b).unwrap() - de00(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn de00_treats_mono_as_gray() {
        let mono = random_image(113, 9, 9, 1);
        let rgb = ImageF::from_fn(9, 9, 3, |_, x, y| mono.get(0, x, y)).unwrap();
        let shifted = mono.map(|v| (v + 0.1).min(1.0));
        let shifted_rgb = ImageF::from_fn(9, 9, 3, |_, x, y| shifted.get(0, x, y)).unwrap();
        let m = de00(&mono, &shifted).unwrap();
        let c = de00(&rgb, &shifted_rgb).unwrap();
        assert!((m - c).abs() < 1e-12);
    }

    #[test]
    fn visibility_of_identical_pair_is_neutral() {
        let img = ImageF::from_fn(20, 20, 1, |_, x, y| ((x / 4 + y / 4) % 2) as f64 * 0.5 + 0.2)
            .unwrap();
        let v = visibility_metrics(&img, &img).unwrap();
        assert_eq!(v.e, Some(0.0));
        assert!((v.r.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(v.sigma, 0.0);
    }

    #[test]
    fn saturation_counts_clipped_ramp_pixels() {
        let w = 21;
        let before = ImageF::from_fn(w, 6, 1, |_, x, _| x as f64 / (w - 1) as f64).unwrap();
        let after = before.map(|v| 2.0 * v);
        let v = visibility_metrics(&before, &after).unwrap();
        // Columns with value >= 0.5 clip to one, except the last, which was
        // already saturated; column zero is saturated on both sides.
        let newly = (w - 1) / 2;
        let want = 100.0 * newly as f64 / w as f64;
        assert!((v.sigma - want).abs() < 1e-9, "{} vs {want}", v.sigma);
    }

    #[test]
    fn doubling_contrast_doubles_the_gradient_ratio() {
        let w = 17;
        let before = ImageF::from_fn(w, 9, 1, |_, x, _| 0.35 + 0.015 * x as f64).unwrap();
        let after = before.map(|v| 2.0 * v - 0.47);
        let v = visibility_metrics(&before, &after).unwrap();
        let r = v.r.expect("steep ramp has visible edges");
        assert!((r - 2.0).abs() < 0.1, "r = {r}");
        assert_eq!(v.sigma, 0.0);
    }

    #[test]
    fn visibility_rejects_mismatched_shapes() {
        let a = random_image(114, 8, 8, 1);
        let b = random_image(115, 8, 9, 1);
        assert!(matches!(
            visibility_metrics(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn csv_layout_is_stable() {
        let full = MetricReport {
            id: "img1".into(),
            method: "dcp".into(),
            ssim: Some(0.91),
            cpsnr: Some(20.0),
            de00: Some(1.2345678),
            e: None,
            r: Some(2.0),
            sigma: Some(0.0),
        };
        let empty = MetricReport::empty("img2", "he");
        let mut buf = Vec::new();
        write_csv(&[full, empty], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "id,method,ssim,cpsnr,de00,e,r,sigma\n\
             img1,dcp,0.910000,20.000000,1.234568,,2.000000,0.000000\n\
             img2,he,,,,,,\n"
        );
    }

    #[test]
    fn mean_report_averages_present_values() {
        let rows = vec![
            MetricReport {
                id: "a".into(),
                method: "dcp".into(),
                ssim: Some(0.75),
                cpsnr: Some(18.0),
                de00: Some(2.0),
                e: Some(0.5),
                r: None,
                sigma: Some(1.0),
            },
            MetricReport {
                id: "b".into(),
                method: "dcp".into(),
                ssim: Some(0.25),
                cpsnr: Some(22.0),
                de00: Some(4.0),
                e: None,
                r: None,
                sigma: Some(3.0),
            },
        ];
        let mean = mean_report(&rows, "dcp");
        assert_eq!(mean.id, "mean");
        assert_eq!(mean.ssim, Some(0.5));
        assert_eq!(mean.cpsnr, Some(20.0));
        assert_eq!(mean.de00, Some(3.0));
        assert_eq!(mean.e, Some(0.5));
        assert_eq!(mean.r, None);
        assert_eq!(mean.sigma, Some(2.0));
    }
}
