//! Shared separable filters on single planes.
//!
//! All functions operate on row-major planes (`&[f64]` of length `w * h`)
//! and return plain vectors; callers wrap results back into rasters. Border
//! handling is documented per filter: Gaussian smoothing uses edge-including
//! mirror padding, box means normalize by the in-bounds count, and the
//! sliding extrema shrink their window at the borders.

/// Normalized 1-D Gaussian taps for offsets `-radius ..= radius`.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut taps: Vec<f64> = (-(radius as isize)..=radius as isize)
        .map(|i| (-(i * i) as f64 * inv).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Truncation radius used for Gaussian smoothing: `floor(3 * sigma)`, at
/// least 1.
pub fn gaussian_radius(sigma: f64) -> usize {
    ((3.0 * sigma) as usize).max(1)
}

/// Separable Gaussian blur with edge-including mirror padding
/// (`c b a | a b c | c b a`), truncated at [`gaussian_radius`].
pub fn gaussian_blur(src: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    assert_eq!(src.len(), w * h);
    let radius = gaussian_radius(sigma);
    let taps = gaussian_kernel(sigma, radius);
    let mut tmp = vec![0.0; w * h];
    convolve_rows(src, &mut tmp, w, h, &taps, radius);
    let mut out = vec![0.0; w * h];
    transpose_convolve(&tmp, &mut out, w, h, &taps, radius);
    out
}

/// Convolves each row of `src` with `taps`, mirror padding at the ends.
fn convolve_rows(src: &[f64], dst: &mut [f64], w: usize, h: usize, taps: &[f64], radius: usize) {
    let mut padded = vec![0.0; w + 2 * radius];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for (i, p) in padded.iter_mut().enumerate() {
            *p = row[mirror_index(i as isize - radius as isize, w)];
        }
        let drow = &mut dst[y * w..(y + 1) * w];
        for x in 0..w {
            let window = &padded[x..x + taps.len()];
            drow[x] = window.iter().zip(taps).map(|(v, t)| v * t).sum();
        }
    }
}

/// Column pass implemented as a row pass over the transposed plane.
fn transpose_convolve(
    src: &[f64],
    dst: &mut [f64],
    w: usize,
    h: usize,
    taps: &[f64],
    radius: usize,
) {
    let mut tsrc = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tsrc[x * h + y] = src[y * w + x];
        }
    }
    let mut tdst = vec![0.0; w * h];
    convolve_rows(&tsrc, &mut tdst, h, w, taps, radius);
    for y in 0..h {
        for x in 0..w {
            dst[y * w + x] = tdst[x * h + y];
        }
    }
}

/// Maps an out-of-range index into `0..n` by edge-including reflection.
#[inline]
fn mirror_index(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    i = i.rem_euclid(period);
    if i >= n {
        i = period - 1 - i;
    }
    i as usize
}

/// Box mean over the `(2r+1)^2` window, normalized by the in-bounds count.
pub fn box_mean(src: &[f64], w: usize, h: usize, radius: usize) -> Vec<f64> {
    assert_eq!(src.len(), w * h);
    let sums = box_sum_with_counts(src, w, h, radius);
    sums.into_iter().map(|(s, n)| s / n).collect()
}

/// Per-pixel window sums and in-bounds counts via running column sums.
fn box_sum_with_counts(src: &[f64], w: usize, h: usize, radius: usize) -> Vec<(f64, f64)> {
    let r = radius;
    // Row pass: horizontal prefix sums per row.
    let mut hsum = vec![0.0; w * h];
    let mut hcnt = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let mut prefix = vec![0.0; w + 1];
        for x in 0..w {
            prefix[x + 1] = prefix[x] + row[x];
        }
        for x in 0..w {
            let lo = x.saturating_sub(r);
            let hi = (x + r + 1).min(w);
            hsum[y * w + x] = prefix[hi] - prefix[lo];
            hcnt[y * w + x] = (hi - lo) as f64;
        }
    }
    // Column pass: vertical prefix sums per column.
    let mut out = vec![(0.0, 0.0); w * h];
    let mut col_s = vec![0.0; h + 1];
    let mut col_c = vec![0.0; h + 1];
    for x in 0..w {
        for y in 0..h {
            col_s[y + 1] = col_s[y] + hsum[y * w + x];
            col_c[y + 1] = col_c[y] + hcnt[y * w + x];
        }
        for y in 0..h {
            let lo = y.saturating_sub(r);
            let hi = (y + r + 1).min(h);
            out[y * w + x] = (col_s[hi] - col_s[lo], col_c[hi] - col_c[lo]);
        }
    }
    out
}

/// Sliding minimum over the `(2r+1)^2` window (window clipped at borders).
pub fn sliding_min(src: &[f64], w: usize, h: usize, radius: usize) -> Vec<f64> {
    sliding_extremum(src, w, h, radius, |a, b| a <= b)
}

/// Sliding maximum over the `(2r+1)^2` window (window clipped at borders).
pub fn sliding_max(src: &[f64], w: usize, h: usize, radius: usize) -> Vec<f64> {
    sliding_extremum(src, w, h, radius, |a, b| a >= b)
}

/// Two-pass separable sliding extremum using a monotone deque per line.
///
/// `keep(front, new)` returns true when `front` still dominates `new`.
fn sliding_extremum(
    src: &[f64],
    w: usize,
    h: usize,
    radius: usize,
    keep: fn(f64, f64) -> bool,
) -> Vec<f64> {
    assert_eq!(src.len(), w * h);
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        line_extremum(&src[y * w..(y + 1) * w], &mut tmp[y * w..(y + 1) * w], radius, keep);
    }
    let mut out = vec![0.0; w * h];
    let mut col_in = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col_in[y] = tmp[y * w + x];
        }
        line_extremum(&col_in, &mut col_out, radius, keep);
        for y in 0..h {
            out[y * w + x] = col_out[y];
        }
    }
    out
}

/// 1-D sliding extremum with a monotone index deque.
fn line_extremum(src: &[f64], dst: &mut [f64], radius: usize, keep: fn(f64, f64) -> bool) {
    let n = src.len();
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut emit = |deque: &mut std::collections::VecDeque<usize>, center: usize| {
        while let Some(&front) = deque.front() {
            if front + radius < center {
                deque.pop_front();
            } else {
                break;
            }
        }
        dst[center] = src[*deque.front().unwrap()];
    };
    for i in 0..n {
        while let Some(&back) = deque.back() {
            if keep(src[back], src[i]) {
                break;
            }
            deque.pop_back();
        }
        deque.push_back(i);
        if i >= radius {
            emit(&mut deque, i - radius);
        }
    }
    for center in n.saturating_sub(radius)..n {
        emit(&mut deque, center);
    }
}

/// Edge-preserving guided filter of plane `src` steered by plane `guide`.
///
/// Standard two-pass box formulation: local linear coefficients
/// `a = cov(guide, src) / (var(guide) + reg)` and `b = mean(src) - a *
/// mean(guide)` are averaged over the window before reconstruction. With a
/// constant guide `a` vanishes and the result degenerates to a double box
/// smoothing of `src`.
pub fn guided_filter(
    guide: &[f64],
    src: &[f64],
    w: usize,
    h: usize,
    radius: usize,
    reg: f64,
) -> Vec<f64> {
    assert_eq!(guide.len(), w * h);
    assert_eq!(src.len(), w * h);
    assert!(reg > 0.0, "regularization must be positive");
    let n = w * h;
    let mean_i = box_mean(guide, w, h, radius);
    let mean_p = box_mean(src, w, h, radius);
    let ii: Vec<f64> = (0..n).map(|k| guide[k] * guide[k]).collect();
    let ip: Vec<f64> = (0..n).map(|k| guide[k] * src[k]).collect();
    let corr_ii = box_mean(&ii, w, h, radius);
    let corr_ip = box_mean(&ip, w, h, radius);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    for k in 0..n {
        let var = corr_ii[k] - mean_i[k] * mean_i[k];
        let cov = corr_ip[k] - mean_i[k] * mean_p[k];
        a[k] = cov / (var + reg);
        b[k] = mean_p[k] - a[k] * mean_i[k];
    }
    let mean_a = box_mean(&a, w, h, radius);
    let mean_b = box_mean(&b, w, h, radius);
    (0..n).map(|k| mean_a[k] * guide[k] + mean_b[k]).collect()
}
