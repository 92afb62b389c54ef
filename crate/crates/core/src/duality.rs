//! Enhancement through intensity inversion: DehRet and RetDeh.
//!
//! A hazy image becomes an under-exposed one when its intensities are
//! inverted, and vice versa. [`dehret`] therefore dehazes with any Retinex
//! backend by running it on the inverted image and inverting back, while
//! [`retdeh`] corrects illumination with any dehazer the same way. Both
//! compose `out = 1 - backend(1 - img)`; the inversion is exact on the
//! sample grid, so all algebraic identities of the composition hold
//! bit-for-bit.

use crate::dehaze::PatchSpec;
use crate::filter::sliding_max;
use crate::raster::{invert, ImageF};

/// Dehazes `img` by running the Retinex backend on the inverted image.
///
/// `out = 1 - retinex(1 - img)`. Any backend that never darkens its input
/// yields an output that never brightens the original, which is exactly the
/// behavior expected of a dehazer.
pub fn dehret<F>(img: &ImageF, retinex: F) -> ImageF
where
    F: Fn(&ImageF) -> ImageF,
{
    invert(&retinex(&invert(img)))
}

/// Corrects under-exposure by running the dehazing backend on the inverted
/// image.
///
/// `out = 1 - dehazer(1 - img)`. A dehazer that never brightens its input
/// yields an output that never darkens the original.
pub fn retdeh<F>(img: &ImageF, dehazer: F) -> ImageF
where
    F: Fn(&ImageF) -> ImageF,
{
    invert(&dehazer(&invert(img)))
}

/// Sliding-window maximum over the patch neighborhood of a single-channel
/// image.
///
/// For a monochrome image this is the transmission the dark-channel
/// estimator produces on the inverted image, which is the bridge between
/// the two families of methods.
pub fn max_filter(img: &ImageF, patch: PatchSpec) -> ImageF {
    assert_eq!(
        img.channels(),
        1,
        "max_filter expects a single-channel image"
    );
    let out = sliding_max(img.plane(0), img.width(), img.height(), patch.radius());
    ImageF::from_vec(img.width(), img.height(), 1, out).expect("filter output stays in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dehaze::{
        dcp_dehaze, estimate_transmission, invert_haze_model, koschmieder_forward,
        AtmosphericLight, TransmissionMap,
    };
    use crate::retinex::{kbr, path_retinex, rsr, KbrConfig, PathConfig, ScalingFn, SprayConfig};
    use crate::rng::Stream;

    fn random_image(seed: u64, w: usize, h: usize, c: usize) -> ImageF {
        let mut s = Stream::new(seed, 0, 0);
        ImageF::from_fn(w, h, c, |_, _, _| s.unit_open()).unwrap()
    }

    fn max_abs_diff(a: &ImageF, b: &ImageF) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Three vertical transmission bands, a piecewise-constant depth layout.
    fn banded_transmission(w: usize, h: usize) -> TransmissionMap {
        let levels = [0.3, 0.6, 0.9];
        TransmissionMap::from_values(
            w,
            h,
            (0..w * h)
                .map(|k| levels[(k % w) * levels.len() / w])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn dehret_with_identity_backend_is_identity() {
        let img = random_image(61, 17, 13, 3);
        let out = dehret(&img, |v| v.clone());
        assert_eq!(out.data(), img.data());
    }

    #[test]
    fn retdeh_with_identity_backend_is_identity() {
        let img = random_image(62, 17, 13, 3);
        let out = retdeh(&img, |v| v.clone());
        assert_eq!(out.data(), img.data());
    }

    #[test]
    fn dehret_of_constant_image_is_black() {
        let img = ImageF::new(16, 16, 3, 0.42).unwrap();
        let cfg = PathConfig::new(8, 40, ScalingFn::Identity, 5).unwrap();
        let out = dehret(&img, |v| path_retinex(v, &cfg));
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dehret_with_ideal_backend_recovers_the_scene() {
        let (w, h) = (30, 20);
        let j = random_image(63, w, h, 3);
        let t = banded_transmission(w, h);
        let hazy = koschmieder_forward(&j, &t, AtmosphericLight::white());

        let t_plane = t.image().clone();
        let ideal = move |v: &ImageF| {
            ImageF::from_fn(v.width(), v.height(), v.channels(), |c, x, y| {
                v.get(c, x, y) / t_plane.get(0, x, y)
            })
            .unwrap()
        };
        let out = dehret(&hazy, ideal);
        assert!(max_abs_diff(&out, &j) < 1e-9);
    }

    #[test]
    fn retdeh_with_ideal_backend_removes_known_illumination() {
        let (w, h) = (28, 21);
        let reflect = random_image(64, w, h, 3);
        let illum = TransmissionMap::from_values(
            w,
            h,
            (0..w * h)
                .map(|k| {
                    let x = (k % w) as f64 / (w - 1) as f64;
                    0.2 + 0.8 * x
                })
                .collect(),
        )
        .unwrap();
        let shaded = ImageF::from_fn(w, h, 3, |c, x, y| {
            reflect.get(c, x, y) * illum.value(x, y)
        })
        .unwrap();

        let t = illum.clone();
        let out = retdeh(&shaded, move |v| {
            invert_haze_model(v, &t, AtmosphericLight::white())
        });
        assert!(max_abs_diff(&out, &reflect) < 1e-9);
    }

    #[test]
    fn retdeh_with_dcp_never_darkens_a_shadowed_ramp() {
        let (w, h) = (32, 16);
        let img = ImageF::from_fn(w, h, 3, |_, x, _| {
            if x < 5 {
                0.0
            } else {
                0.2 + 0.6 * (x - 5) as f64 / (w - 6) as f64
            }
        })
        .unwrap();
        let out = retdeh(&img, |v| dcp_dehaze(v, PatchSpec::new(2), 1.0, false));
        for (o, i) in out.data().iter().zip(img.data()) {
            assert!(*o >= i - 1e-6, "retdeh {o} below input {i}");
        }
    }

    #[test]
    fn max_filter_examples() {
        let constant = ImageF::new(9, 5, 1, 0.37).unwrap();
        let out = max_filter(&constant, PatchSpec::new(2));
        assert_eq!(out.data(), constant.data());

        let img = random_image(65, 9, 5, 1);
        let out = max_filter(&img, PatchSpec::new(0));
        assert_eq!(out.data(), img.data());
    }

    #[test]
    fn max_filter_matches_brute_force() {
        let img = random_image(66, 16, 16, 1);
        let out = max_filter(&img, PatchSpec::new(2));
        for y in 0..16isize {
            for x in 0..16isize {
                let mut m = f64::NEG_INFINITY;
                for dy in -2..=2isize {
                    for dx in -2..=2isize {
                        let (sx, sy) = (x + dx, y + dy);
                        if (0..16).contains(&sx) && (0..16).contains(&sy) {
                            m = m.max(img.get(0, sx as usize, sy as usize));
                        }
                    }
                }
                assert_eq!(out.get(0, x as usize, y as usize), m);
            }
        }
    }

    #[test]
    fn transmission_on_inverted_image_equals_max_filter() {
        for (seed, radius) in [(67u64, 1usize), (68, 3), (69, 7)] {
            let img = ImageF::from_fn(20, 14, 1, {
                let mut s = Stream::new(seed, 0, 0);
                // Values above the transmission floor keep the estimator's
                // lower clamp inactive.
                move |_, _, _| 0.1 + 0.9 * s.unit_open()
            })
            .unwrap();
            let patch = PatchSpec::new(radius);
            let t = estimate_transmission(&invert(&img), AtmosphericLight::white(), patch, 1.0);
            let m = max_filter(&img, patch);
            assert_eq!(t.image().data(), m.data());
        }
    }

    #[test]
    fn duality_compositions_agree_bitwise() {
        let (w, h) = (22, 18);
        let img = random_image(70, w, h, 3);
        let t = banded_transmission(w, h);

        let t_ret = t.image().clone();
        let retinex = move |v: &ImageF| {
            ImageF::from_fn(v.width(), v.height(), v.channels(), |c, x, y| {
                v.get(c, x, y) / t_ret.get(0, x, y)
            })
            .unwrap()
        };
        let t_deh = t.clone();
        let dehazer =
            move |v: &ImageF| invert_haze_model(v, &t_deh, AtmosphericLight::white());

        let lhs = retdeh(&invert(&img), dehazer);
        let rhs = invert(&dehret(&img, retinex));
        // The two routes round once each on the sample grid, so they can
        // disagree by a single grid step at most.
        assert!(max_abs_diff(&lhs, &rhs) <= 2.0 / 9_007_199_254_740_992.0);
    }

    #[test]
    fn dehret_is_deterministic_per_seed() {
        let img = random_image(71, 24, 24, 3);
        let cfg = SprayConfig::new(4, 16, None, 9).unwrap();
        let a = dehret(&img, |v| rsr(v, &cfg));
        let b = dehret(&img, |v| rsr(v, &cfg));
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn dehret_never_brightens_with_monotone_backends() {
        let img = random_image(72, 24, 24, 3);
        let spray = SprayConfig::new(4, 16, None, 3).unwrap();
        let kbr_cfg = KbrConfig::new(2.0, ScalingFn::Identity).unwrap();
        for out in [
            dehret(&img, |v| rsr(v, &spray)),
            dehret(&img, |v| kbr(v, &kbr_cfg)),
        ] {
            for (o, i) in out.data().iter().zip(img.data()) {
                assert!(*o <= i + 1e-6, "dehret {o} above input {i}");
            }
        }
    }
}
