//! Property tests for the algebraic guarantees of the enhancement
//! operators: brightness monotonicity of the Retinex family, the dual
//! never-brighten behavior under inversion, the max-filter form of the
//! transmission on inverted monochrome images, and the exactness of the
//! involution and haze-model round trips.

use proptest::prelude::*;

use unveil_core::dehaze::{
    estimate_transmission, invert_haze_model, koschmieder_forward, AtmosphericLight, PatchSpec,
    TransmissionMap,
};
use unveil_core::duality::{dehret, max_filter};
use unveil_core::metrics::{de00, ssim};
use unveil_core::raster::{clamp_floor, hist_equalize, invert, percentile_rescale};
use unveil_core::retinex::{
    kbr, lrsr, path_retinex, rsr, KbrConfig, LrsrConfig, PathConfig, ScalingFn, SprayConfig,
};
use unveil_core::{EpsilonPolicy, ImageF};

fn image_from_seed(seed: u64, w: usize, h: usize, c: usize) -> ImageF {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    ImageF::from_fn(w, h, c, |_, _, _| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    })
    .unwrap()
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (6usize..24, 6usize..24)
}

fn assert_never_darkens(out: &ImageF, input: &ImageF) {
    let floored = clamp_floor(input, EpsilonPolicy::default());
    for (o, i) in out.data().iter().zip(floored.data()) {
        assert!(o >= i, "output {o} below floored input {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_retinex_backends_never_darken(
        (w, h) in dims(),
        seed in 0u64..1 << 40,
        channels in prop_oneof![Just(1usize), Just(3usize)],
    ) {
        let img = image_from_seed(seed, w, h, channels);
        let path_cfg = PathConfig::new(3, 20, ScalingFn::Identity, seed).unwrap();
        let spray_cfg = SprayConfig::new(2, 8, None, seed).unwrap();
        let lrsr_cfg = LrsrConfig::new(SprayConfig::new(1, 8, None, seed).unwrap(), 3, 3).unwrap();
        let kbr_cfg = KbrConfig::new(1.2, ScalingFn::Log).unwrap();
        for out in [
            path_retinex(&img, &path_cfg),
            rsr(&img, &spray_cfg),
            lrsr(&img, &lrsr_cfg),
            kbr(&img, &kbr_cfg),
        ] {
            assert_never_darkens(&out, &img);
        }
    }

    #[test]
    fn dehret_never_brightens(
        (w, h) in dims(),
        seed in 0u64..1 << 40,
    ) {
        let img = image_from_seed(seed, w, h, 3);
        let spray_cfg = SprayConfig::new(2, 8, None, seed).unwrap();
        let out = dehret(&img, |v| rsr(v, &spray_cfg));
        let ceiling = invert(&clamp_floor(&invert(&img), EpsilonPolicy::default()));
        for (o, i) in out.data().iter().zip(ceiling.data()) {
            prop_assert!(o <= i, "dehret {o} above ceiling {i}");
        }
    }

    #[test]
    fn transmission_on_inverted_mono_is_the_max_filter(
        (w, h) in dims(),
        seed in 0u64..1 << 40,
        radius in 0usize..5,
    ) {
        // Values above the estimator's lower clamp keep it inactive.
        let base = image_from_seed(seed, w, h, 1);
        let img = base.map(|v| 0.1 + 0.9 * v);
        let patch = PatchSpec::new(radius);
        let t = estimate_transmission(&invert(&img), AtmosphericLight::white(), patch, 1.0);
        let m = max_filter(&img, patch);
        prop_assert_eq!(t.image().data(), m.data());
    }

    #[test]
    fn inversion_is_an_involution(
        (w, h) in dims(),
        seed in 0u64..1 << 40,
        channels in prop_oneof![Just(1usize), Just(3usize)],
    ) {
        let img = image_from_seed(seed, w, h, channels);
        let back = invert(&invert(&img));
        prop_assert_eq!(back.data(), img.data());
    }

    #[test]
    fn haze_model_round_trips_above_the_floor(
        (w, h) in dims(),
        seed in 0u64..1 << 40,
    ) {
        let j = image_from_seed(seed, w, h, 3);
        let t_raw = image_from_seed(seed ^ 0xabcdef, w, h, 1);
        let t = TransmissionMap::from_values(
            w, h,
            t_raw.data().iter().map(|v| 0.1 + 0.9 * v).collect(),
        ).unwrap();
        let a = AtmosphericLight::new([0.95, 0.9, 1.0]).unwrap();
        let hazy = koschmieder_forward(&j, &t, a);
        let back = invert_haze_model(&hazy, &t, a);
        for (b, v) in back.data().iter().zip(j.data()) {
            prop_assert!((b - v).abs() < 1e-6);
        }
    }

    #[test]
    fn global_stretches_preserve_order(
        (w, h) in dims(),
        seed in 0u64..1 << 40,
    ) {
        let img = image_from_seed(seed, w, h, 1);
        for out in [
            percentile_rescale(&img, 0.05, 0.05).unwrap(),
            hist_equalize(&img, 256).unwrap(),
        ] {
            let src = img.plane(0);
            let dst = out.plane(0);
            for i in 0..src.len() {
                for j in 0..src.len() {
                    if src[i] < src[j] {
                        prop_assert!(dst[i] <= dst[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn metric_invariants_hold(
        seed in 0u64..1 << 40,
    ) {
        let a = image_from_seed(seed, 16, 16, 3);
        let b = image_from_seed(seed ^ 0x5555, 16, 16, 3);
        let s = ssim(&a, &b).unwrap();
        prop_assert!((-1.0..=1.0).contains(&s));
        prop_assert_eq!(ssim(&a, &a).unwrap(), 1.0);
        let d = de00(&a, &b).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!((d - de00(&b, &a).unwrap()).abs() < 1e-9);
    }
}
