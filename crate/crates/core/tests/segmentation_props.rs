//! Threshold segmentation properties on random rasters.

use abdiv_core::segmentation::{
    segment, threshold_sweep, NeighborMode, Normalization, RgbImage, SegmentationConfig,
};
use abdiv_core::DivergenceSpec;
use proptest::prelude::*;

fn image(max: u8) -> impl Strategy<Value = RgbImage> {
    (2usize..12, 2usize..12).prop_flat_map(move |(w, h)| {
        prop::collection::vec(prop::array::uniform3(1..=max), w * h)
            .prop_map(move |px| RgbImage::new(w, h, px).unwrap())
    })
}

fn spec() -> impl Strategy<Value = DivergenceSpec> {
    prop_oneof![
        Just(DivergenceSpec::abs(1.0, 1.0).unwrap()),
        Just(DivergenceSpec::abs(0.5, 0.5).unwrap()),
        Just(DivergenceSpec::abs(1.0, 0.0).unwrap()),
        Just(DivergenceSpec::dt(-0.5).unwrap()),
        Just(DivergenceSpec::dt(-1.0).unwrap()),
    ]
}

fn mode() -> impl Strategy<Value = NeighborMode> {
    prop_oneof![Just(NeighborMode::Literal), Just(NeighborMode::Current)]
}

fn foreground(img: &RgbImage) -> Vec<bool> {
    img.pixels().iter().map(|p| *p == [255; 3]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn foreground_grows_with_k(img in image(255), spec in spec(), mode in mode(), k1 in 1e-4..1e4f64, k2 in 1e-4..1e4f64) {
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let mut cfg = SegmentationConfig::new(spec, lo, Normalization::Unit).unwrap();
        cfg.neighbor_mode = mode;
        let outs = threshold_sweep(&img, &[lo, hi], &cfg).unwrap();
        prop_assert_eq!(&outs[0], &segment(&img, &cfg).unwrap());
        for (a, b) in foreground(&outs[0]).iter().zip(foreground(&outs[1])) {
            prop_assert!(!a || b);
        }
        for (idx, p) in outs[1].pixels().iter().enumerate() {
            prop_assert!(*p == [255; 3] || *p == [0; 3]);
            if idx < img.width() || idx % img.width() == 0 {
                prop_assert_eq!(*p, [0; 3]);
            }
        }
    }

    #[test]
    fn channel_permutation_is_invisible(img in image(255), spec in spec(), mode in mode(), k in 1e-3..10.0f64, perm in Just([2usize, 0, 1])) {
        let mut cfg = SegmentationConfig::new(spec, k, Normalization::Unit).unwrap();
        cfg.neighbor_mode = mode;
        let permuted = RgbImage::new(
            img.width(),
            img.height(),
            img.pixels().iter().map(|p| [p[perm[0]], p[perm[1]], p[perm[2]]]).collect(),
        ).unwrap();
        prop_assert_eq!(segment(&img, &cfg).unwrap(), segment(&permuted, &cfg).unwrap());
    }

    #[test]
    fn raw_scale_covariance(img in image(127), mode in mode(), k in 1.0..20000.0f64) {
        // c = 2 with integer exponents keeps every divergence exact
        let spec = DivergenceSpec::abs(1.0, 1.0).unwrap();
        let gamma = spec.homogeneity_degree();
        let mut cfg = SegmentationConfig::new(spec, k, Normalization::Raw).unwrap();
        cfg.neighbor_mode = mode;
        let doubled = RgbImage::new(
            img.width(),
            img.height(),
            img.pixels().iter().map(|p| p.map(|v| v * 2)).collect(),
        ).unwrap();
        let scaled = SegmentationConfig { k: k * 2f64.powf(gamma), ..cfg };
        prop_assert_eq!(segment(&img, &cfg).unwrap(), segment(&doubled, &scaled).unwrap());
    }
}
