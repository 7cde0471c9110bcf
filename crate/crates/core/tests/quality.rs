mod common;

use proptest::prelude::*;

use sappi::image::synthetic::{gradient, noise_texture};
use sappi::image::{decode, encode, mssim, psnr, GrayImage, Image, SSIM_WINDOW};

/// Direct per-window SSIM with population statistics.
fn naive_mssim(x: &GrayImage, y: &GrayImage) -> f64 {
    let (c1, c2) = ((0.01f64 * 255.0).powi(2), (0.03f64 * 255.0).powi(2));
    let w = SSIM_WINDOW;
    let n = (w * w) as f64;
    let mut total = 0.0;
    let mut count = 0;
    for oy in 0..=x.height() - w {
        for ox in 0..=x.width() - w {
            let px = |img: &GrayImage, i: usize| f64::from(img.get(ox + i % w, oy + i / w));
            let mx = (0..w * w).map(|i| px(x, i)).sum::<f64>() / n;
            let my = (0..w * w).map(|i| px(y, i)).sum::<f64>() / n;
            let vx = (0..w * w).map(|i| (px(x, i) - mx).powi(2)).sum::<f64>() / n;
            let vy = (0..w * w).map(|i| (px(y, i) - my).powi(2)).sum::<f64>() / n;
            let cov = (0..w * w)
                .map(|i| (px(x, i) - mx) * (px(y, i) - my))
                .sum::<f64>()
                / n;
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    total / count as f64
}

fn image(w: usize, h: usize) -> impl Strategy<Value = GrayImage> {
    proptest::collection::vec(any::<u8>(), w * h)
        .prop_map(move |d| GrayImage::new(w, h, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integral_mssim_matches_naive(a in image(13, 10), b in image(13, 10)) {
        let fast = mssim(&a, &b).unwrap();
        prop_assert!((fast - naive_mssim(&a, &b)).abs() < 1e-9);
        prop_assert!((fast - mssim(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pnm_round_trip(a in image(7, 5)) {
        let img = Image::Gray(a);
        prop_assert_eq!(decode(&encode(&img)).unwrap(), img);
    }
}

#[test]
fn inverted_image_scores_low() {
    let img = common::gray_fixture("astronaut");
    let inverted = img.map(|v| 255 - v);
    assert!(mssim(&img, &inverted).unwrap() < 0.5);
    assert!((mssim(&img, &img).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn psnr_orders_noise_levels() {
    let base = gradient(64, 64);
    let mild = noise_texture(64, 64, 0.0, 2.0, 1);
    let strong = noise_texture(64, 64, 0.0, 20.0, 1);
    let add = |noise: &GrayImage| {
        GrayImage::new(
            64,
            64,
            base.data()
                .iter()
                .zip(noise.data())
                .map(|(&a, &b)| a.saturating_add(b))
                .collect(),
        )
        .unwrap()
    };
    assert!(psnr(&base, &add(&mild)).unwrap() > psnr(&base, &add(&strong)).unwrap());
}

#[test]
fn fixtures_decode() {
    let rgb = common::rgb_fixture("astronaut");
    assert_eq!((rgb.width(), rgb.height()), (128, 128));
    for name in ["astronaut", "coffee"] {
        let g = common::gray_fixture(name);
        assert_eq!((g.width(), g.height()), (128, 128));
    }
}
