//! Full-reference quality metrics: PSNR and mean SSIM.

use super::GrayImage;
use crate::error::{Error, Result};

/// Side of the square uniform SSIM window.
pub const SSIM_WINDOW: usize = 8;
const PEAK: f64 = 255.0;
const C1: f64 = (0.01 * PEAK) * (0.01 * PEAK);
const C2: f64 = (0.03 * PEAK) * (0.03 * PEAK);

fn same_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

pub fn mse(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    same_dims(reference, test)?;
    let sq: u64 = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum();
    Ok(sq as f64 / reference.data().len() as f64)
}

/// `10 log10(255^2 / MSE)` in dB; `f64::INFINITY` for identical images.
pub fn psnr(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    let m = mse(reference, test)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / m).log10())
}

/// Summed-area table with one row/column of zero padding.
struct Integral {
    stride: usize,
    sums: Vec<i64>,
}

impl Integral {
    fn build(w: usize, h: usize, value: impl Fn(usize) -> i64) -> Self {
        let stride = w + 1;
        let mut sums = vec![0i64; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0i64;
            for x in 0..w {
                row += value(y * w + x);
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Integral { stride, sums }
    }

    fn window(&self, x: usize, y: usize, size: usize) -> i64 {
        let s = self.stride;
        let (x1, y1) = (x + size, y + size);
        self.sums[y1 * s + x1] - self.sums[y * s + x1] - self.sums[y1 * s + x]
            + self.sums[y * s + x]
    }
}

/// Mean SSIM over all 8x8 uniform windows at stride 1, with population
/// statistics per window.
pub fn mssim(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    same_dims(reference, test)?;
    let (w, h) = (reference.width(), reference.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::DimensionMismatch(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {w}x{h}"
        )));
    }
    let (x, y) = (reference.data(), test.data());
    let sx = Integral::build(w, h, |i| i64::from(x[i]));
    let sy = Integral::build(w, h, |i| i64::from(y[i]));
    let sxx = Integral::build(w, h, |i| i64::from(x[i]) * i64::from(x[i]));
    let syy = Integral::build(w, h, |i| i64::from(y[i]) * i64::from(y[i]));
    let sxy = Integral::build(w, h, |i| i64::from(x[i]) * i64::from(y[i]));

    let n = (SSIM_WINDOW * SSIM_WINDOW) as i64;
    let nn = (n * n) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for wy in 0..=h - SSIM_WINDOW {
        for wx in 0..=w - SSIM_WINDOW {
            let (a, b) = (
                sx.window(wx, wy, SSIM_WINDOW),
                sy.window(wx, wy, SSIM_WINDOW),
            );
            // numerators of n^2 * variance / covariance, exact in integers
            let var_x = (n * sxx.window(wx, wy, SSIM_WINDOW) - a * a) as f64 / nn;
            let var_y = (n * syy.window(wx, wy, SSIM_WINDOW) - b * b) as f64 / nn;
            let cov = (n * sxy.window(wx, wy, SSIM_WINDOW) - a * b) as f64 / nn;
            let (mx, my) = (a as f64 / n as f64, b as f64 / n as f64);
            total += ((2.0 * mx * my + C1) * (2.0 * cov + C2))
                / ((mx * mx + my * my + C1) * (var_x + var_y + C2));
            count += 1;
        }
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filled(w: usize, h: usize, v: u8) -> GrayImage {
        GrayImage::new(w, h, vec![v; w * h]).unwrap()
    }

    #[test]
    fn psnr_examples() {
        let zero = filled(16, 16, 0);
        assert_eq!(psnr(&zero, &zero).unwrap(), f64::INFINITY);
        let one = filled(16, 16, 1);
        assert!((psnr(&zero, &one).unwrap() - 48.1308).abs() < 1e-4);

        let base = GrayImage::new(16, 16, (0..=255).collect()).unwrap();
        let shifted = base.map(|v| v.saturating_add(16));
        // 16 pixels saturate, so compare against a non-saturating base
        let low = base.map(|v| v / 2);
        let low_shifted = low.map(|v| v + 16);
        assert!((psnr(&low, &low_shifted).unwrap() - 24.04840).abs() < 1e-5);
        assert!(psnr(&base, &shifted).unwrap() > 24.04840);
    }

    #[test]
    fn mssim_identity_and_constants() {
        let c = filled(12, 9, 128);
        assert_eq!(mssim(&c, &c).unwrap(), 1.0);
        let img = GrayImage::new(16, 16, (0..=255).collect()).unwrap();
        assert!((mssim(&img, &img).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let a = filled(8, 8, 0);
        let b = filled(9, 8, 0);
        assert!(matches!(psnr(&a, &b), Err(Error::DimensionMismatch(_))));
        let small = filled(7, 8, 0);
        assert!(matches!(
            mssim(&small, &small),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
