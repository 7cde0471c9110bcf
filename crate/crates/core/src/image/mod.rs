//! Image-processing applications on approximate adders, and their quality
//! scoring.
//!
//! Only additions go through the approximate adder. Halving, division by
//! three and the kernel normalisation shift are exact integer operations.
//! Results above 255 are clamped.

mod pnm;
mod quality;
pub mod synthetic;

use rayon::prelude::*;
use serde::Serialize;

pub use pnm::{decode, encode, load_image, save_image};
pub use quality::{mse, mssim, psnr, SSIM_WINDOW};

use crate::adders::AdderKind;
use crate::cost::{application_gains, GainReport};
use crate::error::{Error, Result};
use crate::rca::{shift_add_multiply, MulConfig, RcaConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} gray image needs {} bytes, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Pixel at `(x, y)` with coordinates clamped into the image.
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    pub fn map(&self, f: impl Fn(u8) -> u8) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != 3 * width * height {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} rgb image needs {} bytes, got {}",
                3 * width * height,
                data.len()
            )));
        }
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl Image {
    pub fn into_gray(self) -> Result<GrayImage> {
        match self {
            Image::Gray(g) => Ok(g),
            Image::Rgb(_) => Err(Error::Format("expected a PGM (P5) image, got PPM".into())),
        }
    }

    pub fn into_rgb(self) -> Result<RgbImage> {
        match self {
            Image::Rgb(c) => Ok(c),
            Image::Gray(_) => Err(Error::Format("expected a PPM (P6) image, got PGM".into())),
        }
    }
}

/// Output of one application together with the number of approximate
/// additions it executed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppOutput {
    pub image: GrayImage,
    pub additions: u64,
}

/// Runs `pixel` over every output position row by row in parallel; each
/// call returns the pixel value and the additions it used.
fn per_pixel(
    width: usize,
    height: usize,
    pixel: impl Fn(usize, usize) -> Result<(u8, u64)> + Sync,
) -> Result<AppOutput> {
    let rows = (0..height)
        .into_par_iter()
        .map(|y| {
            let mut row = Vec::with_capacity(width);
            let mut adds = 0u64;
            for x in 0..width {
                let (v, n) = pixel(x, y)?;
                row.push(v);
                adds += n;
            }
            Ok((row, adds))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = Vec::with_capacity(width * height);
    let mut additions = 0;
    for (row, adds) in rows {
        data.extend(row);
        additions += adds;
    }
    Ok(AppOutput {
        image: GrayImage::new(width, height, data)?,
        additions,
    })
}

fn clamp_u8(v: u64) -> u8 {
    v.min(255) as u8
}

/// Pixel-wise `(a + b) / 2`, keeping the adder's carry out before halving.
pub fn image_add(cfg: &RcaConfig, a: &GrayImage, b: &GrayImage) -> Result<AppOutput> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    per_pixel(a.width, a.height, |x, y| {
        let s = cfg.add(u64::from(a.get(x, y)), u64::from(b.get(x, y)), false)?;
        Ok((clamp_u8(s / 2), 1))
    })
}

/// `((R + G) + B) / 3`; the second addition runs on an adder one bit
/// wider than `cfg` so the 9-bit partial sum fits.
pub fn rgb_to_gray(cfg: &RcaConfig, img: &RgbImage) -> Result<AppOutput> {
    let wide = cfg.with_width(cfg.width() + 1)?;
    per_pixel(img.width, img.height, |x, y| {
        let [r, g, b] = img.pixel(x, y);
        let rg = cfg.add(u64::from(r), u64::from(g), false)?;
        let rgb = wide.add(rg, u64::from(b), false)?;
        Ok((clamp_u8(rgb / 3), 2))
    })
}

/// Square integer convolution kernel whose weights sum to `2^shift`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Kernel {
    size: usize,
    weights: Vec<u64>,
    shift: u32,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<u64>, shift: u32) -> Result<Self> {
        if size.is_multiple_of(2) || weights.len() != size * size {
            return Err(Error::Config(format!(
                "kernel must be odd-sized and square, got size {size} with {} weights",
                weights.len()
            )));
        }
        Ok(Kernel {
            size,
            weights,
            shift,
        })
    }

    /// `[[1,2,1],[2,4,2],[1,2,1]] / 16`.
    pub fn binomial3() -> Self {
        Kernel {
            size: 3,
            weights: vec![1, 2, 1, 2, 4, 2, 1, 2, 1],
            shift: 4,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }
}

/// Multiplier configuration for blurring 8-bit pixels with `kernel`.
pub fn blur_mul_config(rca: RcaConfig, kernel: &Kernel) -> Result<MulConfig> {
    let weight_bits = 64 - kernel.max_weight().leading_zeros();
    MulConfig::new(rca, weight_bits.max(1), 8)
}

/// Convolution with edge replication. Each tap is `weight * pixel` on the
/// shift-and-add multiplier (pixel bits drive the additions); the taps are
/// then summed on the same adder and shifted down by the kernel's norm.
pub fn gaussian_blur(cfg: &MulConfig, kernel: &Kernel, img: &GrayImage) -> Result<AppOutput> {
    if kernel.max_weight() >> cfg.multiplicand_bits != 0 || cfg.multiplier_bits < 8 {
        return Err(Error::Config(format!(
            "multiplier {}x{} bits cannot hold kernel weights up to {} times 8-bit pixels",
            cfg.multiplicand_bits,
            cfg.multiplier_bits,
            kernel.max_weight()
        )));
    }
    let r = (kernel.size / 2) as isize;
    per_pixel(img.width, img.height, |x, y| {
        let mut acc: Option<u64> = None;
        let mut adds = 0u64;
        for (i, &w) in kernel.weights.iter().enumerate() {
            let dy = (i / kernel.size) as isize - r;
            let dx = (i % kernel.size) as isize - r;
            let p = img.get_clamped(x as isize + dx, y as isize + dy);
            let prod = shift_add_multiply(cfg, w, u64::from(p))?;
            adds += prod.additions;
            acc = Some(match acc {
                None => prod.product,
                Some(sum) => {
                    adds += 1;
                    cfg.rca.add(sum, prod.product, false)?
                }
            });
        }
        Ok((clamp_u8(acc.unwrap_or(0) >> kernel.shift), adds))
    })
}

/// Quality and cost of one application run against its exact counterpart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityReport {
    pub application: String,
    pub kind: AdderKind,
    pub n: u32,
    pub k: u32,
    /// `null` in JSON when the images are identical (infinite PSNR).
    pub psnr_db: f64,
    pub mssim: f64,
    pub additions: u64,
    pub energy_saved_nj: f64,
    pub steps_saved: i64,
    pub mssim_window: String,
    pub overflow: &'static str,
    #[serde(skip)]
    pub gains: GainReport,
}

impl QualityReport {
    pub fn new(
        application: &str,
        cfg: &RcaConfig,
        reference: &GrayImage,
        output: &AppOutput,
    ) -> Result<Self> {
        let gains = application_gains(application, output.additions, cfg)?;
        Ok(QualityReport {
            application: application.to_string(),
            kind: cfg.kind(),
            n: cfg.width(),
            k: cfg.approx_degree(),
            psnr_db: psnr(reference, &output.image)?,
            mssim: mssim(reference, &output.image)?,
            additions: output.additions,
            energy_saved_nj: gains.energy_saved_nj,
            steps_saved: gains.steps_saved,
            mssim_window: format!("{SSIM_WINDOW}x{SSIM_WINDOW} uniform, stride 1"),
            overflow: "clamp",
            gains,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, data: Vec<u8>) -> GrayImage {
        GrayImage::new(w, h, data).unwrap()
    }

    fn exact8() -> RcaConfig {
        RcaConfig::exact(8).unwrap()
    }

    fn blur_cfg(k: u32, kind: AdderKind) -> MulConfig {
        blur_mul_config(RcaConfig::new(20, k, kind).unwrap(), &Kernel::binomial3()).unwrap()
    }

    #[test]
    fn image_add_examples() {
        let a = gray(1, 1, vec![100]);
        let b = gray(1, 1, vec![50]);
        assert_eq!(image_add(&exact8(), &a, &b).unwrap().image.data(), &[75]);

        let z = gray(1, 1, vec![0]);
        let s1 = RcaConfig::new(8, 4, AdderKind::Sappi1).unwrap();
        assert_eq!(image_add(&s1, &z, &z).unwrap().image.data(), &[7]);

        let img = synthetic::gradient(17, 9);
        let out = image_add(&exact8(), &img, &img).unwrap();
        assert_eq!(out.image, img);
        assert_eq!(out.additions, 17 * 9);

        assert!(matches!(
            image_add(&exact8(), &a, &gray(2, 1, vec![0, 0])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn grayscale_examples() {
        let px = RgbImage::new(1, 1, vec![30, 60, 90]).unwrap();
        assert_eq!(rgb_to_gray(&exact8(), &px).unwrap().image.data(), &[60]);
        for g in [0u8, 1, 127, 254, 255] {
            let px = RgbImage::new(1, 1, vec![g; 3]).unwrap();
            assert_eq!(rgb_to_gray(&exact8(), &px).unwrap().image.data(), &[g]);
        }
        // 0+0 -> 15 on 8 bits, then 15+0 -> 15 on 9 bits, 15/3 = 5
        let black = RgbImage::new(1, 1, vec![0; 3]).unwrap();
        let s2 = RcaConfig::new(8, 4, AdderKind::Sappi2).unwrap();
        assert_eq!(rgb_to_gray(&s2, &black).unwrap().image.data(), &[5]);
    }

    #[test]
    fn blur_examples() {
        let exact = blur_cfg(0, AdderKind::Exact);
        let flat = gray(6, 5, vec![93; 30]);
        assert_eq!(
            gaussian_blur(&exact, &Kernel::binomial3(), &flat)
                .unwrap()
                .image,
            flat
        );

        let mut data = vec![0u8; 25];
        data[12] = 16;
        let impulse = gray(5, 5, data);
        let out = gaussian_blur(&exact, &Kernel::binomial3(), &impulse)
            .unwrap()
            .image;
        #[rustfmt::skip]
        let expected = vec![
            0, 0, 0, 0, 0,
            0, 1, 2, 1, 0,
            0, 2, 4, 2, 0,
            0, 1, 2, 1, 0,
            0, 0, 0, 0, 0,
        ];
        assert_eq!(out.data(), &expected[..]);
    }

    #[test]
    fn blur_rejects_small_multiplier() {
        let rca = RcaConfig::exact(20).unwrap();
        let narrow = MulConfig::new(rca, 2, 8).unwrap();
        assert!(gaussian_blur(&narrow, &Kernel::binomial3(), &synthetic::gradient(8, 8)).is_err());
    }

    #[test]
    fn kernel_validation() {
        assert!(Kernel::new(2, vec![1; 4], 2).is_err());
        assert!(Kernel::new(3, vec![1; 8], 3).is_err());
        assert_eq!(Kernel::binomial3().weights().iter().sum::<u64>(), 16);
    }

    #[test]
    fn report_serializes_infinite_psnr_as_null() {
        let img = synthetic::gradient(8, 8);
        let out = image_add(&exact8(), &img, &img).unwrap();
        let report = QualityReport::new("image-add", &exact8(), &img, &out).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["psnr_db"].is_null());
        assert_eq!(json["mssim"], 1.0);
        assert_eq!(json["additions"], 64);
        assert_eq!(json["steps_saved"], 0);
    }
}
