//! Deterministic synthetic test images.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{GrayImage, RgbImage};

/// Diagonal ramp from 0 at the top-left to 255 at the bottom-right.
pub fn gradient(width: usize, height: usize) -> GrayImage {
    let span = (width + height).saturating_sub(2).max(1);
    let data = (0..height)
        .flat_map(|y| (0..width).map(move |x| ((x + y) * 255 / span) as u8))
        .collect();
    GrayImage::new(width, height, data).expect("sized by construction")
}

/// Alternating `dark`/`light` squares of side `cell`.
pub fn checkerboard(width: usize, height: usize, cell: usize, dark: u8, light: u8) -> GrayImage {
    let cell = cell.max(1);
    let data = (0..height)
        .flat_map(|y| {
            (0..width).map(move |x| {
                if (x / cell + y / cell).is_multiple_of(2) {
                    dark
                } else {
                    light
                }
            })
        })
        .collect();
    GrayImage::new(width, height, data).expect("sized by construction")
}

/// Gaussian noise around `mean` with standard deviation `sigma`, clamped to
/// `[0, 255]`, then smoothed with a 3x3 box so neighbouring pixels correlate.
pub fn noise_texture(width: usize, height: usize, mean: f64, sigma: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(mean, sigma).expect("sigma must be finite and non-negative");
    let raw: Vec<f64> = (0..width * height)
        .map(|_| normal.sample(&mut rng).clamp(0.0, 255.0))
        .collect();
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height as isize {
        for x in 0..width as isize {
            let mut sum = 0.0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let cx = (x + dx).clamp(0, width as isize - 1) as usize;
                    let cy = (y + dy).clamp(0, height as isize - 1) as usize;
                    sum += raw[cy * width + cx];
                }
            }
            data.push((sum / 9.0).round() as u8);
        }
    }
    GrayImage::new(width, height, data).expect("sized by construction")
}

/// Three independent noise textures as colour planes.
pub fn rgb_noise(width: usize, height: usize, seed: u64) -> RgbImage {
    let planes: Vec<GrayImage> = (0..3)
        .map(|c| noise_texture(width, height, 96.0 + 32.0 * c as f64, 40.0, seed + c))
        .collect();
    let data = (0..width * height)
        .flat_map(|i| planes.iter().map(move |p| p.data()[i]))
        .collect();
    RgbImage::new(width, height, data).expect("sized by construction")
}
