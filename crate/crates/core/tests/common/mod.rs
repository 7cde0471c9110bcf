//! Fixture paths and plain-integer oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use sappi::image::{load_image, GrayImage, RgbImage};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub fn gray_fixture(name: &str) -> GrayImage {
    load_image(fixture(&format!("images/{name}.pgm")))
        .unwrap()
        .into_gray()
        .unwrap()
}

pub fn rgb_fixture(name: &str) -> RgbImage {
    load_image(fixture(&format!("images/{name}.ppm")))
        .unwrap()
        .into_rgb()
        .unwrap()
}

/// Bit-serial full adder built straight from the gate equations.
pub fn fa(kind: &str, a: bool, b: bool, c: bool) -> (bool, bool) {
    match kind {
        "exact" => (a ^ b ^ c, (a & b) | (c & (a ^ b))),
        "sappi1" => (!(a & b), (a & b) | c),
        "sappi2" => {
            let cout = (a & b) | c;
            (!cout | a, cout)
        }
        _ => panic!("no oracle for {kind}"),
    }
}

/// `n`-bit ripple-carry sum (with carry out) whose low `k` cells are `kind`.
pub fn ripple(kind: &str, n: u32, k: u32, a: u64, b: u64) -> u64 {
    let mut carry = false;
    let mut out = 0;
    for i in 0..n {
        let cell = if i < k { kind } else { "exact" };
        let (s, c) = fa(cell, (a >> i) & 1 == 1, (b >> i) & 1 == 1, carry);
        out |= u64::from(s) << i;
        carry = c;
    }
    out | (u64::from(carry) << n)
}

pub fn add_reference(a: &GrayImage, b: &GrayImage) -> Vec<u8> {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| ((u16::from(x) + u16::from(y)) / 2) as u8)
        .collect()
}

pub fn gray_reference(img: &RgbImage) -> Vec<u8> {
    img.data()
        .chunks_exact(3)
        .map(|p| ((u16::from(p[0]) + u16::from(p[1]) + u16::from(p[2])) / 3) as u8)
        .collect()
}

/// `[[1,2,1],[2,4,2],[1,2,1]] / 16` with replicated borders.
pub fn blur_reference(img: &GrayImage) -> Vec<u8> {
    const K: [[u32; 3]; 3] = [[1, 2, 1], [2, 4, 2], [1, 2, 1]];
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut out = Vec::with_capacity(img.data().len());
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0u32;
            for (dy, row) in K.iter().enumerate() {
                for (dx, &wt) in row.iter().enumerate() {
                    let sx = (x + dx as isize - 1).clamp(0, w - 1) as usize;
                    let sy = (y + dy as isize - 1).clamp(0, h - 1) as usize;
                    acc += wt * u32::from(img.data()[sy * w as usize + sx]);
                }
            }
            out.push((acc / 16) as u8);
        }
    }
    out
}
