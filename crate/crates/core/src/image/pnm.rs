//! Binary PGM (P5) and PPM (P6) with maxval 255.

use std::fs;
use std::path::Path;

use super::{GrayImage, Image, RgbImage};
use crate::error::{Error, Result};

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    /// Offset of the first payload byte.
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(Error::Truncated("missing PNM magic".into()));
    }
    let magic = [bytes[0], bytes[1]];
    match &magic {
        b"P5" | b"P6" => {}
        b"P1" | b"P2" | b"P3" | b"P4" | b"P7" => {
            return Err(Error::UnsupportedFormat(format!(
                "PNM variant {} (only binary P5/P6 are supported)",
                String::from_utf8_lossy(&magic)
            )))
        }
        _ => return Err(Error::Format("not a PNM file".into())),
    }

    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // whitespace and comments before each header number
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while !matches!(bytes.get(pos), Some(b'\n') | None) {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Truncated("PNM header ends early".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format(format!("expected a number at byte {start}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| Error::Format(format!("header value `{text}` out of range")))?;
    }
    // exactly one whitespace byte separates maxval from the payload
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        Some(_) => return Err(Error::Format("missing whitespace after maxval".into())),
        None => return Err(Error::Truncated("PNM header ends early".into())),
    }

    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "maxval {maxval} (only 255 is supported)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("empty image {width}x{height}")));
    }
    Ok(Header {
        magic,
        width,
        height,
        data_start: pos,
    })
}

pub fn decode(bytes: &[u8]) -> Result<Image> {
    let h = parse_header(bytes)?;
    let channels = if &h.magic == b"P5" { 1 } else { 3 };
    let len = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    let payload = &bytes[h.data_start..];
    if payload.len() < len {
        return Err(Error::Truncated(format!(
            "expected {len} payload bytes, found {}",
            payload.len()
        )));
    }
    let data = payload[..len].to_vec();
    Ok(if channels == 1 {
        Image::Gray(GrayImage::new(h.width, h.height, data)?)
    } else {
        Image::Rgb(RgbImage::new(h.width, h.height, data)?)
    })
}

pub fn encode(image: &Image) -> Vec<u8> {
    let (magic, w, h, data) = match image {
        Image::Gray(g) => ("P5", g.width(), g.height(), g.data()),
        Image::Rgb(c) => ("P6", c.width(), c.height(), c.data()),
    };
    let mut out = format!("{magic}\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(data);
    out
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn save_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(image)).map_err(|e| Error::io(path, e))
}
