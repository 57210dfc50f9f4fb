//! Binary PPM (P6) and, with the `png` feature, PNG rasters.
//!
//! The PPM writer emits the canonical form `P6\n<w> <h>\n255\n<pixels>`,
//! so decoding and re-encoding such a file reproduces it byte for byte.
//! The reader also accepts comments and arbitrary whitespace in the header.

use std::fs;
use std::path::Path;

use abdiv_core::segmentation::RgbImage;

use crate::error::ImageError;

type Result<T> = std::result::Result<T, ImageError>;

/// Decodes an 8-bit P6 image.
pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(ImageError::Header("missing P6 magic number"));
    }
    let mut pos = 2;
    let width = header_number(bytes, &mut pos)?;
    let height = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if width == 0 || height == 0 {
        return Err(ImageError::Header("zero width or height"));
    }
    if maxval != 255 {
        return Err(ImageError::UnsupportedDepth(maxval));
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(ImageError::Header(
                "expected a single whitespace byte before pixel data",
            ))
        }
    }
    let expected = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(3))
        .ok_or(ImageError::TooLarge)?;
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(ImageError::Truncated {
            offset: bytes.len(),
            expected,
            found: data.len(),
        });
    }
    Ok(RgbImage::from_bytes(
        width as usize,
        height as usize,
        &data[..expected],
    )?)
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n' && b != b'\r') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b) if b.is_ascii_digit() => break,
            Some(_) => return Err(ImageError::Header("unexpected byte in header")),
            None => return Err(ImageError::Header("header ends early")),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or(ImageError::Header("header number out of range"))
}

/// Canonical P6 encoding.
pub fn encode_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.to_bytes());
    out
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Reads a PPM file, or a PNG when the extension is `.png`.
pub fn load_image(path: &Path) -> Result<RgbImage> {
    let bytes = fs::read(path).map_err(|source| ImageError::Io {
        path: path.to_owned(),
        source,
    })?;
    if is_png(path) {
        decode_png(&bytes)
    } else {
        decode_ppm(&bytes)
    }
}

/// Writes PPM, or PNG when the extension is `.png`.
pub fn write_image(image: &RgbImage, path: &Path) -> Result<()> {
    let bytes = if is_png(path) {
        encode_png(image)?
    } else {
        encode_ppm(image)
    };
    fs::write(path, bytes).map_err(|source| ImageError::Io {
        path: path.to_owned(),
        source,
    })
}

#[cfg(feature = "png")]
pub fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| ImageError::Png(e.to_string()))?;
    let size = reader.output_buffer_size().ok_or(ImageError::TooLarge)?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| ImageError::Png(e.to_string()))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(ImageError::UnsupportedDepth(info.bit_depth as u32));
    }
    let data = &buf[..info.buffer_size()];
    let (w, h) = (info.width as usize, info.height as usize);
    let pixels = match info.color_type {
        png::ColorType::Rgb => data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        png::ColorType::Rgba => data.chunks_exact(4).map(|c| [c[0], c[1], c[2]]).collect(),
        png::ColorType::Grayscale => data.iter().map(|&g| [g; 3]).collect(),
        other => {
            return Err(ImageError::UnsupportedFormat(format!(
                "PNG colour type {other:?}"
            )))
        }
    };
    Ok(RgbImage::new(w, h, pixels)?)
}

#[cfg(feature = "png")]
pub fn encode_png(image: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| ImageError::Png(e.to_string()))?;
        writer
            .write_image_data(&image.to_bytes())
            .map_err(|e| ImageError::Png(e.to_string()))?;
    }
    Ok(out)
}

#[cfg(not(feature = "png"))]
pub fn decode_png(_: &[u8]) -> Result<RgbImage> {
    Err(ImageError::UnsupportedFormat(
        "PNG support not compiled in".into(),
    ))
}

#[cfg(not(feature = "png"))]
pub fn encode_png(_: &RgbImage) -> Result<Vec<u8>> {
    Err(ImageError::UnsupportedFormat(
        "PNG support not compiled in".into(),
    ))
}
