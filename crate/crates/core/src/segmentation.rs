//! Divergence thresholding of RGB images.
//!
//! Each interior pixel `(i, j)` (row `i ≥ 1`, column `j ≥ 1`) gets a
//! divergence between neighbouring pixels, summed over the three channels
//! as a measure on three atoms. Below the threshold `k` the output pixel
//! is foreground, otherwise background. Row 0 and column 0 stay background.

use alloc::vec;
use alloc::vec::Vec;

use crate::divergence::DivergenceSpec;
use crate::error::{Error, Result};

pub type Pixel = [u8; 3];

/// 8-bit RGB raster in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<Pixel>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Pixel>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("width and height must be positive"));
        }
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::InvalidImage(
                "pixel count does not match width × height",
            ));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, pixel: Pixel) -> Result<Self> {
        Self::new(width, height, vec![pixel; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Pixel,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for i in 0..height {
            for j in 0..width {
                pixels.push(f(i, j));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    /// Pixel at row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> Pixel {
        self.pixels[i * self.width + j]
    }

    /// Interleaved `RGBRGB…` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(3) {
            return Err(Error::InvalidImage("byte count is not a multiple of 3"));
        }
        Self::new(
            width,
            height,
            bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        )
    }
}

/// How 8-bit channels become positive reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `max(v, ε)` on the 0..=255 scale.
    Raw,
    /// `max(v / 255, ε)`.
    Unit,
}

impl Normalization {
    pub fn default_epsilon(self) -> f64 {
        match self {
            Normalization::Raw => 1.0,
            Normalization::Unit => 1e-3,
        }
    }

    fn map(self, v: u8, epsilon: f64) -> f64 {
        let x = match self {
            Normalization::Raw => v as f64,
            Normalization::Unit => v as f64 / 255.0,
        };
        x.max(epsilon)
    }
}

/// Which pixels are compared at `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborMode {
    /// Left neighbour `X[i][j−1]` against top neighbour `X[i−1][j]`.
    #[default]
    Literal,
    /// `max(d(X[i][j], X[i][j−1]), d(X[i][j], X[i−1][j]))`.
    Current,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentationConfig {
    pub spec: DivergenceSpec,
    pub k: f64,
    pub normalization: Normalization,
    pub epsilon: f64,
    pub neighbor_mode: NeighborMode,
    pub foreground: Pixel,
    pub background: Pixel,
}

impl SegmentationConfig {
    /// White-on-black, literal neighbours, default ε for `normalization`.
    pub fn new(spec: DivergenceSpec, k: f64, normalization: Normalization) -> Result<Self> {
        let cfg = Self {
            spec,
            k,
            normalization,
            epsilon: normalization.default_epsilon(),
            neighbor_mode: NeighborMode::Literal,
            foreground: [255; 3],
            background: [0; 3],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.is_nan() || self.k <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "k",
                value: self.k,
            });
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
            });
        }
        Ok(())
    }
}

/// Channel-summed divergence between two pixels.
pub fn pixel_divergence(
    spec: &DivergenceSpec,
    p1: Pixel,
    p2: Pixel,
    config: &SegmentationConfig,
) -> Result<f64> {
    let mut total = 0.0;
    for c in 0..3 {
        let x = config.normalization.map(p1[c], config.epsilon);
        let y = config.normalization.map(p2[c], config.epsilon);
        total += spec.eval(x, y)?;
    }
    Ok(total)
}

/// Per-pixel divergences for the interior; border entries are `NaN`.
pub fn divergence_map(image: &RgbImage, config: &SegmentationConfig) -> Result<Vec<f64>> {
    config.validate()?;
    if image.width < 2 || image.height < 2 {
        return Err(Error::InvalidImage(
            "segmentation needs at least 2 × 2 pixels",
        ));
    }
    let (w, h) = (image.width, image.height);
    // channel values after normalization, one table lookup per byte
    let mut table = [0.0; 256];
    for (v, t) in table.iter_mut().enumerate() {
        *t = config.normalization.map(v as u8, config.epsilon);
    }
    let spec = &config.spec;
    let d = |a: Pixel, b: Pixel| -> Result<f64> {
        let mut total = 0.0;
        for c in 0..3 {
            if a[c] != b[c] {
                total += spec.eval(table[a[c] as usize], table[b[c] as usize])?;
            }
        }
        Ok(total)
    };
    let mut out = vec![f64::NAN; w * h];
    for i in 1..h {
        for j in 1..w {
            let left = image.get(i, j - 1);
            let top = image.get(i - 1, j);
            out[i * w + j] = match config.neighbor_mode {
                NeighborMode::Literal => d(left, top)?,
                NeighborMode::Current => {
                    let here = image.get(i, j);
                    d(here, left)?.max(d(here, top)?)
                }
            };
        }
    }
    Ok(out)
}

fn threshold(image: &RgbImage, map: &[f64], k: f64, config: &SegmentationConfig) -> RgbImage {
    let (w, h) = (image.width, image.height);
    let mut pixels = vec![config.background; w * h];
    for i in 1..h {
        for j in 1..w {
            if map[i * w + j] < k {
                pixels[i * w + j] = config.foreground;
            }
        }
    }
    RgbImage {
        width: w,
        height: h,
        pixels,
    }
}

/// Binary image: foreground where the neighbour divergence is below `k`.
pub fn segment(image: &RgbImage, config: &SegmentationConfig) -> Result<RgbImage> {
    let map = divergence_map(image, config)?;
    Ok(threshold(image, &map, config.k, config))
}

/// [`segment`] for each threshold in `ks`, sharing one divergence map.
pub fn threshold_sweep(
    image: &RgbImage,
    ks: &[f64],
    config: &SegmentationConfig,
) -> Result<Vec<RgbImage>> {
    if ks.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&k) = ks.iter().find(|&&k| k.is_nan() || k <= 0.0) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
        });
    }
    let map = divergence_map(image, config)?;
    Ok(ks
        .iter()
        .map(|&k| threshold(image, &map, k, config))
        .collect())
}
