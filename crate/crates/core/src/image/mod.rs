//! Gray-value images, border mirroring, patch extraction and the classical
//! post-processing steps (pixel-wise maximum, gray scaling, histograms, Otsu).

mod otsu;
mod pgm;

pub use otsu::{between_class_variance, otsu_threshold};
pub use pgm::{load_pgm, parse_pgm, save_pgm, write_pgm, PgmFormat};

use crate::error::{Error, Result};

/// Tolerance used when validating probabilities coming out of the simulator.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// An 8-bit gray value image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Pixel at `(x, y)`. Panics when outside the image.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) outside image"
        );
        self.data[y * self.width + x]
    }

    /// Pixel lookup with reflect-at-border mirroring.
    ///
    /// Coordinates may lie at most one step outside the image: `-1` maps to
    /// `0` and `width` maps to `width - 1` (likewise for `y`). The mirrored
    /// neighbour therefore equals the border pixel and the finite difference
    /// across the border is exactly zero.
    pub fn mirror_value(&self, x: i64, y: i64) -> Result<u8> {
        let mx = mirror_index(x, self.width);
        let my = mirror_index(y, self.height);
        match (mx, my) {
            (Some(mx), Some(my)) => Ok(self.data[my * self.width + mx]),
            _ => Err(Error::OutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            }),
        }
    }

    /// The pixel pair `(I(x, y), I(x + dx, y + dy))` for `dir`, mirrored at
    /// the far border.
    pub fn pair(&self, x: usize, y: usize, dir: Direction) -> (u8, u8) {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) outside image"
        );
        let (dx, dy) = dir.offset();
        let second = self
            .mirror_value(x as i64 + dx, y as i64 + dy)
            .expect("neighbour is at most one step outside");
        (self.get(x, y), second)
    }

    /// The 2x2 patch anchored at `(x, y)` in raster order:
    /// `(I(x,y), I(x+1,y), I(x,y+1), I(x+1,y+1))`, mirrored at the borders.
    pub fn patch_2x2(&self, x: usize, y: usize) -> [u8; 4] {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) outside image"
        );
        let (x, y) = (x as i64, y as i64);
        let at = |x, y| {
            self.mirror_value(x, y)
                .expect("patch stays within one step")
        };
        [at(x, y), at(x + 1, y), at(x, y + 1), at(x + 1, y + 1)]
    }

    /// All pairs for one direction in raster order of their anchor pixel.
    pub fn pairs(&self, dir: Direction) -> Vec<(u8, u8)> {
        let mut out = Vec::with_capacity(self.len());
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(self.pair(x, y, dir));
            }
        }
        out
    }

    /// All 2x2 patches in raster order of their anchor pixel.
    pub fn patches(&self) -> Vec<[u8; 4]> {
        let mut out = Vec::with_capacity(self.len());
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(self.patch_2x2(x, y));
            }
        }
        out
    }

    /// 256-bin gray value frequency vector.
    pub fn histogram(&self) -> [u64; 256] {
        let mut bins = [0u64; 256];
        for &v in &self.data {
            bins[v as usize] += 1;
        }
        bins
    }

    /// Binarize with `value > threshold`.
    pub fn threshold(&self, threshold: u8) -> BinaryImage {
        BinaryImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v > threshold).collect(),
        }
    }
}

fn mirror_index(i: i64, len: usize) -> Option<usize> {
    let len = len as i64;
    match i {
        -1 => Some(0),
        i if (0..len).contains(&i) => Some(i as usize),
        i if i == len => Some((len - 1) as usize),
        _ => None,
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::InvalidImage(format!(
            "{width}x{height} image needs {} values, got {len}",
            width.saturating_mul(height)
        )));
    }
    Ok(())
}

/// Convenience wrapper around [`GrayImage::histogram`].
pub fn gray_histogram(img: &GrayImage) -> [u64; 256] {
    img.histogram()
}

/// Filter direction of a pixel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
    ];

    /// Offset of the second pixel of a pair.
    pub fn offset(self) -> (i64, i64) {
        match self {
            Direction::Horizontal => (1, 0),
            Direction::Vertical => (0, 1),
            Direction::Diagonal => (1, 1),
        }
    }

    pub fn short_name(self) -> char {
        match self {
            Direction::Horizontal => 'h',
            Direction::Vertical => 'v',
            Direction::Diagonal => 'd',
        }
    }
}

/// Per-pixel probabilities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ProbabilityImage {
    /// Values within [`PROBABILITY_TOLERANCE`] of `[0, 1]` are clamped into
    /// range; anything further out is rejected.
    pub fn new(width: usize, height: usize, mut data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        for v in &mut data {
            if !(-PROBABILITY_TOLERANCE..=1.0 + PROBABILITY_TOLERANCE).contains(v) {
                return Err(Error::InvalidImage(format!(
                    "probability {v} outside [0, 1]"
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) outside image"
        );
        self.data[y * self.width + x]
    }

    /// Scale to gray values with `round_half_up(p * 255)`.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&p| probability_to_gray(p)).collect(),
        }
    }
}

/// `round_half_up(p * 255)`, clamped to `[0, 255]`.
pub fn probability_to_gray(p: f64) -> u8 {
    (p * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn to_gray(p: &ProbabilityImage) -> GrayImage {
    p.to_gray()
}

/// Pixel-wise maximum of equally sized probability images.
pub fn pixelwise_max(images: &[&ProbabilityImage]) -> Result<ProbabilityImage> {
    let (first, rest) = images
        .split_first()
        .ok_or_else(|| Error::InvalidImage("pixel-wise maximum of zero images".into()))?;
    let mut out = (*first).clone();
    for img in rest {
        if img.width != out.width || img.height != out.height {
            return Err(Error::DimensionMismatch(
                out.width, out.height, img.width, img.height,
            ));
        }
        for (o, &v) in out.data.iter_mut().zip(&img.data) {
            *o = o.max(v);
        }
    }
    Ok(out)
}

/// Edge / non-edge mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
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

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) outside image"
        );
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Coordinates of set pixels in raster order.
    pub fn set_pixels(&self) -> Vec<(usize, usize)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i % self.width, i / self.width))
            .collect()
    }

    /// Edges white (255) on black (0).
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }
}
