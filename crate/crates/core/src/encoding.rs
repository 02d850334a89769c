//! Phase encoding of gray values and filter masks.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::image::Direction;

/// Angles in `[0, pi]`, one per encoded pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector(Vec<f64>);

impl AngleVector {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = angles.iter().find(|a| !(0.0..=PI).contains(*a)) {
            return Err(Error::AngleOutOfRange(bad));
        }
        Ok(Self(angles))
    }

    /// Skips the `[0, pi]` check. Circuit builders accept arbitrary real
    /// phases (shifted or negated angles are still meaningful there).
    pub fn unchecked(angles: Vec<f64>) -> Self {
        Self(angles)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Unit-modulus entries `exp(i * theta_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<Complex64>);

impl PhaseVector {
    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }
}

/// Gray value to angle: `c * pi / 255`.
pub fn gray_to_angle_value(c: u8) -> f64 {
    c as f64 * PI / 255.0
}

/// Element-wise `c_j * pi / 255`. Values outside `[0, 255]` are rejected.
pub fn gray_to_angle(values: &[i64]) -> Result<AngleVector> {
    values
        .iter()
        .map(|&c| {
            u8::try_from(c)
                .map(gray_to_angle_value)
                .map_err(|_| Error::GrayOutOfRange(c))
        })
        .collect::<Result<Vec<_>>>()
        .map(AngleVector)
}

/// Same as [`gray_to_angle`] for values already known to be 8-bit.
pub fn gray_bytes_to_angle(values: &[u8]) -> AngleVector {
    AngleVector(values.iter().map(|&c| gray_to_angle_value(c)).collect())
}

pub fn angles_to_phases(theta: &AngleVector) -> PhaseVector {
    PhaseVector(
        theta
            .0
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect(),
    )
}

/// A binary filter mask given by its weight angles (black = 0, white = pi).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterMask {
    pub name: &'static str,
    pub direction: Direction,
    pub weights: AngleVector,
}

/// The two-pixel derivative mask: black first pixel, white second.
/// The same weights serve every direction; only the pixel pairing differs.
pub fn mask_1d(direction: Direction) -> FilterMask {
    FilterMask {
        name: "1d",
        direction,
        weights: AngleVector(vec![0.0, PI]),
    }
}

/// 2x2 derivative masks in raster order (top-left, top-right, bottom-left,
/// bottom-right). Horizontal: black top row, white bottom row. Vertical:
/// black left column, white right column. Returns `None` for the diagonal
/// direction, which has no 2x2 mask.
pub fn mask_2d(direction: Direction) -> Option<FilterMask> {
    let weights = match direction {
        Direction::Horizontal => vec![0.0, 0.0, PI, PI],
        Direction::Vertical => vec![0.0, PI, 0.0, PI],
        Direction::Diagonal => return None,
    };
    Some(FilterMask {
        name: "2d",
        direction,
        weights: AngleVector(weights),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_angles() {
        let a = gray_to_angle(&[0, 255, 128]).unwrap();
        assert_eq!(a.as_slice()[0], 0.0);
        assert_eq!(a.as_slice()[1], PI);
        assert!((a.as_slice()[2] - 128.0 * PI / 255.0).abs() < 1e-15);
        assert!(matches!(
            gray_to_angle(&[256]),
            Err(Error::GrayOutOfRange(256))
        ));
        assert!(gray_to_angle(&[-1]).is_err());
    }

    #[test]
    fn gray_to_angle_is_monotone() {
        for c in 0..255u8 {
            assert!(gray_to_angle_value(c) < gray_to_angle_value(c + 1));
        }
    }

    #[test]
    fn phases() {
        let p = angles_to_phases(&AngleVector::new(vec![0.0, PI, PI / 2.0]).unwrap());
        let p = p.as_slice();
        assert!((p[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((p[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((p[2] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(p.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn extreme_grays_become_plus_minus_one() {
        let p = angles_to_phases(&gray_bytes_to_angle(&[0, 255]));
        assert!((p.as_slice()[0] - 1.0).norm() < 1e-12);
        assert!((p.as_slice()[1] + 1.0).norm() < 1e-12);
        let m = angles_to_phases(&mask_1d(Direction::Horizontal).weights);
        assert!((m.as_slice()[0] - 1.0).norm() < 1e-12);
        assert!((m.as_slice()[1] + 1.0).norm() < 1e-12);
    }

    #[test]
    fn masks() {
        let h = mask_2d(Direction::Horizontal).unwrap();
        let v = mask_2d(Direction::Vertical).unwrap();
        assert_eq!(h.weights.as_slice(), &[0.0, 0.0, PI, PI]);
        assert_eq!(v.weights.as_slice(), &[0.0, PI, 0.0, PI]);
        for m in [h, v] {
            assert_eq!(
                m.weights.as_slice().iter().filter(|&&w| w == 0.0).count(),
                2
            );
            assert_eq!(m.weights.as_slice().iter().filter(|&&w| w == PI).count(), 2);
        }
        assert!(mask_2d(Direction::Diagonal).is_none());
        assert_eq!(mask_1d(Direction::Diagonal).weights.as_slice(), &[0.0, PI]);
        assert!(AngleVector::new(vec![4.0]).is_err());
    }
}
