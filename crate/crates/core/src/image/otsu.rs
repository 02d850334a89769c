use super::{BinaryImage, GrayImage};

/// Between-class variance of the split `{v <= t} | {v > t}` as an exact
/// fraction `(numerator, denominator)`, scaled by `N^2` which is constant for
/// a given histogram.
///
/// With `n0, n1` the class sizes and `s0, s1` the class value sums the
/// variance is `w0 w1 (mu0 - mu1)^2 = (s0 n1 - s1 n0)^2 / (n0 n1 N^2)`.
/// Returns `None` when either class is empty.
fn split_variance(n0: u64, s0: u64, n1: u64, s1: u64) -> Option<(u128, u128)> {
    if n0 == 0 || n1 == 0 {
        return None;
    }
    let diff = (s0 as i128 * n1 as i128 - s1 as i128 * n0 as i128).unsigned_abs();
    Some((diff * diff, n0 as u128 * n1 as u128))
}

/// `a/b > c/d` for nonnegative fractions, exact when the cross products fit
/// in `u128`.
fn greater(a: (u128, u128), c: (u128, u128)) -> bool {
    match (a.0.checked_mul(c.1), c.0.checked_mul(a.1)) {
        (Some(l), Some(r)) => l > r,
        _ => (a.0 as f64 / a.1 as f64) > (c.0 as f64 / c.1 as f64),
    }
}

/// Between-class variance `w0 w1 (mu0 - mu1)^2` for threshold `t` over a
/// 256-bin histogram (class 0 is `v <= t`). Zero when a class is empty.
pub fn between_class_variance(hist: &[u64; 256], t: u8) -> f64 {
    let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
    for (v, &c) in hist.iter().enumerate() {
        if v <= t as usize {
            n0 += c;
            s0 += c * v as u64;
        } else {
            n1 += c;
            s1 += c * v as u64;
        }
    }
    let n = (n0 + n1) as f64;
    match split_variance(n0, s0, n1, s1) {
        Some((num, den)) => num as f64 / den as f64 / (n * n),
        None => 0.0,
    }
}

/// Otsu's global threshold.
///
/// Returns the smallest `t` maximizing the between-class variance and the
/// mask `value > t`. A constant image has no valid split; its threshold is
/// the constant value so every pixel is non-edge.
pub fn otsu_threshold(img: &GrayImage) -> (u8, BinaryImage) {
    let hist = img.histogram();
    let total_n: u64 = hist.iter().sum();
    let total_s: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();

    let mut best: Option<(u8, (u128, u128))> = None;
    let (mut n0, mut s0) = (0u64, 0u64);
    for t in 0..=255u8 {
        n0 += hist[t as usize];
        s0 += hist[t as usize] * t as u64;
        let Some(var) = split_variance(n0, s0, total_n - n0, total_s - s0) else {
            continue;
        };
        if best.is_none_or(|(_, b)| greater(var, b)) {
            best = Some((t, var));
        }
    }

    let t = match best {
        Some((t, _)) => t,
        // Single populated bin.
        None => img.data().first().copied().unwrap_or(0),
    };
    (t, img.threshold(t))
}
