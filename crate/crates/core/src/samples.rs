//! Synthetic test images.

use crate::image::GrayImage;

/// Axis-aligned rectangle with inclusive corners `(x0, y0)` and `(x1, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub const fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

/// Free-standing rectangles of [`binary_sample`].
pub const BINARY_RECTANGLES: [Rect; 3] = [
    Rect::new(2, 2, 8, 6),
    Rect::new(12, 3, 14, 9),
    Rect::new(19, 2, 27, 7),
];

fn in_triangle(x: usize, y: usize, apex_x: usize, apex_y: usize, base_y: usize) -> bool {
    if y < apex_y || y > base_y {
        return false;
    }
    x.abs_diff(apex_x) <= y - apex_y
}

fn in_disk(x: usize, y: usize, cx: f64, cy: f64, r: f64) -> bool {
    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
    dx * dx + dy * dy <= r * r
}

/// 30x30 black/white scene: three rectangles, a house with a pitched roof
/// and a tree.
pub fn binary_sample() -> GrayImage {
    let house_body = Rect::new(17, 19, 27, 27);
    let trunk = Rect::new(6, 19, 8, 24);
    GrayImage::from_fn(30, 30, |x, y| {
        let on = BINARY_RECTANGLES.iter().any(|r| r.contains(x, y))
            || house_body.contains(x, y)
            || in_triangle(x, y, 22, 13, 18)
            || trunk.contains(x, y)
            || in_triangle(x, y, 7, 12, 18);
        if on {
            255
        } else {
            0
        }
    })
    .expect("fixed dimensions")
}

/// 30x30 gray scene with sharp edges: flat objects at several gray levels
/// on a black background.
pub fn gray_sample() -> GrayImage {
    let block = Rect::new(3, 3, 11, 10);
    let marker = Rect::new(24, 24, 26, 25);
    GrayImage::from_fn(30, 30, |x, y| {
        if block.contains(x, y) {
            255
        } else if in_disk(x, y, 21.0, 8.0, 3.6) {
            240
        } else if in_triangle(x, y, 9, 15, 20) || Rect::new(5, 21, 13, 26).contains(x, y) {
            250
        } else if marker.contains(x, y) {
            20
        } else {
            0
        }
    })
    .expect("fixed dimensions")
}

/// `size` x `size` house scene built from flat regions: sky, ground, walls,
/// roof, windows, door, a tree and the sun. Geometry scales with `size`.
pub fn house_like(size: usize) -> GrayImage {
    let s = size as f64 / 256.0;
    let px = |v: f64| (v * s).round() as usize;
    let body = Rect::new(px(60.0), px(90.0), px(180.0), px(170.0));
    let windows = [
        Rect::new(px(80.0), px(110.0), px(105.0), px(135.0)),
        Rect::new(px(135.0), px(110.0), px(160.0), px(135.0)),
    ];
    let door = Rect::new(px(110.0), px(135.0), px(130.0), px(170.0));
    let trunk = Rect::new(px(215.0), px(120.0), px(225.0), px(175.0));
    let horizon = px(150.0);
    let (roof_x, roof_top, roof_base) = (px(120.0), px(40.0), px(89.0));
    GrayImage::from_fn(size, size, |x, y| {
        let roof = y >= roof_top
            && y <= roof_base
            && (x.abs_diff(roof_x) as f64) <= (y - roof_top) as f64 * 70.0 / 49.0;
        if in_disk(x, y, 40.0 * s, 35.0 * s, 15.0 * s) {
            250
        } else if roof {
            60
        } else if windows.iter().any(|w| w.contains(x, y)) {
            230
        } else if door.contains(x, y) {
            40
        } else if body.contains(x, y) {
            150
        } else if in_disk(x, y, 220.0 * s, 100.0 * s, 25.0 * s) {
            100
        } else if trunk.contains(x, y) {
            50
        } else if y >= horizon {
            70
        } else {
            190
        }
    })
    .expect("fixed dimensions")
}
