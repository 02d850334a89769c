//! Netpbm gray maps: P2 (ASCII) and P5 (binary), 8-bit only.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::GrayImage;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmFormat {
    /// ASCII payload.
    #[default]
    P2,
    /// Raw byte payload.
    P5,
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>, format: PgmFormat) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_pgm(img, &mut buf, format).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Serialize with maxval 255. P2 writes one image row per line.
pub fn write_pgm(img: &GrayImage, w: &mut impl Write, format: PgmFormat) -> std::io::Result<()> {
    let magic = match format {
        PgmFormat::P2 => "P2",
        PgmFormat::P5 => "P5",
    };
    write!(w, "{magic}\n{} {}\n255\n", img.width(), img.height())?;
    match format {
        PgmFormat::P2 => {
            for row in img.data().chunks(img.width()) {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
        }
        PgmFormat::P5 => w.write_all(img.data())?,
    }
    Ok(())
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_ws_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Pgm(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Pgm(format!("{what} does not fit an integer")))
    }
}

/// Parse a P2 or P5 gray map with maxval at most 255. Comment lines are
/// accepted anywhere in the header (and between P2 samples).
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(Error::Pgm("missing P2/P5 magic number".into())),
    };
    let mut hdr = Header { bytes, pos: 2 };
    let width = hdr.number("width")? as usize;
    let height = hdr.number("height")? as usize;
    let maxval = hdr.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!(
            "maxval {maxval} unsupported (must be 1..=255)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Pgm(format!("empty image {width}x{height}")));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Pgm("dimensions overflow".into()))?;

    let check = |v: u64| {
        if v > maxval {
            Err(Error::Pgm(format!("sample {v} exceeds maxval {maxval}")))
        } else {
            Ok(v as u8)
        }
    };

    let data = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        match bytes.get(hdr.pos) {
            Some(b) if b.is_ascii_whitespace() => hdr.pos += 1,
            _ => return Err(Error::Pgm("missing whitespace after maxval".into())),
        }
        let raster = &bytes[hdr.pos..];
        if raster.len() < n {
            return Err(Error::Pgm(format!(
                "truncated payload: expected {n} bytes, found {}",
                raster.len()
            )));
        }
        raster[..n]
            .iter()
            .map(|&b| check(b as u64))
            .collect::<Result<Vec<_>>>()?
    } else {
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            let v = hdr.number("sample").map_err(|_| {
                Error::Pgm(format!(
                    "truncated payload: expected {n} samples, found {i}"
                ))
            })?;
            data.push(check(v)?);
        }
        data
    };
    GrayImage::new(width, height, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn to_bytes(img: &GrayImage, f: PgmFormat) -> Vec<u8> {
        let mut buf = Vec::new();
        write_pgm(img, &mut buf, f).unwrap();
        buf
    }

    #[test]
    fn parses_ascii() {
        let img = parse_pgm(b"P2\n2 1\n255\n0 255\n").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.data(), &[0, 255]);
    }

    #[test]
    fn parses_binary_and_matches_ascii() {
        let mut p5 = b"P5\n2 2\n255\n".to_vec();
        p5.extend_from_slice(&[1, 2, 3, 250]);
        let a = parse_pgm(&p5).unwrap();
        let b = parse_pgm(b"P2 2 2 255 1 2 3 250").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tolerates_comments() {
        let img = parse_pgm(b"P2\n# made by hand\n3 1 # trailing\n255\n1 2\n# mid\n3\n").unwrap();
        assert_eq!(img.data(), &[1, 2, 3]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_pgm(b"P2\n1 1\n65535\n0\n").is_err());
        assert!(parse_pgm(b"P6\n1 1\n255\n0\n").is_err());
        assert!(parse_pgm(b"P2\n2 2\n255\n0 1 2\n").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00\x01").is_err());
        assert!(parse_pgm(b"P2\n1 1\n100\n101\n").is_err());
        assert!(parse_pgm(b"P2\nx 1\n255\n0\n").is_err());
    }

    #[test]
    fn writes_expected_text() {
        let img = GrayImage::new(1, 1, vec![0]).unwrap();
        assert_eq!(to_bytes(&img, PgmFormat::P2), b"P2\n1 1\n255\n0\n");
        let img = GrayImage::filled(3, 2, 9).unwrap();
        let p5 = to_bytes(&img, PgmFormat::P5);
        assert_eq!(&p5[p5.len() - 6..], &[9; 6]);
        assert_eq!(p5.len(), b"P5\n3 2\n255\n".len() + 6);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pgm");
        let img = GrayImage::from_fn(30, 30, |x, y| ((x * 31 + y * 17) % 256) as u8).unwrap();
        for f in [PgmFormat::P2, PgmFormat::P5] {
            save_pgm(&img, &path, f).unwrap();
            assert_eq!(load_pgm(&path).unwrap(), img);
        }
        assert!(matches!(
            load_pgm(dir.path().join("missing.pgm")),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let mut s = seed;
            let img = GrayImage::from_fn(w, h, |_, _| {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                s as u8
            }).unwrap();
            for f in [PgmFormat::P2, PgmFormat::P5] {
                prop_assert_eq!(parse_pgm(&to_bytes(&img, f)).unwrap(), img.clone());
            }
        }
    }
}
