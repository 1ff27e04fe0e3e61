//! Binary PGM (`P5`) and PPM (`P6`) with maxval 255.
//!
//! Bytes map to `[−1, 1]` by `v/127.5 − 1`; writing clamps and rounds
//! half up, `⌊(v + 1)·127.5 + 0.5⌋`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    /// One channel.
    PgmP5,
    /// Three interleaved channels.
    PpmP6,
}

impl RasterFormat {
    pub fn channels(self) -> usize {
        match self {
            RasterFormat::PgmP5 => 1,
            RasterFormat::PpmP6 => 3,
        }
    }

    fn magic(self) -> &'static [u8; 2] {
        match self {
            RasterFormat::PgmP5 => b"P5",
            RasterFormat::PpmP6 => b"P6",
        }
    }

    /// The format that stores `channels` channels, if any.
    pub fn for_channels(channels: usize) -> Result<Self> {
        match channels {
            1 => Ok(RasterFormat::PgmP5),
            3 => Ok(RasterFormat::PpmP6),
            c => Err(Error::Shape(format!("no raster format stores {c} channels"))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            RasterFormat::PgmP5 => "pgm",
            RasterFormat::PpmP6 => "ppm",
        }
    }
}

impl fmt::Display for RasterFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for RasterFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" | "p5" => Ok(RasterFormat::PgmP5),
            "ppm" | "p6" => Ok(RasterFormat::PpmP6),
            _ => Err(Error::Parse {
                offset: 0,
                message: format!("unknown raster format {s:?}"),
            }),
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    // Whitespace and `#` comments between header fields.
    fn skip_separators(&mut self) -> Result<()> {
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err("expected whitespace"));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Parse {
                offset: start,
                message: format!("{what} out of range"),
            })
    }
}

pub fn read_raster(bytes: &[u8]) -> Result<ImageTensor> {
    let mut cur = Cursor { bytes, pos: 0 };
    let format = match bytes.get(..2) {
        Some(b"P5") => RasterFormat::PgmP5,
        Some(b"P6") => RasterFormat::PpmP6,
        _ => return Err(cur.err("bad magic: expected P5 or P6")),
    };
    cur.pos = 2;
    cur.skip_separators()?;
    let width = cur.number("width")?;
    cur.skip_separators()?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(cur.err(format!("zero image dimensions {width}x{height}")));
    }
    cur.skip_separators()?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Parse {
            offset: maxval_at,
            message: format!("unsupported maxval {maxval}, expected 255"),
        });
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.err("expected a single whitespace byte before the samples")),
    }
    let channels = format.channels();
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("truncated payload: {} of {expected} sample bytes", payload.len()),
        });
    }
    let mut data = vec![0.0; expected];
    for (i, &b) in payload[..expected].iter().enumerate() {
        let (pixel, c) = (i / channels, i % channels);
        data[c * width * height + pixel] = byte_to_value(b);
    }
    ImageTensor::new(channels, height, width, data)
}

pub fn write_raster(img: &ImageTensor, format: RasterFormat) -> Result<Vec<u8>> {
    let channels = format.channels();
    if img.channels() != channels {
        return Err(Error::Shape(format!(
            "{format} stores {channels} channel(s), image has {}",
            img.channels()
        )));
    }
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity(20 + w * h * channels);
    out.extend_from_slice(format.magic());
    out.extend_from_slice(format!("\n{w} {h}\n255\n").as_bytes());
    for pixel in 0..w * h {
        for c in 0..channels {
            out.push(value_to_byte(img.plane(c)[pixel]));
        }
    }
    Ok(out)
}

#[inline]
pub fn byte_to_value(b: u8) -> f64 {
    b as f64 / 127.5 - 1.0
}

#[inline]
pub fn value_to_byte(v: f64) -> u8 {
    let scaled = (v.clamp(-1.0, 1.0) + 1.0) * 127.5;
    (scaled + 0.5).floor().min(255.0) as u8
}
