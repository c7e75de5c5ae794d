//! Conversions between external artifacts (text, PBM bitmaps, bit files) and
//! [`BitString`] / [`Grid`].

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::bits::{BitString, Grid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinarizationScheme {
    /// 1 for an ASCII vowel (either case), 0 otherwise.
    VowelMap,
    /// 1 for a space, 0 otherwise.
    SpaceMap,
    /// 8 bits per ASCII character, most significant first.
    Ascii8,
}

impl FromStr for BinarizationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vowel" => Ok(Self::VowelMap),
            "space" => Ok(Self::SpaceMap),
            "ascii8" => Ok(Self::Ascii8),
            _ => Err(Error::InvalidArgument(format!(
                "unknown binarization scheme {s:?}"
            ))),
        }
    }
}

pub fn binarize_text(text: &str, scheme: BinarizationScheme) -> Result<BitString> {
    match scheme {
        BinarizationScheme::VowelMap => {
            Ok(text.chars().map(|c| "aeiouAEIOU".contains(c)).collect())
        }
        BinarizationScheme::SpaceMap => Ok(text.chars().map(|c| c == ' ').collect()),
        BinarizationScheme::Ascii8 => {
            let mut out = BitString::new();
            for (i, c) in text.chars().enumerate() {
                if !c.is_ascii() {
                    return Err(Error::Parse {
                        offset: i,
                        msg: format!("non-ASCII character {c:?}"),
                    });
                }
                for shift in (0..8).rev() {
                    out.push((c as u8 >> shift) & 1 == 1);
                }
            }
            Ok(out)
        }
    }
}

/// Parses the bit-file format: `0` and `1` characters, whitespace ignored.
pub fn parse_bits(text: &[u8]) -> Result<BitString> {
    let mut out = BitString::new();
    for (i, &c) in text.iter().enumerate() {
        match c {
            b'0' => out.push(false),
            b'1' => out.push(true),
            c if c.is_ascii_whitespace() => {}
            c => {
                return Err(Error::Parse {
                    offset: i,
                    msg: format!("unexpected byte {c:#04x} in bit file"),
                })
            }
        }
    }
    Ok(out)
}

/// Formats bits with a newline every `line_len` bits (0 = single line).
pub fn format_bits(x: &BitString, line_len: usize) -> String {
    let s = x.to_string();
    if line_len == 0 || s.is_empty() {
        return if s.is_empty() { s } else { s + "\n" };
    }
    let mut out = String::with_capacity(s.len() + s.len() / line_len + 1);
    for chunk in s.as_bytes().chunks(line_len) {
        out.push_str(std::str::from_utf8(chunk).unwrap());
        out.push('\n');
    }
    out
}

pub fn read_bits(path: impl AsRef<Path>) -> Result<BitString> {
    parse_bits(&std::fs::read(path)?)
}

pub fn write_bits(x: &BitString, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_bits(x, 80))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbmFormat {
    /// `P1`, ASCII digits.
    Plain,
    /// `P4`, rows packed MSB-first and padded to whole bytes.
    Raw,
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    /// Skips whitespace and `#` comments.
    fn skip_space(&mut self) {
        while let Some(&c) = self.data.get(self.pos) {
            if c == b'#' {
                while self
                    .data
                    .get(self.pos)
                    .is_some_and(|&c| c != b'\n' && c != b'\r')
                {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .unwrap()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::Parse {
                offset: start,
                msg: format!("invalid {what}"),
            })
    }
}

pub fn parse_pbm(data: &[u8]) -> Result<Grid> {
    let mut cur = HeaderCursor { data, pos: 0 };
    let format = match data.get(..2) {
        Some(b"P1") => PbmFormat::Plain,
        Some(b"P4") => PbmFormat::Raw,
        _ => return Err(cur.err("missing P1/P4 magic number")),
    };
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let cells = width
        .checked_mul(height)
        .ok_or_else(|| cur.err("image dimensions overflow"))?;

    let mut bits = Vec::with_capacity(cells);
    match format {
        PbmFormat::Plain => {
            while bits.len() < cells {
                cur.skip_space();
                match data.get(cur.pos) {
                    Some(b'0') => bits.push(false),
                    Some(b'1') => bits.push(true),
                    Some(&c) => {
                        return Err(cur.err(format!("unexpected byte {c:#04x} in pixel data")))
                    }
                    None => {
                        return Err(cur.err(format!(
                            "pixel data ends after {} of {cells} pixels",
                            bits.len()
                        )))
                    }
                }
                cur.pos += 1;
            }
        }
        PbmFormat::Raw => {
            match data.get(cur.pos) {
                Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(cur.err("expected a single whitespace byte before raster")),
            }
            let row_bytes = width.div_ceil(8);
            let need = row_bytes * height;
            let raster = data.get(cur.pos..cur.pos + need).ok_or_else(|| {
                cur.err(format!(
                    "raster needs {need} bytes, {} available",
                    data.len() - cur.pos
                ))
            })?;
            for row in raster.chunks_exact(row_bytes) {
                bits.extend((0..width).map(|x| row[x / 8] & (0x80 >> (x % 8)) != 0));
            }
        }
    }
    Grid::new(vec![width, height], bits)
}

pub fn encode_pbm(g: &Grid, format: PbmFormat) -> Result<Vec<u8>> {
    if g.ndim() != 2 {
        return Err(Error::Dimension(format!(
            "PBM images are 2D, grid has dims {:?}",
            g.dims()
        )));
    }
    let (w, h) = (g.dims()[0], g.dims()[1]);
    let rows = g.data().chunks_exact(w);
    match format {
        PbmFormat::Plain => {
            let mut out = format!("P1\n{w} {h}\n");
            for row in rows {
                // lines stay under 70 characters
                for chunk in row.chunks(64) {
                    for &b in chunk {
                        out.push(if b { '1' } else { '0' });
                    }
                    out.push('\n');
                }
            }
            Ok(out.into_bytes())
        }
        PbmFormat::Raw => {
            let mut out = Vec::new();
            write!(out, "P4\n{w} {h}\n")?;
            for row in rows {
                let mut packed = vec![0u8; w.div_ceil(8)];
                for (x, &b) in row.iter().enumerate() {
                    if b {
                        packed[x / 8] |= 0x80 >> (x % 8);
                    }
                }
                out.extend_from_slice(&packed);
            }
            Ok(out)
        }
    }
}

pub fn read_pbm(path: impl AsRef<Path>) -> Result<Grid> {
    parse_pbm(&std::fs::read(path)?)
}

pub fn write_pbm(g: &Grid, path: impl AsRef<Path>, format: PbmFormat) -> Result<()> {
    std::fs::write(path, encode_pbm(g, format)?)?;
    Ok(())
}

/// Human-readable rendering of a 2D grid, one row per line.
pub fn render_ascii(g: &Grid) -> String {
    let w = g.dims()[0];
    let mut out = String::new();
    for row in g.data().chunks(w) {
        for &b in row {
            out.push(if b { '#' } else { '.' });
        }
        writeln!(out).unwrap();
    }
    out
}
