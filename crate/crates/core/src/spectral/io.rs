//! Plain-text spectral field files.
//!
//! ```text
//! # sqg spectral field v1
//! n 64
//! # k1 k2 re im
//! 1 0 5e-1 0e0
//! ...
//! ```
//!
//! Only the half plane `k2 > 0` or `k2 = 0, k1 >= 0` is written; the other
//! half follows from Hermitian symmetry. Values use Rust's shortest
//! round-trip float formatting, so write → read is lossless. Blank lines and
//! lines starting with `#` are ignored on read; modes not listed are zero.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::{GridSpec, Wavevector};
use crate::error::{Error, Result};

pub const FIELD_FILE_MAGIC: &str = "# sqg spectral field v1";

pub fn write_field(field: &SpectralField) -> String {
    let grid = field.grid();
    let ny = grid.nyquist();
    let mut out = String::new();
    let _ = writeln!(out, "{FIELD_FILE_MAGIC}");
    let _ = writeln!(out, "n {}", grid.n());
    let _ = writeln!(out, "# k1 k2 re im");
    for k2 in 0..ny {
        for k1 in (1 - ny)..ny {
            let k = Wavevector::new(k1, k2);
            if k2 == 0 && k1 < 0 {
                continue;
            }
            let c = field.coeff(k);
            let _ = writeln!(out, "{} {} {:e} {:e}", k1, k2, c.re, c.im);
        }
    }
    out
}

pub fn read_field(text: &str) -> Result<SpectralField> {
    let mut grid: Option<GridSpec> = None;
    let mut modes = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |message: String| Error::FieldFormat {
            line: line_no,
            message,
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts[0] == "n" {
            if grid.is_some() {
                return Err(fail("duplicate header".into()));
            }
            let n: usize = parts
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| fail("expected `n <size>`".into()))?;
            grid = Some(GridSpec::new(n).map_err(|e| fail(e.to_string()))?);
            continue;
        }
        let g = grid.ok_or_else(|| fail("mode line before `n` header".into()))?;
        if parts.len() != 4 {
            return Err(fail(format!("expected 4 columns, got {}", parts.len())));
        }
        let k1: i32 = parts[0].parse().map_err(|_| fail("bad k1".into()))?;
        let k2: i32 = parts[1].parse().map_err(|_| fail("bad k2".into()))?;
        let re: f64 = parts[2].parse().map_err(|_| fail("bad re".into()))?;
        let im: f64 = parts[3].parse().map_err(|_| fail("bad im".into()))?;
        let k = Wavevector::new(k1, k2);
        if !(k2 > 0 || (k2 == 0 && k1 >= 0)) {
            return Err(fail(format!("mode {k} outside the stored half plane")));
        }
        if !g.contains(k) {
            return Err(fail(format!("mode {k} outside grid n = {}", g.n())));
        }
        if k.is_zero() {
            if re != 0.0 || im != 0.0 {
                return Err(fail("mean mode must be zero".into()));
            }
            continue;
        }
        modes.push((k, Complex64::new(re, im)));
    }
    let g = grid.ok_or(Error::FieldFormat {
        line: 0,
        message: "missing `n` header".into(),
    })?;
    SpectralField::from_modes(g, modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_missing_header_and_mean() {
        assert!(read_field("1 0 1e0 0e0\n").is_err());
        assert!(read_field("n 8\n0 0 1e0 0e0\n").is_err());
        assert!(read_field("n 8\n-1 1 1e0 0e0\n").is_ok());
        assert!(read_field("n 8\n-1 0 1e0 0e0\n").is_err());
        assert!(read_field("n 8\n4 0 1e0 0e0\n").is_err());
    }

    #[test]
    fn roundtrip_is_lossless() {
        let g = GridSpec::new(8).unwrap();
        let f = SpectralField::from_modes(
            g,
            [
                (Wavevector::new(1, 0), Complex64::new(0.1, -1.0 / 3.0)),
                (
                    Wavevector::new(-2, 3),
                    Complex64::new(std::f64::consts::PI, 1e-300),
                ),
            ],
        )
        .unwrap();
        let text = write_field(&f);
        assert!(text.starts_with(FIELD_FILE_MAGIC));
        assert_eq!(read_field(&text).unwrap(), f);
    }
}
