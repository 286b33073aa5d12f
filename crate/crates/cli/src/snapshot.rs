//! Field snapshots on disk.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic    8 bytes  "KDVSNAP\0"
//! version  u32      1
//! n_modes  u64
//! tau      f64      step size that produced the field (0 for initial data)
//! time     f64
//! coeffs   (n_modes/2 + 1) x (re f64, im f64)   k = 0, 1, ..., n_modes/2
//! ```
//!
//! The last coefficient is the real Nyquist mode. The CSV alternative has a
//! `#` metadata line, a `k,re,im` header and one row per coefficient.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use kdvlab::num_complex::Complex64;
use kdvlab::{GridSpec, SpectralField};

use crate::error::CliError;

pub const MAGIC: [u8; 8] = *b"KDVSNAP\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: SpectralField,
    pub tau: f64,
    pub time: f64,
}

fn corrupt(path: &str, reason: impl Into<String>) -> CliError {
    CliError::Io {
        path: path.into(),
        message: format!("malformed snapshot: {}", reason.into()),
    }
}

pub fn write_binary<W: Write>(snap: &Snapshot, mut w: W) -> io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(snap.field.grid().n_modes() as u64).to_le_bytes())?;
    w.write_all(&snap.tau.to_le_bytes())?;
    w.write_all(&snap.time.to_le_bytes())?;
    for c in snap.field.modes() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    w.flush()
}

fn take<const N: usize>(buf: &[u8], at: &mut usize) -> Option<[u8; N]> {
    let bytes = buf.get(*at..*at + N)?.try_into().ok()?;
    *at += N;
    Some(bytes)
}

pub fn read_binary<R: Read>(mut r: R, name: &str) -> Result<Snapshot, CliError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf).map_err(|e| CliError::io(name, e))?;
    let mut at = 0;
    let short = || corrupt(name, "truncated header");
    if take::<8>(&buf, &mut at).ok_or_else(short)? != MAGIC {
        return Err(corrupt(name, "bad magic bytes"));
    }
    let version = u32::from_le_bytes(take(&buf, &mut at).ok_or_else(short)?);
    if version != VERSION {
        return Err(corrupt(name, format!("unsupported version {version}")));
    }
    let n_modes = u64::from_le_bytes(take(&buf, &mut at).ok_or_else(short)?) as usize;
    let tau = f64::from_le_bytes(take(&buf, &mut at).ok_or_else(short)?);
    let time = f64::from_le_bytes(take(&buf, &mut at).ok_or_else(short)?);
    let grid = GridSpec::new(n_modes).map_err(|e| corrupt(name, e.to_string()))?;
    let expected = at + (n_modes / 2 + 1) * 16;
    if buf.len() != expected {
        return Err(corrupt(
            name,
            format!("expected {expected} bytes, found {}", buf.len()),
        ));
    }
    let coeffs = buf[at..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("chunk of 16")),
                f64::from_le_bytes(c[8..].try_into().expect("chunk of 16")),
            )
        })
        .collect();
    let field = SpectralField::from_modes(grid, coeffs).map_err(|e| corrupt(name, e.to_string()))?;
    Ok(Snapshot { field, tau, time })
}

pub fn write_csv<W: Write>(snap: &Snapshot, mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "# kdvlab snapshot v{VERSION} n_modes={} tau={:e} time={}",
        snap.field.grid().n_modes(),
        snap.tau,
        snap.time
    )?;
    writeln!(w, "k,re,im")?;
    for (k, c) in snap.field.modes().iter().enumerate() {
        writeln!(w, "{k},{:e},{:e}", c.re, c.im)?;
    }
    w.flush()
}

fn meta(line: &str, key: &str) -> Option<String> {
    line.split_whitespace()
        .find_map(|t| t.strip_prefix(key)?.strip_prefix('=').map(str::to_string))
}

pub fn read_csv<R: Read>(r: R, name: &str) -> Result<Snapshot, CliError> {
    let mut lines = BufReader::new(r).lines();
    let mut next = || -> Result<String, CliError> {
        lines
            .next()
            .ok_or_else(|| corrupt(name, "unexpected end of file"))?
            .map_err(|e| CliError::io(name, e))
    };
    let head = next()?;
    let parse = |key: &str| -> Result<f64, CliError> {
        meta(&head, key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| corrupt(name, format!("missing `{key}` in metadata line")))
    };
    let n_modes = parse("n_modes")? as usize;
    let (tau, time) = (parse("tau")?, parse("time")?);
    if next()?.trim() != "k,re,im" {
        return Err(corrupt(name, "expected `k,re,im` header"));
    }
    let grid = GridSpec::new(n_modes).map_err(|e| corrupt(name, e.to_string()))?;
    let mut coeffs = Vec::with_capacity(n_modes / 2 + 1);
    for k in 0..=n_modes / 2 {
        let line = next()?;
        let cols: Vec<&str> = line.trim().split(',').collect();
        let value = |i: usize| -> Option<f64> { cols.get(i)?.parse().ok() };
        match (cols.first().and_then(|c| c.parse::<usize>().ok()), value(1), value(2)) {
            (Some(kk), Some(re), Some(im)) if kk == k && cols.len() == 3 => {
                coeffs.push(Complex64::new(re, im))
            }
            _ => return Err(corrupt(name, format!("bad row for k = {k}: `{line}`"))),
        }
    }
    let field = SpectralField::from_modes(grid, coeffs).map_err(|e| corrupt(name, e.to_string()))?;
    Ok(Snapshot { field, tau, time })
}

/// Reads a snapshot, choosing the format by extension (`.csv` or binary).
pub fn load(path: &Path) -> Result<Snapshot, CliError> {
    let name = path.display().to_string();
    let file = fs::File::open(path).map_err(|e| CliError::io(&name, e))?;
    if path.extension().is_some_and(|e| e == "csv") {
        read_csv(file, &name)
    } else {
        read_binary(file, &name)
    }
}

/// Writes `<stem>.kdv` and `<stem>.csv` into `dir`.
pub fn save(snap: &Snapshot, dir: &Path, stem: &str) -> Result<(), CliError> {
    for (ext, binary) in [("kdv", true), ("csv", false)] {
        let path = dir.join(format!("{stem}.{ext}"));
        let name = path.display().to_string();
        let file = io::BufWriter::new(fs::File::create(&path).map_err(|e| CliError::io(&name, e))?);
        let res = if binary {
            write_binary(snap, file)
        } else {
            write_csv(snap, file)
        };
        res.map_err(|e| CliError::io(&name, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use kdvlab::{rough_sample, RoughDataSpec};

    fn sample() -> Snapshot {
        let grid = GridSpec::new(32).unwrap();
        Snapshot {
            field: rough_sample(&RoughDataSpec::new(0.5, 7, grid)).unwrap(),
            tau: 2f64.powi(-10),
            time: 0.25,
        }
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let snap = sample();
        let mut buf = Vec::new();
        write_binary(&snap, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 8 + 8 + 8 + 17 * 16);
        assert_eq!(&buf[..8], b"KDVSNAP\0");
        assert_eq!(read_binary(&buf[..], "mem").unwrap(), snap);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let snap = sample();
        let mut buf = Vec::new();
        write_csv(&snap, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..], "mem").unwrap(), snap);
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let snap = sample();
        let mut buf = Vec::new();
        write_binary(&snap, &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 1], "mem").is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_binary(&bad[..], "mem").is_err());
        let mut bad = buf.clone();
        bad[8] = 2;
        assert!(read_binary(&bad[..], "mem").is_err());
        assert!(read_binary(&buf[..10], "mem").is_err());
        assert!(read_csv(&b"k,re,im\n"[..], "mem").is_err());
    }
}
