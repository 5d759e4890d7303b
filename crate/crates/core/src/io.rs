//! Portable field files and CSV emission.
//!
//! A field file is a single UTF-8 JSON header line
//!   {"version":1,"d":2,"n":64,"L":10.0,"components":2,"dtype":"f64","order":"row-major"}
//! terminated by '\n', followed by a raw little-endian f64 payload of length
//! n^d * components. Planes are stored component-major: component c occupies
//! entries [c n^d, (c+1) n^d), each plane in row-major grid order.
//!
//! CSV output uses a header row, '.' as the decimal separator and '\n'
//! newlines; floats are written with enough digits to round-trip.

use crate::error::{Error, Result};
use crate::fields::{PeriodicGrid, VectorField};
use crate::types::Dimension;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct FieldHeader {
    pub version: u32,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub len: f64,
    pub components: usize,
    pub dtype: String,
    pub order: String,
}

impl FieldHeader {
    fn for_grid(grid: &PeriodicGrid, components: usize) -> Self {
        FieldHeader {
            version: 1,
            d: grid.d(),
            n: grid.n(),
            len: grid.len(),
            components,
            dtype: "f64".to_string(),
            order: "row-major".to_string(),
        }
    }
}

/// Write raw component-major data with its grid header.
pub fn write_field_raw(
    path: &Path,
    grid: &PeriodicGrid,
    components: usize,
    data: &[f64],
) -> Result<()> {
    if data.len() != components * grid.num_points() {
        return Err(Error::Config("field payload length mismatch".into()));
    }
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let header = FieldHeader::for_grid(grid, components);
    serde_json::to_writer(&mut w, &header).map_err(|e| Error::Config(e.to_string()))?;
    w.write_all(b"\n")?;
    for v in data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Write a vector field (components = d).
pub fn write_field(path: &Path, u: &VectorField) -> Result<()> {
    write_field_raw(path, u.grid(), u.grid().d(), u.data())
}

/// Read any field file; returns the header and payload.
pub fn read_field_raw(path: &Path) -> Result<(FieldHeader, Vec<f64>)> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);
    let mut header_line = String::new();
    r.read_line(&mut header_line)?;
    let header: FieldHeader =
        serde_json::from_str(header_line.trim_end()).map_err(|e| Error::Config(format!("bad field header: {e}")))?;
    if header.dtype != "f64" || header.order != "row-major" {
        return Err(Error::Config("unsupported field encoding".into()));
    }
    let count = header
        .n
        .checked_pow(header.d as u32)
        .and_then(|np| np.checked_mul(header.components))
        .ok_or_else(|| Error::Config("field dimensions overflow".into()))?;
    let mut payload = vec![0u8; count * 8];
    r.read_exact(&mut payload)?;
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok((header, data))
}

/// Read a vector field (requires components = d).
pub fn read_field(path: &Path) -> Result<VectorField> {
    let (header, data) = read_field_raw(path)?;
    if header.components != header.d {
        return Err(Error::Config(format!(
            "expected a vector field with {} components, file has {}",
            header.d, header.components
        )));
    }
    let grid = PeriodicGrid::new(Dimension::new(header.d)?, header.n, header.len)?;
    VectorField::from_data(grid, data)
}

/// Deterministic float formatting for CSV: shortest round-trip form.
pub fn fmt_float(v: f64) -> String {
    let mut buf = ryu_like(v);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(v: f64) -> String {
    // {:?} gives the shortest representation that round-trips
    format!("{v:?}")
}

/// Write rows to CSV with a header; floats already formatted by the caller
/// or passed through `fmt_float`.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::synth;

    #[test]
    fn field_round_trip() {
        let grid = PeriodicGrid::new(Dimension::new(2).unwrap(), 16, 3.5).unwrap();
        let u = synth::random_band_limited(grid, 3, 5);
        let dir = std::env::temp_dir().join("fraclame_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("u.field");
        write_field(&path, &u).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(u.grid(), back.grid());
        assert_eq!(u.data(), back.data());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn header_is_single_json_line() {
        let grid = PeriodicGrid::new(Dimension::new(2).unwrap(), 8, 1.0).unwrap();
        let u = VectorField::zeros(grid);
        let dir = std::env::temp_dir().join("fraclame_io_test2");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("z.field");
        write_field(&path, &u).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        let header: FieldHeader = serde_json::from_slice(&bytes[..nl]).unwrap();
        assert_eq!(header.components, 2);
        assert_eq!(bytes.len() - nl - 1, 2 * 64 * 8);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(fmt_float(1.0), "1.0");
        assert_eq!(fmt_float(0.5), "0.5");
        assert!(fmt_float(1.0 / 3.0).starts_with("0.333333333333333"));
    }
}
