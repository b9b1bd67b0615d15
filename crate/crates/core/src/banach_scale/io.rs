//! Field and trajectory serialization.
//!
//! Every file starts with one line of JSON (the header) followed by the payload.
//! `Binary` payloads are raw IEEE-754 doubles in little-endian byte order, one
//! `(re, im)` pair per coefficient, component-major and in flat grid order
//! within a component; trajectories store their snapshots back to back.
//! `Csv` payloads hold one `snapshot,component,index,re,im` row per coefficient,
//! with `re`/`im` printed in shortest round-trip form.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::{Grid, GridSpec};
use super::trajectory::TrajectoryField;
use crate::error::{Error, Result};

pub const FORMAT_TAG: &str = "nmgn-spectral";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Binary,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub version: u32,
    pub grid: GridSpec,
    pub components: usize,
    pub encoding: Encoding,
    pub byte_order: String,
    /// Snapshot times for trajectories; absent for a single field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

fn header_for(grid: &GridSpec, components: usize, encoding: Encoding, times: Option<Vec<f64>>) -> FieldHeader {
    FieldHeader {
        format: FORMAT_TAG.into(),
        version: FORMAT_VERSION,
        grid: grid.clone(),
        components,
        encoding,
        byte_order: "little-endian".into(),
        times,
    }
}

fn write_payload<W: Write>(w: &mut W, snaps: &[&SpectralField], encoding: Encoding) -> Result<()> {
    match encoding {
        Encoding::Binary => {
            for f in snaps {
                for z in f.coeffs() {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        Encoding::Csv => {
            writeln!(w, "snapshot,component,index,re,im")?;
            for (t, f) in snaps.iter().enumerate() {
                let n = f.grid().n_points();
                for c in 0..f.components() {
                    for (idx, z) in f.component_coeffs(c).iter().enumerate() {
                        writeln!(w, "{t},{c},{idx},{:?},{:?}", z.re, z.im)?;
                    }
                }
                debug_assert_eq!(f.coeffs().len(), n * f.components());
            }
        }
    }
    Ok(())
}

fn read_payload<R: BufRead>(r: &mut R, header: &FieldHeader, count: usize) -> Result<Vec<SpectralField>> {
    let grid = Grid::new(header.grid.clone())?;
    let per = header.components * grid.n_points();
    let mut out = Vec::with_capacity(count);
    match header.encoding {
        Encoding::Binary => {
            let mut buf = [0u8; 8];
            for _ in 0..count {
                let mut coeffs = Vec::with_capacity(per);
                for _ in 0..per {
                    r.read_exact(&mut buf)?;
                    let re = f64::from_le_bytes(buf);
                    r.read_exact(&mut buf)?;
                    let im = f64::from_le_bytes(buf);
                    coeffs.push(Complex64::new(re, im));
                }
                out.push(SpectralField::from_coefficients(&grid, header.components, coeffs)?);
            }
        }
        Encoding::Csv => {
            let mut all = vec![vec![Complex64::new(0.0, 0.0); per]; count];
            let mut line = String::new();
            r.read_line(&mut line)?;
            let n = grid.n_points();
            loop {
                line.clear();
                if r.read_line(&mut line)? == 0 {
                    break;
                }
                let cols: Vec<&str> = line.trim().split(',').collect();
                if cols.len() != 5 {
                    continue;
                }
                let parse_u = |s: &str| s.parse::<usize>().map_err(|e| Error::InvalidField(e.to_string()));
                let parse_f = |s: &str| s.parse::<f64>().map_err(|e| Error::InvalidField(e.to_string()));
                let (t, c, idx) = (parse_u(cols[0])?, parse_u(cols[1])?, parse_u(cols[2])?);
                if t >= count || c >= header.components || idx >= n {
                    return Err(Error::InvalidField(format!("row out of range: {}", line.trim())));
                }
                all[t][c * n + idx] = Complex64::new(parse_f(cols[3])?, parse_f(cols[4])?);
            }
            for coeffs in all {
                out.push(SpectralField::from_coefficients(&grid, header.components, coeffs)?);
            }
        }
    }
    Ok(out)
}

fn read_header<R: BufRead>(r: &mut R) -> Result<FieldHeader> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: FieldHeader = serde_json::from_str(line.trim())?;
    if header.format != FORMAT_TAG || header.version != FORMAT_VERSION {
        return Err(Error::InvalidField(format!(
            "unsupported format {} v{}",
            header.format, header.version
        )));
    }
    Ok(header)
}

pub fn write_field<W: Write>(w: &mut W, f: &SpectralField, encoding: Encoding) -> Result<()> {
    let header = header_for(f.grid().spec(), f.components(), encoding, None);
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    write_payload(w, &[f], encoding)
}

pub fn read_field<R: BufRead>(r: &mut R) -> Result<SpectralField> {
    let header = read_header(r)?;
    Ok(read_payload(r, &header, 1)?.remove(0))
}

pub fn write_trajectory<W: Write>(w: &mut W, u: &TrajectoryField, encoding: Encoding) -> Result<()> {
    let first = u.first();
    let header = header_for(first.grid().spec(), first.components(), encoding, Some(u.times().to_vec()));
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    let snaps: Vec<&SpectralField> = u.snapshots().iter().collect();
    write_payload(w, &snaps, encoding)
}

pub fn read_trajectory<R: BufRead>(r: &mut R) -> Result<TrajectoryField> {
    let header = read_header(r)?;
    let times = header
        .times
        .clone()
        .ok_or_else(|| Error::InvalidField("header has no snapshot times".into()))?;
    let snaps = read_payload(r, &header, times.len())?;
    TrajectoryField::new(*times.last().unwrap(), snaps)
}

pub fn save_field(path: &Path, f: &SpectralField, encoding: Encoding) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, f, encoding)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<SpectralField> {
    read_field(&mut BufReader::new(File::open(path)?))
}

pub fn save_trajectory(path: &Path, u: &TrajectoryField, encoding: Encoding) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trajectory(&mut w, u, encoding)?;
    w.flush()?;
    Ok(())
}

pub fn load_trajectory(path: &Path) -> Result<TrajectoryField> {
    read_trajectory(&mut BufReader::new(File::open(path)?))
}

