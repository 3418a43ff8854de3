//! `.fld` field snapshots: one line of JSON header, then little-endian `f64`
//! samples, component-major, complex values as interleaved `re, im`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CField, GridField, Lattice, RField};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub grid_n: usize,
    pub period: f64,
    pub components: usize,
    /// `"f64"` or `"c64"`.
    pub dtype: String,
    pub time: f64,
}

/// Decoded snapshot; real data is returned with zero imaginary parts.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub lattice: Lattice,
    pub comps: Vec<Vec<Complex64>>,
}

impl Snapshot {
    pub fn to_cfield<const C: usize>(&self) -> Result<CField<C>> {
        if self.comps.len() != C {
            return Err(Error::Format(format!(
                "expected {C} components, found {}",
                self.comps.len()
            )));
        }
        CField::from_components(&self.lattice, std::array::from_fn(|c| self.comps[c].clone()))
    }

    pub fn to_rfield<const C: usize>(&self) -> Result<RField<C>> {
        if self.header.dtype != "f64" {
            return Err(Error::Format("snapshot holds complex data".into()));
        }
        Ok(self.to_cfield::<C>()?.real_part())
    }
}

/// Write `field` (real fields as `f64`, complex as `c64`).
pub fn write_snapshot<F: GridField + ?Sized>(
    path: &Path,
    field: &F,
    complex: bool,
    time: f64,
) -> Result<()> {
    let l = field.lattice();
    let header = SnapshotHeader {
        grid_n: l.n(),
        period: l.period(),
        components: field.components(),
        dtype: if complex { "c64" } else { "f64" }.into(),
        time,
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for c in 0..field.components() {
        for z in field.complex_component(c).iter() {
            w.write_all(&z.re.to_le_bytes())?;
            if complex {
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end())?;
    let lattice = Lattice::new(header.grid_n, header.period)?;
    let complex = match header.dtype.as_str() {
        "c64" => true,
        "f64" => false,
        other => return Err(Error::Format(format!("unknown dtype {other:?}"))),
    };
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let per = if complex { 16 } else { 8 };
    let want = header.components * lattice.len() * per;
    if bytes.len() != want {
        return Err(Error::Format(format!(
            "payload has {} bytes, header implies {want}",
            bytes.len()
        )));
    }
    let word = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().unwrap());
    let comps = (0..header.components)
        .map(|c| {
            (0..lattice.len())
                .map(|i| {
                    let k = c * lattice.len() + i;
                    if complex {
                        Complex64::new(word(2 * k), word(2 * k + 1))
                    } else {
                        Complex64::new(word(k), 0.0)
                    }
                })
                .collect()
        })
        .collect();
    Ok(Snapshot {
        header,
        lattice,
        comps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{SpinorField, VectorField};

    #[test]
    fn roundtrip_complex_and_real() {
        let dir = tempfile::tempdir().unwrap();
        let l = Lattice::new(4, 2.0).unwrap();
        let psi = SpinorField::from_index_fn(&l, |i| {
            std::array::from_fn(|c| Complex64::new(i as f64 + c as f64, -(i as f64) * 0.5))
        });
        let p = dir.path().join("psi.fld");
        write_snapshot(&p, &psi, true, 0.25).unwrap();
        let snap = read_snapshot(&p).unwrap();
        assert_eq!(snap.header.time, 0.25);
        assert_eq!(snap.header.dtype, "c64");
        assert_eq!(snap.to_cfield::<4>().unwrap().max_abs_diff(&psi), 0.0);

        let a = VectorField::from_index_fn(&l, |i| [i as f64, 1.0, -2.0]);
        let p = dir.path().join("a.fld");
        write_snapshot(&p, &a, false, 1.0).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(bytes.len() - nl - 1, 3 * 64 * 8);
        let back = read_snapshot(&p).unwrap().to_rfield::<3>().unwrap();
        assert_eq!(back.max_abs_diff(&a), 0.0);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.fld");
        std::fs::write(&p, b"{\"grid_n\":4,\"period\":1.0,\"components\":1,\"dtype\":\"f64\",\"time\":0.0}\n\0\0").unwrap();
        assert!(matches!(read_snapshot(&p), Err(Error::Format(_))));
    }
}
