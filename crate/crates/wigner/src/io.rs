//! On-disk layout for phase fields: a raw f64 plane pair plus a JSON sidecar.
//!
//! The `.bin` file holds the real plane then the imaginary plane, each
//! row-major over `[q index, p index]` in little-endian f64. The `.json`
//! sidecar records the grid and the normalization tag.

use crate::{Normalization, PhaseField};
use gridcore::{make_grid, PhaseGrid, C64};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{Error, ErrorKind, Result};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct Sidecar {
    n: usize,
    length: f64,
    mass: f64,
    normalization: String,
    axis_order: String,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Symbol => "symbol",
            Normalization::Wigner => "wigner",
        }
    }

    fn parse(s: &str) -> Result<Normalization> {
        match s {
            "symbol" => Ok(Normalization::Symbol),
            "wigner" => Ok(Normalization::Wigner),
            other => Err(Error::new(
                ErrorKind::InvalidData,
                format!("unknown normalization tag {other:?}"),
            )),
        }
    }
}

impl PhaseField {
    /// Write `<stem>.bin` and `<stem>.json`; `stem` carries no extension.
    pub fn save(&self, stem: &Path) -> Result<()> {
        let n = self.grid().n();
        let mut bytes = Vec::with_capacity(2 * n * n * 8);
        for v in self.values().iter() {
            bytes.extend_from_slice(&v.re.to_le_bytes());
        }
        for v in self.values().iter() {
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
        fs::write(stem.with_extension("bin"), bytes)?;

        let base = self.grid().base();
        let sidecar = Sidecar {
            n,
            length: base.length(),
            mass: base.mass(),
            normalization: self.normalization().as_str().to_string(),
            axis_order: "q-major".to_string(),
        };
        let text = serde_json::to_string_pretty(&sidecar).map_err(Error::other)?;
        fs::write(stem.with_extension("json"), text)
    }

    /// Read a field written by [`PhaseField::save`].
    pub fn load(stem: &Path) -> Result<PhaseField> {
        let text = fs::read_to_string(stem.with_extension("json"))?;
        let sidecar: Sidecar = serde_json::from_str(&text).map_err(Error::other)?;
        if sidecar.axis_order != "q-major" {
            return Err(Error::new(
                ErrorKind::InvalidData,
                format!("unsupported axis order {:?}", sidecar.axis_order),
            ));
        }
        let normalization = Normalization::parse(&sidecar.normalization)?;
        let grid = make_grid(sidecar.n, sidecar.length, sidecar.mass)
            .map_err(|e| Error::new(ErrorKind::InvalidData, e.to_string()))?;

        let bytes = fs::read(stem.with_extension("bin"))?;
        let n = sidecar.n;
        if bytes.len() != 2 * n * n * 8 {
            return Err(Error::new(
                ErrorKind::InvalidData,
                format!("plane file holds {} bytes, expected {}", bytes.len(), 2 * n * n * 8),
            ));
        }
        let read_plane = |offset: usize| -> Vec<f64> {
            bytes[offset..offset + n * n * 8]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect()
        };
        let re = read_plane(0);
        let im = read_plane(n * n * 8);
        let values = Array2::from_shape_vec(
            (n, n),
            re.iter().zip(im.iter()).map(|(r, i)| C64::new(*r, *i)).collect(),
        )
        .map_err(Error::other)?;
        PhaseField::new(PhaseGrid::new(grid), values, normalization)
            .map_err(|e| Error::new(ErrorKind::InvalidData, e.to_string()))
    }

    /// CSV of the momentum slice at fixed `q_i`: columns `p,re,im`.
    pub fn csv_fixed_q(&self, i: usize) -> String {
        let mut out = String::from("p,re,im\n");
        for (k, p) in self.grid().p_points().iter().enumerate() {
            let v = self.value(i, k);
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", p, v.re, v.im));
        }
        out
    }

    /// CSV of the position slice at fixed `p_k`: columns `q,re,im`.
    pub fn csv_fixed_p(&self, k: usize) -> String {
        let mut out = String::from("q,re,im\n");
        for (i, q) in self.grid().base().q_points().iter().enumerate() {
            let v = self.value(i, k);
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", q, v.re, v.im));
        }
        out
    }
}
