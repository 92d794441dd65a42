use std::fs;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::MapFamily;
use crate::bloch::AffineMap;
use crate::{Error, Result};

const IDENTITY_TOL: f64 = 1e-10;

/// On-disk tabulated family: `{"d": int, "samples": [{"t", "D", "f"}, ...]}`
/// with `D` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedFile {
    pub d: usize,
    pub samples: Vec<TabulatedSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedSample {
    pub t: f64,
    #[serde(rename = "D")]
    pub linear: Vec<f64>,
    pub f: Vec<f64>,
}

impl TabulatedFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numbers serialize")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|source| Error::Io { path: path.to_owned(), source })
    }
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

/// Read a tabulated family; see [`tabulated_family`].
pub fn load_tabulated_family(path: &Path) -> Result<MapFamily> {
    let file: TabulatedFile = read_json(path)?;
    tabulated_family(file, format!("file:{}", path.display()))
}

/// Family that interpolates the samples entrywise-linearly on
/// `[0, t_last]`.
///
/// Times must be strictly increasing from 0 and the first sample must be the
/// identity map.
pub fn tabulated_family(file: TabulatedFile, name: impl Into<String>) -> Result<MapFamily> {
    let d = file.d;
    if d < 2 {
        return Err(Error::Schema(format!("d must be at least 2, got {d}")));
    }
    let n = d * d - 1;
    if file.samples.is_empty() {
        return Err(Error::Schema("no samples".into()));
    }
    let mut times = Vec::with_capacity(file.samples.len());
    let mut maps = Vec::with_capacity(file.samples.len());
    for (i, s) in file.samples.into_iter().enumerate() {
        if s.linear.len() != n * n || s.f.len() != n {
            return Err(Error::Schema(format!(
                "sample {i}: expected {} D entries and {n} f entries for d = {d}, got {} and {}",
                n * n,
                s.linear.len(),
                s.f.len()
            )));
        }
        if !s.t.is_finite() {
            return Err(Error::Schema(format!("sample {i}: non-finite time")));
        }
        if let Some(&prev) = times.last() {
            if s.t <= prev {
                return Err(Error::Schema(format!("sample {i}: times must increase strictly ({} after {prev})", s.t)));
            }
        }
        let m = AffineMap::new(d, DMatrix::from_row_slice(n, n, &s.linear), DVector::from_vec(s.f))
            .map_err(|e| Error::Schema(format!("sample {i}: {e}")))?;
        times.push(s.t);
        maps.push(m);
    }
    if times[0] != 0.0 {
        return Err(Error::Schema(format!("first sample must be at t = 0, got {}", times[0])));
    }
    if maps[0].max_abs_diff(&AffineMap::identity(d)?) > IDENTITY_TOL {
        return Err(Error::Schema("first sample must be the identity map".into()));
    }

    let horizon = *times.last().expect("non-empty");
    let times = Arc::new(times);
    let maps = Arc::new(maps);
    Ok(MapFamily::new(name, d, horizon, move |t| Ok(interpolate(&times, &maps, t))))
}

fn interpolate(times: &[f64], maps: &[AffineMap], t: f64) -> AffineMap {
    // first index with times[i] > t
    let hi = times.partition_point(|&x| x <= t);
    if hi == 0 {
        return maps[0].clone();
    }
    if hi == times.len() {
        return maps[hi - 1].clone();
    }
    let lo = hi - 1;
    let w = (t - times[lo]) / (times[hi] - times[lo]);
    if w == 0.0 {
        return maps[lo].clone();
    }
    let (a, b) = (&maps[lo], &maps[hi]);
    AffineMap::new(
        a.dim(),
        a.linear() * (1.0 - w) + b.linear() * w,
        a.translation() * (1.0 - w) + b.translation() * w,
    )
    .expect("convex combination keeps shape")
}

/// Sample `family` at `times` into the tabulated schema.
pub fn export_tabulated(family: &MapFamily, times: &[f64]) -> Result<TabulatedFile> {
    let samples = times
        .iter()
        .map(|&t| {
            let m = family.evaluate(t)?;
            let n = m.vector_len();
            let mut linear = Vec::with_capacity(n * n);
            for r in 0..n {
                for c in 0..n {
                    linear.push(m.linear()[(r, c)]);
                }
            }
            Ok(TabulatedSample { t, linear, f: m.translation().iter().copied().collect() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TabulatedFile { d: family.dim(), samples })
}
