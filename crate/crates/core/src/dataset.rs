//! Point datasets before and after normalization to the unit cube.
//!
//! Coordinates are stored row-major in one flat buffer: point `i` occupies
//! `coords[i * dim..(i + 1) * dim]`.

use crate::error::{Error, Result};

/// Points in arbitrary units, as ingested.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    dim: usize,
    coords: Vec<f64>,
}

impl RawDataset {
    /// Builds a dataset from a flat coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if coords.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::RaggedPoint {
                point: coords.len() / dim,
                expected: dim,
                found: coords.len() % dim,
            });
        }
        check_finite(dim, &coords)?;
        Ok(Self { dim, coords })
    }

    /// Builds a dataset from per-point vectors; the first point fixes the dimension.
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::RaggedPoint {
                    point: i,
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

fn check_finite(dim: usize, coords: &[f64]) -> Result<()> {
    match coords.iter().position(|c| !c.is_finite()) {
        Some(k) => Err(Error::NonFinite {
            point: k / dim,
            dim: k % dim,
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizeMode {
    /// Affine map of each dimension onto [0, 1].
    #[default]
    MinMax,
    /// Data is already in the unit cube; copy unchanged.
    PassThrough,
}

/// Points inside the unit E-cube; the input to both box-counting kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDataset {
    dim: usize,
    coords: Vec<f64>,
    provenance: Vec<(f64, f64)>,
}

impl NormalizedDataset {
    /// Wraps coordinates that are already in [0, 1], validating every one.
    pub fn from_unit_coords(dim: usize, coords: Vec<f64>) -> Result<Self> {
        let raw = RawDataset::from_flat(dim, coords)?;
        normalize(&raw, NormalizeMode::PassThrough)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Per-dimension `(min, max)` that was mapped onto `(0, 1)`.
    pub fn provenance(&self) -> &[(f64, f64)] {
        &self.provenance
    }

    pub fn to_raw(&self) -> RawDataset {
        RawDataset {
            dim: self.dim,
            coords: self.coords.clone(),
        }
    }
}

/// Maps a raw dataset into the unit cube.
///
/// Min-max sends each dimension's minimum to 0 and maximum to 1. A constant
/// dimension maps to 0. Pass-through rejects any coordinate outside [0, 1].
pub fn normalize(raw: &RawDataset, mode: NormalizeMode) -> Result<NormalizedDataset> {
    let dim = raw.dim;
    check_finite(dim, &raw.coords)?;
    match mode {
        NormalizeMode::PassThrough => {
            if let Some(k) = raw.coords.iter().position(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::OutOfUnitRange {
                    point: k / dim,
                    dim: k % dim,
                    value: raw.coords[k],
                });
            }
            Ok(NormalizedDataset {
                dim,
                coords: raw.coords.clone(),
                provenance: vec![(0.0, 1.0); dim],
            })
        }
        NormalizeMode::MinMax => {
            let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
            for p in raw.points() {
                for (b, &x) in bounds.iter_mut().zip(p) {
                    b.0 = b.0.min(x);
                    b.1 = b.1.max(x);
                }
            }
            let maps: Vec<AxisMap> = bounds
                .iter()
                .map(|&(lo, hi)| AxisMap::new(lo, hi))
                .collect();
            let coords = raw
                .coords
                .iter()
                .enumerate()
                .map(|(k, &x)| maps[k % dim].apply(x))
                .collect();
            Ok(NormalizedDataset {
                dim,
                coords,
                provenance: bounds,
            })
        }
    }
}

#[derive(Clone, Copy)]
struct AxisMap {
    lo: f64,
    span: f64,
    // span overflows f64 when the data covers most of its range
    halved: bool,
}

impl AxisMap {
    fn new(lo: f64, hi: f64) -> Self {
        let span = hi - lo;
        if span.is_finite() {
            Self {
                lo,
                span,
                halved: false,
            }
        } else {
            Self {
                lo: lo / 2.0,
                span: hi / 2.0 - lo / 2.0,
                halved: true,
            }
        }
    }

    fn apply(self, x: f64) -> f64 {
        if self.span == 0.0 {
            return 0.0;
        }
        let x = if self.halved { x / 2.0 } else { x };
        ((x - self.lo) / self.span).clamp(0.0, 1.0)
    }
}
