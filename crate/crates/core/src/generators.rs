//! Seeded synthetic datasets with known correlation dimension.
//!
//! Every generator draws from ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, so output depends only on the arguments and
//! is identical on every platform. Unit reals take the top 53 bits of a
//! `u64` draw; discrete choices use `gen_range` over `u32`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::RawDataset;
use crate::error::{Error, Result};

/// Chaos-game steps discarded before the first emitted point.
pub const BURN_IN: usize = 100;

/// Sierpinski triangle vertices.
pub const SIERPINSKI_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]];

/// `log 3 / log 2`
pub const SIERPINSKI_D2: f64 = 1.584_962_500_721_156;
/// `log 2 / log 3`
pub const CANTOR_D2: f64 = 0.630_929_753_571_457_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Sierpinski,
    Uniform,
    PointMass,
    Cantor,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Sierpinski => "sierpinski",
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::PointMass => "point-mass",
            GeneratorKind::Cantor => "cantor",
        }
    }

    /// The only dimension a fractal fixture supports, if it is fixed.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            GeneratorKind::Sierpinski => Some(2),
            GeneratorKind::Cantor => Some(1),
            GeneratorKind::Uniform | GeneratorKind::PointMass => None,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sierpinski" => Ok(GeneratorKind::Sierpinski),
            "uniform" => Ok(GeneratorKind::Uniform),
            "point-mass" => Ok(GeneratorKind::PointMass),
            "cantor" => Ok(GeneratorKind::Cantor),
            other => Err(format!(
                "unknown dataset type {other:?} (expected sierpinski, uniform, point-mass or cantor)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Checks the count and the kind/dimension combination.
    pub fn new(kind: GeneratorKind, n: usize, dim: Option<usize>, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let dim = match (kind.fixed_dim(), dim) {
            (Some(fixed), Some(d)) if d != fixed => {
                return Err(Error::DimensionMismatch {
                    expected: fixed,
                    found: d,
                })
            }
            (Some(fixed), _) => fixed,
            (None, Some(0)) => {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: 0,
                })
            }
            (None, Some(d)) => d,
            (None, None) => 2,
        };
        Ok(Self { kind, n, dim, seed })
    }

    pub fn generate(&self) -> RawDataset {
        match self.kind {
            GeneratorKind::Sierpinski => gen_sierpinski(self.n, self.seed),
            GeneratorKind::Uniform => gen_uniform(self.n, self.dim, self.seed),
            GeneratorKind::PointMass => gen_point_mass(self.n, self.dim),
            GeneratorKind::Cantor => gen_cantor(self.n, self.seed),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Chaos game on the Sierpinski triangle: `x <- (x + v) / 2` for a vertex `v`
/// drawn uniformly each step.
pub fn gen_sierpinski(n: usize, seed: u64) -> RawDataset {
    assert!(n >= 1, "n must be positive");
    let mut rng = rng(seed);
    let mut state = [unit(&mut rng), unit(&mut rng)];
    let mut coords = Vec::with_capacity(2 * n);
    for step in 0..BURN_IN + n {
        let v = SIERPINSKI_VERTICES[rng.gen_range(0u32..3) as usize];
        state = [(state[0] + v[0]) / 2.0, (state[1] + v[1]) / 2.0];
        if step >= BURN_IN {
            coords.extend_from_slice(&state);
        }
    }
    RawDataset::from_flat(2, coords).expect("finite chaos-game points")
}

/// `n` points with independent coordinates uniform in [0, 1).
pub fn gen_uniform(n: usize, dim: usize, seed: u64) -> RawDataset {
    assert!(n >= 1 && dim >= 1, "n and dim must be positive");
    let mut rng = rng(seed);
    let coords = (0..n * dim).map(|_| unit(&mut rng)).collect();
    RawDataset::from_flat(dim, coords).expect("finite uniform points")
}

/// `n` copies of the cube centre.
pub fn gen_point_mass(n: usize, dim: usize) -> RawDataset {
    assert!(n >= 1 && dim >= 1, "n and dim must be positive");
    RawDataset::from_flat(dim, vec![0.5; n * dim]).expect("finite point mass")
}

/// Chaos game on the middle-thirds Cantor set: `x <- x/3` or `x <- x/3 + 2/3`.
pub fn gen_cantor(n: usize, seed: u64) -> RawDataset {
    assert!(n >= 1, "n must be positive");
    let mut rng = rng(seed);
    let mut x = unit(&mut rng);
    let mut coords = Vec::with_capacity(n);
    for step in 0..BURN_IN + n {
        x = if rng.gen_range(0u32..2) == 0 {
            x / 3.0
        } else {
            x / 3.0 + 2.0 / 3.0
        };
        if step >= BURN_IN {
            coords.push(x);
        }
    }
    RawDataset::from_flat(1, coords).expect("finite chaos-game points")
}
