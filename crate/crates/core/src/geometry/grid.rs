use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    /// `θ_k = (cos 2πk/m, sin 2πk/m)`; in 1D, alternating `±1`.
    UniformAngle,
    FibonacciSphere,
    SeededRandom,
}

/// Deterministic set of unit directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionGrid {
    pub dim: usize,
    pub scheme: GridScheme,
    pub seed: u64,
    pub directions: Vec<Vec<f64>>,
}

impl DirectionGrid {
    pub fn new(dim: usize, scheme: GridScheme, count: usize, seed: u64) -> Result<Self> {
        if dim == 0 || count == 0 {
            return Err(Error::InvalidParameter(
                "grid needs positive dimension and count".into(),
            ));
        }
        let directions = match scheme {
            GridScheme::UniformAngle => match dim {
                1 => (0..count).map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
                2 => (0..count)
                    .map(|k| {
                        let a = std::f64::consts::TAU * k as f64 / count as f64;
                        vec![a.cos(), a.sin()]
                    })
                    .collect(),
                _ => return Err(Error::InvalidParameter("uniform-angle grids are 1D or 2D".into())),
            },
            GridScheme::FibonacciSphere => {
                if dim != 3 {
                    return Err(Error::InvalidParameter("fibonacci-sphere grids are 3D".into()));
                }
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                (0..count)
                    .map(|k| {
                        let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                        let rad = (1.0 - z * z).sqrt();
                        let phi = golden * k as f64;
                        vec![rad * phi.cos(), rad * phi.sin(), z]
                    })
                    .collect()
            }
            GridScheme::SeededRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count).map(|_| random_unit(dim, &mut rng)).collect()
            }
        };
        Ok(Self {
            dim,
            scheme,
            seed,
            directions,
        })
    }

    /// Uniform-angle in 1D and 2D, Fibonacci in 3D, seeded random beyond.
    pub fn standard(dim: usize, count: usize, seed: u64) -> Result<Self> {
        let scheme = match dim {
            1 | 2 => GridScheme::UniformAngle,
            3 => GridScheme::FibonacciSphere,
            _ => GridScheme::SeededRandom,
        };
        Self::new(dim, scheme, count, seed)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Uniform direction on the sphere from normalized Gaussian coordinates.
pub fn random_unit<R: rand::Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let len = crate::linalg::norm(&v);
        if len > 1e-8 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}
