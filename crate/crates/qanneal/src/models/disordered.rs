use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ModelKind, ModelSpec};
use crate::error::{Error, Result};

/// Matrix-free periodic chain
/// H(g) = -sum_j [(1 + dJ_j) Z_j Z_{j+1} - J' Z_j Z_{j+2} + g X_j].
/// Basis states are bit strings; bit j set means Z_j = -1.
#[derive(Debug, Clone)]
pub struct DisorderedChain {
    pub l: usize,
    pub bonds: Vec<f64>,
    pub j_prime: f64,
    diag: Vec<f64>,
}

impl DisorderedChain {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let ModelKind::Disordered { delta_j, j_prime, seed } = spec.kind else {
            return Err(Error::Invalid("not a disordered model".into()));
        };
        if spec.l > 20 || spec.l < 3 {
            return Err(Error::Invalid(format!("disordered chain supports 3 <= L <= 20, got {}", spec.l)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bonds = (0..spec.l)
            .map(|_| 1.0 + if delta_j > 0.0 { rng.gen_range(-delta_j..=delta_j) } else { 0.0 })
            .collect();
        Ok(Self::from_bonds(bonds, j_prime))
    }

    pub fn from_bonds(bonds: Vec<f64>, j_prime: f64) -> Self {
        let l = bonds.len();
        let dim = 1usize << l;
        let diag = (0..dim)
            .map(|b| {
                let z = |j: usize| if (b >> (j % l)) & 1 == 0 { 1.0 } else { -1.0 };
                (0..l)
                    .map(|j| -bonds[j] * z(j) * z(j + 1) + j_prime * z(j) * z(j + 2))
                    .sum()
            })
            .collect();
        Self { l, bonds, j_prime, diag }
    }

    pub fn dim(&self) -> usize {
        1 << self.l
    }

    /// Field-independent diagonal part.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Upper bound on the spectral radius at field g.
    pub fn norm_bound(&self, g: f64) -> f64 {
        self.bonds.iter().map(|b| b.abs()).sum::<f64>() + self.l as f64 * (self.j_prime.abs() + g.abs())
    }

    pub fn apply(&self, g: f64, x: &[f64], y: &mut [f64]) {
        for (b, out) in y.iter_mut().enumerate() {
            let mut acc = self.diag[b] * x[b];
            let mut flips = 0.0;
            for j in 0..self.l {
                flips += x[b ^ (1 << j)];
            }
            acc -= g * flips;
            *out = acc;
        }
    }

    pub fn apply_complex(&self, g: f64, x: &[Complex64], y: &mut [Complex64]) {
        for (b, out) in y.iter_mut().enumerate() {
            let mut flips = Complex64::new(0.0, 0.0);
            for j in 0..self.l {
                flips += x[b ^ (1 << j)];
            }
            *out = x[b] * self.diag[b] - flips * g;
        }
    }

    /// Global spin flip prod_j X_j.
    pub fn parity<T: Copy>(&self, x: &[T], y: &mut [T]) {
        let mask = self.dim() - 1;
        for (b, out) in y.iter_mut().enumerate() {
            *out = x[b ^ mask];
        }
    }

    /// Dense matrix, for small-L checks.
    pub fn dense(&self, g: f64) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for c in 0..n {
            e.fill(0.0);
            e[c] = 1.0;
            self.apply(g, &e, &mut col);
            for r in 0..n {
                m[r][c] = col[r];
            }
        }
        m
    }
}
