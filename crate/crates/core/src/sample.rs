//! Seeded random polynomials used to probe identities off the coordinate frames.

use cnalg_field::{BigInt, BigRational, Monomial, Poly, RatFunc};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Matrix, Vector};

pub const DEFAULT_SEED: u64 = 20240917;
/// Random sections per check.
pub const SAMPLES: usize = 2;

pub struct Sampler {
    rng: ChaCha8Rng,
    dim: usize,
}

impl Sampler {
    pub fn new(seed: u64, dim: usize) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
        }
    }

    /// Polynomial of total degree ≤ 2 with coefficients in [-3, 3], at most four terms.
    pub fn poly(&mut self) -> RatFunc {
        let mut terms = Vec::new();
        let count = self.rng.gen_range(1..=4);
        for _ in 0..count {
            let mut exps = vec![0u32; self.dim];
            let degree = self.rng.gen_range(0..=2);
            for _ in 0..degree {
                let v = self.rng.gen_range(0..self.dim);
                exps[v] += 1;
            }
            let c: i64 = self.rng.gen_range(-3..=3);
            if c != 0 {
                terms.push((Monomial::from_exponents(&exps), BigRational::from_integer(BigInt::from(c))));
            }
        }
        let p = Poly::from_terms(terms);
        if p.is_zero() {
            RatFunc::one()
        } else {
            RatFunc::from_poly(p)
        }
    }

    pub fn vector(&mut self, len: usize) -> Vector {
        (0..len).map(|_| self.poly()).collect()
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.poly())
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}
