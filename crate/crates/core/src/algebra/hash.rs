//! k-wise independent hash families: random polynomials of degree k-1 over F_p.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{mul_m61, PrimeField, MERSENNE_61};
use crate::error::Error;
use crate::SEED_BITS;

/// A k-wise independent hash `[n] -> [m]`.
///
/// The polynomial is evaluated over F_p with p = 2^61 - 1 and reduced mod m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KWiseHash {
    coeffs: Vec<u64>,
    field: PrimeField,
    n: u64,
    m: u64,
    seed: u64,
}

impl KWiseHash {
    pub fn new(k: usize, n: u64, m: u64, seed: u64) -> Result<Self, Error> {
        if k < 2 || n == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "hash needs k >= 2, n >= 1, m >= 1 (got k={k}, n={n}, m={m})"
            )));
        }
        let field = PrimeField::mersenne61();
        let p = field.modulus();
        if n > p || m > p {
            return Err(Error::InvalidParameter("hash domain or range exceeds 2^61 - 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..k).map(|_| rng.gen_range(0..p)).collect();
        Ok(KWiseHash { coeffs, field, n, m, seed })
    }

    /// Builds a hash from explicit coefficients (constant term first) over F_p.
    pub fn from_coefficients(coeffs: Vec<u64>, p: u64, n: u64, m: u64) -> Result<Self, Error> {
        let field = PrimeField::new(p)?;
        if coeffs.len() < 2 || n == 0 || m == 0 || n > p {
            return Err(Error::InvalidParameter("bad explicit hash".into()));
        }
        let coeffs = coeffs.into_iter().map(|c| field.reduce(c)).collect();
        Ok(KWiseHash { coeffs, field, n, m, seed: 0 })
    }

    pub fn independence(&self) -> usize {
        self.coeffs.len()
    }

    pub fn domain(&self) -> u64 {
        self.n
    }

    pub fn range(&self) -> u64 {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn eval(&self, x: u64) -> Result<u64, Error> {
        if x >= self.n {
            return Err(Error::OutOfDomain { x, n: self.n });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain check, for hot loops with trusted input.
    #[inline]
    pub fn eval_unchecked(&self, x: u64) -> u64 {
        let f = &self.field;
        let mut acc = 0;
        if f.modulus() == MERSENNE_61 {
            let x = x % MERSENNE_61;
            for &c in self.coeffs.iter().rev() {
                acc = mul_m61(acc, x) + c;
                if acc >= MERSENNE_61 {
                    acc -= MERSENNE_61;
                }
            }
        } else {
            for &c in self.coeffs.iter().rev() {
                acc = f.add(f.mul(acc, x), c);
            }
        }
        if self.m.is_power_of_two() {
            acc & (self.m - 1)
        } else {
            acc % self.m
        }
    }

    /// k·⌈log₂ p⌉ coefficient bits plus the seed.
    pub fn bits(&self) -> u64 {
        self.coeffs.len() as u64 * self.field.element_bits() + SEED_BITS
    }

    /// Bits charged for a hash of independence `k` built by [`KWiseHash::new`].
    pub fn nominal_bits(k: usize) -> u64 {
        k as u64 * PrimeField::mersenne61().element_bits() + SEED_BITS
    }
}
