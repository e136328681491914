//! Arithmetic in a prime field F_q.

use super::prime::is_prime;
use crate::error::Error;

/// The Mersenne prime 2^61 - 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// A prime field F_q with `q < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

#[inline]
pub(crate) fn mul_m61(a: u64, b: u64) -> u64 {
    let z = a as u128 * b as u128;
    let lo = (z as u64) & MERSENNE_61;
    let hi = (z >> 61) as u64;
    let s = lo + hi;
    if s >= MERSENNE_61 {
        s - MERSENNE_61
    } else {
        s
    }
}

impl PrimeField {
    /// Checks primality of `q` before accepting it.
    pub fn new(q: u64) -> Result<Self, Error> {
        if q >= 1 << 63 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    pub const fn mersenne61() -> Self {
        PrimeField { q: MERSENNE_61 }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Bits needed to store one element: ⌈log₂ q⌉.
    pub fn element_bits(&self) -> u64 {
        crate::ceil_log2(self.q)
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.q
    }

    /// Maps a signed integer to its residue.
    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    /// Symmetric representative in (-q/2, q/2].
    pub fn to_signed(&self, x: u64) -> i64 {
        if x > self.q / 2 {
            x as i64 - self.q as i64
        } else {
            x as i64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.q == MERSENNE_61 {
            mul_m61(a, b)
        } else if self.q <= 1 << 32 {
            a * b % self.q
        } else {
            ((a as u128 * b as u128) % self.q as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64, Error> {
        if a % self.q == 0 {
            return Err(Error::InverseOfZero);
        }
        Ok(self.pow(a, self.q - 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_examples() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.mul(3, 5), 1);
        assert_eq!(f7.inv(3).unwrap(), 5);
        assert!(f7.inv(0).is_err());
        let f31 = PrimeField::new(31).unwrap();
        assert_eq!(f31.add(30, 2), 1);
        assert!(PrimeField::new(12).is_err());
        assert_eq!(PrimeField::new(127).unwrap().element_bits(), 7);
    }

    #[test]
    fn signed_roundtrip() {
        let f = PrimeField::new(11).unwrap();
        for x in -5..=5i64 {
            assert_eq!(f.to_signed(f.from_i64(x)), x);
        }
    }

    fn fields() -> impl Strategy<Value = PrimeField> {
        prop_oneof![
            Just(PrimeField::new(2).unwrap()),
            Just(PrimeField::new(7).unwrap()),
            Just(PrimeField::new(65_537).unwrap()),
            Just(PrimeField::new(4_294_967_311).unwrap()),
            Just(PrimeField::mersenne61()),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms(f in fields(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let (a, b, c) = (f.reduce(a), f.reduce(b), f.reduce(c));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.add(f.sub(a, b), b), a);
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }

        #[test]
        fn mersenne_matches_generic(a in 0..MERSENNE_61, b in 0..MERSENNE_61) {
            let f = PrimeField::mersenne61();
            let want = ((a as u128 * b as u128) % MERSENNE_61 as u128) as u64;
            prop_assert_eq!(f.mul(a, b), want);
        }
    }
}
