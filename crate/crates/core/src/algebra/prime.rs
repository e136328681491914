//! Deterministic primality testing and prime search for 64-bit moduli.

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin with a base set that is exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least prime strictly greater than `c`.
pub fn smallest_prime_gt(c: u64) -> u64 {
    let mut q = c + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve(limit: usize) -> Vec<bool> {
        let mut is = vec![true; limit + 1];
        is[0] = false;
        is[1] = false;
        let mut i = 2;
        while i * i <= limit {
            if is[i] {
                let mut j = i * i;
                while j <= limit {
                    is[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        is
    }

    #[test]
    fn spec_examples() {
        assert_eq!(smallest_prime_gt(1), 2);
        assert_eq!(smallest_prime_gt(4), 5);
        assert_eq!(smallest_prime_gt(120), 127);
    }

    #[test]
    fn agrees_with_sieve() {
        let is = sieve(100_000);
        for n in 0..=100_000u64 {
            assert_eq!(is_prime(n), is[n as usize], "n = {n}");
        }
        // smallest_prime_gt against the sieve up to 2c
        for c in 1..5000u64 {
            let want = (c + 1..=2 * c + 2).find(|&x| is[x as usize]).unwrap();
            assert_eq!(smallest_prime_gt(c), want);
        }
    }

    #[test]
    fn large_known_values() {
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime((1 << 61) + 1));
        assert!(is_prime(18_446_744_073_709_551_557));
        // strong pseudoprime to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
    }
}
