//! Deterministic factorization of 64-bit integers.
//!
//! Trial division by the primes below 10^6 handles everything census-sized;
//! whatever survives is split with Pollard's rho (Brent's cycle finding) and
//! certified with Miller-Rabin on the fixed witness set that is exact below
//! 2^64.

use once_cell::sync::Lazy;

const TRIAL_LIMIT: u64 = 1_000_000;

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| {
    primal::Sieve::new(TRIAL_LIMIT as usize)
        .primes_from(0)
        .map(|p| p as u64)
        .collect()
});

// Witnesses {2..37} are sufficient for every n < 3.3 * 10^24.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
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

/// Deterministic primality test for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
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

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Finds a nontrivial factor of an odd composite `n` (Brent's variant).
fn rho_split(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = y;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot; replay one step at a time
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_split(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Prime factorization of `n >= 1` as sorted `(prime, exponent)` pairs.
pub(crate) fn factor_u64_pairs(mut n: u64) -> Vec<(u64, u32)> {
    debug_assert!(n >= 1);
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &p in SMALL_PRIMES.iter() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n == 1 {
        return out;
    }
    // Remaining cofactor has no prime factor below min(10^6, sqrt(n_original)).
    if n < TRIAL_LIMIT * TRIAL_LIMIT || is_prime(n) {
        out.push((n, 1));
        return out;
    }
    let mut large = Vec::new();
    split_large(n, &mut large);
    large.sort_unstable();
    for p in large {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_edge_cases() {
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(18446744073709551557)); // largest prime below 2^64
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime(18446744073709551615));
    }

    #[test]
    fn splits_semiprimes_beyond_trial_range() {
        assert_eq!(
            factor_u64_pairs(1470626929934143021),
            vec![(1206429347, 1), (1218991343, 1)]
        );
        let p = 4294967291u64; // largest prime below 2^32
        assert_eq!(factor_u64_pairs(p * p), vec![(p, 2)]);
        assert_eq!(
            factor_u64_pairs(1_000_003 * 1_000_033),
            vec![(1_000_003, 1), (1_000_033, 1)]
        );
    }

    #[test]
    fn small_composites() {
        assert_eq!(factor_u64_pairs(1), vec![]);
        assert_eq!(factor_u64_pairs(720), vec![(2, 4), (3, 2), (5, 1)]);
        assert_eq!(factor_u64_pairs(999_983), vec![(999_983, 1)]);
    }
}
