//! Exact integer arithmetic: factored integers, valuations, power-free
//! reduction of rationals, and unit groups modulo m.

mod factor;
mod units;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use factor::is_prime;
pub use units::{cyclotomic_image, unit_group, BaseField, CyclotomicSignature};

/// A nonzero integer stored as a sign and its prime factorization.
///
/// The factor list is kept sorted by prime with every exponent positive, so
/// structural equality is numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawFactored")]
pub struct FactoredInteger {
    sign: i8,
    factors: Vec<(u64, u32)>,
}

#[derive(Deserialize)]
struct RawFactored {
    sign: i8,
    factors: Vec<(u64, u32)>,
}

impl TryFrom<RawFactored> for FactoredInteger {
    type Error = Error;

    fn try_from(raw: RawFactored) -> Result<Self> {
        FactoredInteger::from_factors(raw.sign, raw.factors)
    }
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self {
            sign: 1,
            factors: Vec::new(),
        }
    }

    /// Builds a value from raw factors, validating primality and merging
    /// repeated primes. Zero exponents are dropped.
    pub fn from_factors(sign: i8, factors: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Parse(format!("sign must be 1 or -1, got {sign}")));
        }
        let mut fs: Vec<(u64, u32)> = factors.into_iter().filter(|&(_, e)| e > 0).collect();
        if let Some(&(p, _)) = fs.iter().find(|&&(p, _)| !is_prime(p)) {
            return Err(Error::Parse(format!("{p} is not prime")));
        }
        fs.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(fs.len());
        for (p, e) in fs {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(Self {
            sign,
            factors: merged,
        })
    }

    /// Internal constructor for factor lists already known to be canonical.
    pub(crate) fn from_sorted_unchecked(sign: i8, factors: Vec<(u64, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e > 0));
        Self { sign, factors }
    }

    pub fn from_u64(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Zero);
        }
        Ok(Self {
            sign: 1,
            factors: factor::factor_u64_pairs(m),
        })
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.factors.is_empty()
    }

    pub fn abs(&self) -> Self {
        Self {
            sign: 1,
            factors: self.factors.clone(),
        }
    }

    pub fn negate(&self) -> Self {
        Self {
            sign: -self.sign,
            factors: self.factors.clone(),
        }
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        Self {
            sign: self.sign * other.sign,
            factors: out,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self {
            sign: if k % 2 == 0 { 1 } else { self.sign },
            factors: self.factors.iter().map(|&(p, e)| (p, e * k)).collect(),
        }
    }

    /// True when `self` divides `other` (signs ignored).
    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|&(p, e)| other.valuation(p) >= e)
    }

    /// Absolute value as `u128`, or `None` on overflow.
    pub fn abs_u128(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p as u128)?;
            }
        }
        Some(acc)
    }

    /// Signed value, or `None` if it does not fit in an `i128`.
    pub fn value(&self) -> Option<i128> {
        let m = i128::try_from(self.abs_u128()?).ok()?;
        Some(self.sign as i128 * m)
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(&self) -> f64 {
        self.factors
            .iter()
            .map(|&(p, e)| e as f64 * (p as f64).ln())
            .sum()
    }

    /// Residue of the signed value modulo `m`, in `[0, m)`.
    pub fn rem_euclid(&self, m: u64) -> u64 {
        let mut acc = 1 % m;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc = ((acc as u128 * (p % m) as u128) % m as u128) as u64;
            }
        }
        if self.sign < 0 {
            (m - acc) % m
        } else {
            acc
        }
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => {
                if self.sign < 0 {
                    write!(f, "-")?;
                }
                let parts: Vec<String> = self
                    .factors
                    .iter()
                    .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
                    .collect();
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

/// Exact factorization of a nonzero integer.
pub fn factor(m: i64) -> Result<FactoredInteger> {
    if m == 0 {
        return Err(Error::Zero);
    }
    let mut f = FactoredInteger::from_u64(m.unsigned_abs())?;
    if m < 0 {
        f.sign = -1;
    }
    Ok(f)
}

pub fn valuation(m: &FactoredInteger, p: u64) -> u32 {
    m.valuation(p)
}

/// Canonical integer representative of `num/den` in Q^x/(Q^x)^n.
///
/// Exponents are reduced into `[0, n)`, a denominator prime `p^e` becomes
/// `p^(n-e)`, and the sign is dropped for odd `n` since -1 is then an n-th
/// power.
pub fn nth_power_free_reduce(
    num: &FactoredInteger,
    den: &FactoredInteger,
    n: u64,
) -> Result<FactoredInteger> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    let nn = n as i64;
    let mut exps: Vec<(u64, i64)> = num.factors.iter().map(|&(p, e)| (p, e as i64)).collect();
    exps.extend(den.factors.iter().map(|&(p, e)| (p, -(e as i64))));
    exps.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut i = 0;
    while i < exps.len() {
        let p = exps[i].0;
        let mut e = 0i64;
        while i < exps.len() && exps[i].0 == p {
            e += exps[i].1;
            i += 1;
        }
        let r = e.rem_euclid(nn);
        if r != 0 {
            out.push((p, r as u32));
        }
    }
    let sign = if n % 2 == 1 { 1 } else { num.sign * den.sign };
    Ok(FactoredInteger {
        sign,
        factors: out,
    })
}

/// Smallest prime factor of `n >= 2`.
pub fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    factor::factor_u64_pairs(n)[0].0
}

/// Distinct primes dividing `n >= 1`.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor::factor_u64_pairs(n).into_iter().map(|(p, _)| p).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factor::factor_u64_pairs(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fi(m: i64) -> FactoredInteger {
        factor(m).unwrap()
    }

    #[test]
    fn factor_examples() {
        assert_eq!(fi(12).factors(), &[(2, 2), (3, 1)]);
        assert_eq!(fi(12).sign(), 1);
        assert!(fi(1).is_one());
        let f = fi(-675);
        assert_eq!(f.sign(), -1);
        assert_eq!(f.factors(), &[(3, 3), (5, 2)]);
        assert_eq!(factor(0), Err(Error::Zero));
    }

    #[test]
    fn valuation_examples() {
        let m = fi(675);
        assert_eq!(valuation(&m, 3), 3);
        assert_eq!(valuation(&m, 5), 2);
        assert_eq!(valuation(&m, 7), 0);
    }

    #[test]
    fn reduce_examples() {
        let one = FactoredInteger::one();
        assert_eq!(nth_power_free_reduce(&fi(8), &one, 2).unwrap(), fi(2));
        assert_eq!(nth_power_free_reduce(&fi(-8), &one, 3).unwrap(), fi(1));
        assert_eq!(nth_power_free_reduce(&fi(48), &one, 4).unwrap(), fi(3));
        // 3/4 = 3 * (1/2)^2
        assert_eq!(nth_power_free_reduce(&fi(3), &fi(4), 2).unwrap(), fi(3));
        // 1/2 = 2 * (1/2)^2 ... and -1/2 stays negative for even n
        assert_eq!(nth_power_free_reduce(&fi(1), &fi(-2), 2).unwrap(), fi(-2));
        assert_eq!(nth_power_free_reduce(&fi(5), &one, 1), Err(Error::DegreeTooSmall(1)));
    }

    #[test]
    fn json_form() {
        let s = serde_json::to_string(&fi(12)).unwrap();
        assert_eq!(s, r#"{"sign":1,"factors":[[2,2],[3,1]]}"#);
        let back: FactoredInteger = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fi(12));
        assert!(serde_json::from_str::<FactoredInteger>(r#"{"sign":1,"factors":[[4,1]]}"#).is_err());
    }

    #[test]
    fn display_and_residues() {
        assert_eq!(fi(-675).to_string(), "-675");
        assert_eq!(fi(-7).rem_euclid(4), 1);
        assert_eq!(fi(10).rem_euclid(9), 1);
        assert_eq!(totient(9), 6);
        assert_eq!(smallest_prime_factor(91), 7);
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 10_000,
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_0001),
            ..ProptestConfig::default()
        })]

        #[test]
        fn factor_of_product_is_merge(a in 1i64..=3_000_000_000, b in -3_000_000_000i64..=3_000_000_000) {
            prop_assume!(b != 0);
            let prod = factor(a * b).unwrap();
            prop_assert_eq!(prod, fi(a).multiply(&fi(b)));
        }

        #[test]
        fn reduce_is_idempotent_and_class_preserving(
            num in -1_000_000i64..=1_000_000,
            den in 1i64..=10_000,
            n in 2u64..=12,
        ) {
            prop_assume!(num != 0);
            let (fnum, fden) = (fi(num), fi(den));
            let red = nth_power_free_reduce(&fnum, &fden, n).unwrap();
            prop_assert!(red.factors().iter().all(|&(_, e)| (e as u64) < n));
            prop_assert_eq!(&nth_power_free_reduce(&red, &FactoredInteger::one(), n).unwrap(), &red);
            // num/den divided by red has every exponent divisible by n
            for &(p, _) in fnum.factors().iter().chain(fden.factors()).chain(red.factors()) {
                let e = fnum.valuation(p) as i64 - fden.valuation(p) as i64 - red.valuation(p) as i64;
                prop_assert_eq!(e.rem_euclid(n as i64), 0);
            }
            if n % 2 == 0 {
                prop_assert_eq!(red.sign(), fnum.sign() * fden.sign());
            }
        }
    }
}
