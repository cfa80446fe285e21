//! Points of B mu_n over Q as Kummer classes `a` in Q^x/(Q^x)^n, and the
//! discriminant of the étale algebra `Q[t]/(t^n - a)`.
//!
//! Primes not dividing `n` are tame and contribute `n - gcd(v_p(a), n)`.
//! Primes dividing `n` are wild: exact only for `n = 2, 3` where the classical
//! quadratic and pure-cubic formulas apply, otherwise bracketed by
//! `[0, v_p(n^n a^(n-1))]`.

use serde::Serialize;

use crate::arith::{factor, gcd, nth_power_free_reduce, prime_divisors, smallest_prime_factor, FactoredInteger};
use crate::error::{Error, Result};

/// Canonical representative of a class in Q^x/(Q^x)^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KummerClass {
    n: u64,
    a: FactoredInteger,
    r: u64,
}

impl KummerClass {
    /// Wraps an already-reduced representative.
    pub(crate) fn from_reduced(n: u64, a: FactoredInteger) -> Self {
        debug_assert!(a.factors().iter().all(|&(_, e)| (e as u64) < n));
        KummerClass {
            n,
            a,
            r: smallest_prime_factor(n),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> &FactoredInteger {
        &self.a
    }

    /// Smallest prime factor of `n`.
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn is_trivial(&self) -> bool {
        self.a.is_one()
    }

    /// `n - n/r`: the smallest nonzero tame discriminant exponent.
    pub fn min_tame_exponent(&self) -> u64 {
        self.n - self.n / self.r
    }
}

/// Canonical class of `num/den`.
pub fn canonical(num: &FactoredInteger, den: &FactoredInteger, n: u64) -> Result<KummerClass> {
    let a = nth_power_free_reduce(num, den, n)?;
    Ok(KummerClass::from_reduced(n, a))
}

/// Canonical class of an integer.
pub fn canonical_int(a: i64, n: u64) -> Result<KummerClass> {
    canonical(&factor(a)?, &FactoredInteger::one(), n)
}

/// Parses `"-8"` or `"3/4"` into a numerator/denominator pair.
pub fn parse_rational(s: &str) -> Result<(FactoredInteger, FactoredInteger)> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let (num, den) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok((factor(num)?, factor(den)?))
}

/// Capelli's criterion: `t^n - a` is irreducible over Q iff `a` is not a
/// p-th power for any prime `p | n`, and `a` is not in `-4 Q^4` when `4 | n`.
pub fn is_irreducible(cls: &KummerClass) -> bool {
    let a = &cls.a;
    for p in prime_divisors(cls.n) {
        let sign_ok = p != 2 || a.sign() > 0;
        if sign_ok && a.factors().iter().all(|&(_, e)| e as u64 % p == 0) {
            return false;
        }
    }
    if cls.n % 4 == 0
        && a.sign() < 0
        && a.factors()
            .iter()
            .all(|&(q, e)| if q == 2 { e % 4 == 2 } else { e % 4 == 0 })
        && a.valuation(2) % 4 == 2
    {
        return false;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact wild exponents (n = 2, 3 only).
    Exact,
    /// Wild exponents dropped.
    Tame,
    /// Wild exponents bracketed.
    Interval,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "tame" => Ok(Mode::Tame),
            "interval" => Ok(Mode::Interval),
            _ => Err(Error::Parse(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeKind {
    Tame,
    Wild,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Exponent {
    Exact(u32),
    Interval { lo: u32, hi: u32 },
}

impl Exponent {
    pub fn lo(self) -> u32 {
        match self {
            Exponent::Exact(e) => e,
            Exponent::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(self) -> u32 {
        match self {
            Exponent::Exact(e) => e,
            Exponent::Interval { hi, .. } => hi,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Exponent::Exact(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalDiscData {
    pub p: u64,
    pub kind: PrimeKind,
    /// `gcd(v_p(a), n)` at tame primes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tame_d: Option<u64>,
    pub exponent: Exponent,
}

/// Local discriminant exponent at a prime not dividing `n`.
pub fn tame_local(cls: &KummerClass, p: u64) -> Result<LocalDiscData> {
    if cls.n % p == 0 {
        return Err(Error::WildPrime { p, n: cls.n });
    }
    let d = gcd(cls.a.valuation(p) as u64, cls.n);
    Ok(LocalDiscData {
        p,
        kind: PrimeKind::Tame,
        tame_d: Some(d),
        exponent: Exponent::Exact((cls.n - d) as u32),
    })
}

/// `v_p(n^n a^(n-1))`, the valuation of the polynomial discriminant.
pub fn wild_upper_bound(cls: &KummerClass, p: u64) -> u32 {
    let vn = factor(cls.n as i64).expect("n >= 2").valuation(p);
    cls.n as u32 * vn + (cls.n as u32 - 1) * cls.a.valuation(p)
}

/// Local discriminant exponent at a prime dividing `n`.
///
/// For exact n = 2, 3 the whole p-part is returned, including the share of
/// `a^(n-1)` when `p | a`: `a = 2` gives 3 (disc 8) and `3 | a` gives 5 for
/// cubes (disc `27 h^2 k^2` with `3 | hk`).
pub fn wild_local(cls: &KummerClass, p: u64, mode: Mode) -> Result<LocalDiscData> {
    if cls.n % p != 0 {
        return Err(Error::TamePrime { p, n: cls.n });
    }
    let exponent = match mode {
        Mode::Exact => Exponent::Exact(exact_wild_exponent(cls)?),
        Mode::Interval => Exponent::Interval {
            lo: 0,
            hi: wild_upper_bound(cls, p),
        },
        Mode::Tame => Exponent::Exact(0),
    };
    Ok(LocalDiscData {
        p,
        kind: PrimeKind::Wild,
        tame_d: None,
        exponent,
    })
}

fn exact_wild_exponent(cls: &KummerClass) -> Result<u32> {
    let a = &cls.a;
    match cls.n {
        2 => Ok(if a.valuation(2) > 0 {
            3
        } else if a.rem_euclid(4) == 1 {
            0
        } else {
            2
        }),
        3 => Ok(if a.valuation(3) > 0 {
            5
        } else {
            let r = a.rem_euclid(9);
            if r * r % 9 == 1 {
                1
            } else {
                3
            }
        }),
        n => Err(Error::ExactUnsupported(n)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscValue {
    Exact(FactoredInteger),
    Interval { lo: FactoredInteger, hi: FactoredInteger },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    TameExactWildInterval,
}

/// Absolute discriminant of `Q[t]/(t^n - a)` with its per-prime data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantResult {
    pub value: DiscValue,
    pub exactness: Exactness,
    pub locals: Vec<LocalDiscData>,
}

impl DiscriminantResult {
    pub fn exact(&self) -> Option<&FactoredInteger> {
        match &self.value {
            DiscValue::Exact(v) => Some(v),
            DiscValue::Interval { .. } => None,
        }
    }

    pub fn lower(&self) -> &FactoredInteger {
        match &self.value {
            DiscValue::Exact(v) => v,
            DiscValue::Interval { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &FactoredInteger {
        match &self.value {
            DiscValue::Exact(v) => v,
            DiscValue::Interval { hi, .. } => hi,
        }
    }

    pub fn local(&self, p: u64) -> Option<&LocalDiscData> {
        self.locals.iter().find(|l| l.p == p)
    }
}

pub fn discriminant(cls: &KummerClass, mode: Mode) -> Result<DiscriminantResult> {
    if mode == Mode::Exact && !(2..=3).contains(&cls.n) {
        return Err(Error::ExactUnsupported(cls.n));
    }
    let mut locals = Vec::new();
    for p in cls.a.primes().filter(|&p| cls.n % p != 0) {
        locals.push(tame_local(cls, p)?);
    }
    if mode != Mode::Tame {
        for p in prime_divisors(cls.n) {
            locals.push(wild_local(cls, p, mode)?);
        }
    }
    locals.sort_by_key(|l| l.p);
    let product = |pick: fn(Exponent) -> u32| {
        FactoredInteger::from_sorted_unchecked(
            1,
            locals
                .iter()
                .map(|l| (l.p, pick(l.exponent)))
                .filter(|&(_, e)| e > 0)
                .collect(),
        )
    };
    let (value, exactness) = match mode {
        Mode::Exact => (DiscValue::Exact(product(Exponent::lo)), Exactness::Exact),
        Mode::Tame => (DiscValue::Exact(product(Exponent::lo)), Exactness::TameExactWildInterval),
        Mode::Interval => (
            DiscValue::Interval {
                lo: product(Exponent::lo),
                hi: product(Exponent::hi),
            },
            Exactness::TameExactWildInterval,
        ),
    };
    Ok(DiscriminantResult {
        value,
        exactness,
        locals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cls(a: i64, n: u64) -> KummerClass {
        canonical_int(a, n).unwrap()
    }

    fn disc(a: i64, n: u64, mode: Mode) -> i128 {
        discriminant(&cls(a, n), mode).unwrap().exact().unwrap().value().unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert!(cls(1, 5).is_trivial());
        assert_eq!(cls(32, 4).a().value(), Some(2));
        let (num, den) = parse_rational("3/4").unwrap();
        assert_eq!(canonical(&num, &den, 2).unwrap().a().value(), Some(3));
        assert_eq!(canonical_int(0, 2), Err(Error::Zero));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn irreducibility_examples() {
        assert!(!is_irreducible(&cls(4, 4)));
        assert!(!is_irreducible(&cls(-4, 4)));
        assert!(is_irreducible(&cls(2, 3)));
        assert!(is_irreducible(&cls(72, 6)));
        assert!(!is_irreducible(&cls(-64, 8))); // -4 * 2^4
        assert!(is_irreducible(&cls(-4, 2)));
        assert!(!is_irreducible(&cls(1, 7)));
        assert!(!is_irreducible(&cls(-27, 3)));
    }

    #[test]
    fn tame_examples() {
        let l = tame_local(&cls(5, 3), 5).unwrap();
        assert_eq!(l.exponent, Exponent::Exact(2));
        assert_eq!(tame_local(&cls(9, 4), 3).unwrap().exponent, Exponent::Exact(2));
        assert_eq!(tame_local(&cls(7, 3), 5).unwrap().exponent, Exponent::Exact(0));
        assert_eq!(tame_local(&cls(7, 3), 3), Err(Error::WildPrime { p: 3, n: 3 }));
    }

    #[test]
    fn wild_examples() {
        let e = |a, n, p| wild_local(&cls(a, n), p, Mode::Exact).unwrap().exponent;
        assert_eq!(e(5, 2, 2), Exponent::Exact(0));
        assert_eq!(e(3, 2, 2), Exponent::Exact(2));
        assert_eq!(e(5, 3, 3), Exponent::Exact(3));
        assert_eq!(e(10, 3, 3), Exponent::Exact(1));
        assert_eq!(wild_local(&cls(7, 5), 5, Mode::Exact), Err(Error::ExactUnsupported(5)));
        assert_eq!(wild_local(&cls(7, 5), 3, Mode::Exact), Err(Error::TamePrime { p: 3, n: 5 }));
        // v_2(4^4 * 2^3) = 11
        assert_eq!(
            wild_local(&cls(2, 4), 2, Mode::Interval).unwrap().exponent,
            Exponent::Interval { lo: 0, hi: 11 }
        );
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(disc(5, 2, Mode::Exact), 5);
        assert_eq!(disc(5, 3, Mode::Exact), 675);
        assert_eq!(disc(-1, 2, Mode::Exact), 4);
        assert_eq!(disc(2, 3, Mode::Exact), 108);
        assert_eq!(disc(10, 3, Mode::Exact), 300);
        assert_eq!(disc(2, 2, Mode::Exact), 8);
        assert_eq!(disc(3, 3, Mode::Exact), 243);
        assert_eq!(disc(1, 2, Mode::Exact), 1);
        assert_eq!(discriminant(&cls(7, 5), Mode::Exact), Err(Error::ExactUnsupported(5)));
        let tame = discriminant(&cls(5, 3), Mode::Tame).unwrap();
        assert_eq!(tame.exactness, Exactness::TameExactWildInterval);
        assert_eq!(tame.exact().unwrap().value(), Some(25));
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 2_000,
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_0002),
            ..ProptestConfig::default()
        })]

        #[test]
        fn squarefree_coprime_tame_part_is_power(
            support in proptest::collection::btree_set(
                proptest::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]),
                0..5,
            ),
            n in 2u64..=10,
        ) {
            let primes: Vec<u64> = support.into_iter().filter(|p| n % p != 0).collect();
            let a: i64 = primes.iter().product::<u64>() as i64;
            let f = factor(a).unwrap();
            let d = discriminant(&cls(a, n), Mode::Tame).unwrap();
            prop_assert_eq!(d.exact().unwrap(), &f.pow(n as u32 - 1));
        }

        #[test]
        fn tame_exponents_lie_in_band(a in -1_000_000i64..=1_000_000, n in 2u64..=12) {
            prop_assume!(a != 0);
            let c = cls(a, n);
            for p in c.a().primes().filter(|p| n % p != 0) {
                let e = tame_local(&c, p).unwrap().exponent.lo() as u64;
                prop_assert!(e >= c.min_tame_exponent() && e < n);
            }
        }

        #[test]
        fn representative_choice_is_irrelevant(a in 1i64..=2_000, b in 1i64..=30, n in 2u64..=6) {
            let base = cls(a, n);
            let other = cls(a * b.pow(n as u32), n);
            prop_assert_eq!(&base, &other);
            for mode in [Mode::Tame, Mode::Interval] {
                prop_assert_eq!(discriminant(&base, mode).unwrap(), discriminant(&other, mode).unwrap());
            }
        }

        #[test]
        fn tame_divides_exact_divides_upper(a in -50_000i64..=50_000, n in 2u64..=3) {
            prop_assume!(a != 0);
            let c = cls(a, n);
            let tame = discriminant(&c, Mode::Tame).unwrap();
            let exact = discriminant(&c, Mode::Exact).unwrap();
            let interval = discriminant(&c, Mode::Interval).unwrap();
            prop_assert!(tame.exact().unwrap().divides(exact.exact().unwrap()));
            prop_assert!(exact.exact().unwrap().divides(interval.upper()));
            prop_assert_eq!(tame.exact().unwrap(), interval.lower());
        }
    }
}
