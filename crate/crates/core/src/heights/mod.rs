//! Heights on B mu_n(Q): the vector-bundle height `½ log|Δ|`, Darda's
//! quasi-discriminant height built from local factors, and raising-function
//! heights, together with edd, `D_{a'}` and the a-invariant it defines.
//!
//! All heights are natural-log scale.

mod sectors;

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{prime_divisors, smallest_prime_factor, FactoredInteger};
use crate::error::{Error, Result};
use crate::kummer::{canonical, discriminant, tame_local, wild_local, DiscriminantResult, KummerClass, Mode};

pub use sectors::{abc_invariants, expected_a, index_raising_function, sectors, RaisingFunction, SectorTable};

/// A product `∏ p^{e_p}` with rational exponents, kept exact.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PowerProduct(BTreeMap<u64, Ratio<i64>>);

impl PowerProduct {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn prime_power(p: u64, e: Ratio<i64>) -> Self {
        let mut out = Self::one();
        out.mul_prime(p, e);
        out
    }

    pub fn mul_prime(&mut self, p: u64, e: Ratio<i64>) {
        let slot = self.0.entry(p).or_insert_with(|| Ratio::from_integer(0));
        *slot += e;
        if *slot == Ratio::from_integer(0) {
            self.0.remove(&p);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, &e) in &other.0 {
            out.mul_prime(p, e);
        }
        out
    }

    pub fn pow(&self, k: Ratio<i64>) -> Self {
        let mut out = Self::one();
        for (&p, &e) in &self.0 {
            out.mul_prime(p, e * k);
        }
        out
    }

    pub fn exponent(&self, p: u64) -> Ratio<i64> {
        self.0.get(&p).copied().unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Ratio<i64>)> + '_ {
        self.0.iter().map(|(&p, &e)| (p, e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ln(&self) -> f64 {
        self.0
            .iter()
            .map(|(&p, e)| (*e.numer() as f64 / *e.denom() as f64) * (p as f64).ln())
            .sum()
    }

    /// The positive integer this product equals, if every exponent is a
    /// nonnegative integer.
    pub fn to_integer(&self) -> Option<FactoredInteger> {
        let mut fs = Vec::with_capacity(self.0.len());
        for (&p, e) in &self.0 {
            if !e.is_integer() || *e.numer() < 0 {
                return None;
            }
            fs.push((p, *e.numer() as u32));
        }
        Some(FactoredInteger::from_sorted_unchecked(1, fs))
    }

    pub fn from_integer(m: &FactoredInteger) -> Self {
        Self(
            m.factors()
                .iter()
                .map(|&(p, e)| (p, Ratio::from_integer(e as i64)))
                .collect(),
        )
    }
}

/// `base^power` with an integer base and rational power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactRoot {
    pub base: FactoredInteger,
    #[serde(serialize_with = "crate::ratio_string")]
    pub power: Ratio<u64>,
}

impl ExactRoot {
    pub fn ln(&self) -> f64 {
        *self.power.numer() as f64 / *self.power.denom() as f64 * self.base.ln_abs()
    }
}

/// A height on the natural-log scale. Interval modes set `log_upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightValue {
    pub log_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_upper: Option<f64>,
    pub exact_form: Option<ExactRoot>,
}

impl HeightValue {
    fn exact(base: FactoredInteger, power: Ratio<u64>) -> Self {
        let root = ExactRoot { base, power };
        Self {
            log_value: root.ln(),
            log_upper: None,
            exact_form: Some(root),
        }
    }

    fn from_disc(d: &DiscriminantResult, power: Ratio<u64>) -> Self {
        match d.exact() {
            Some(v) => Self::exact(v.clone(), power),
            None => {
                let scale = *power.numer() as f64 / *power.denom() as f64;
                Self {
                    log_value: scale * d.lower().ln_abs(),
                    log_upper: Some(scale * d.upper().ln_abs()),
                    exact_form: None,
                }
            }
        }
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Closed real interval; degenerate when the mode is exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Place {
    Finite(u64),
    Infinite,
}

/// `½ log|Δ|`.
pub fn eszb_height(cls: &KummerClass, mode: Mode) -> Result<HeightValue> {
    let d = discriminant(cls, mode)?;
    Ok(HeightValue::from_disc(&d, Ratio::new(1, 2)))
}

/// `n^2 - n^2/r`
pub fn darda_degree(n: u64) -> u64 {
    let r = smallest_prime_factor(n);
    n * n - n * n / r
}

/// One local factor of Darda's height, as an exact power product.
/// `upper` is present when the wild exponent is only bracketed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFactor {
    pub place: Place,
    pub lower: PowerProduct,
    pub upper: Option<PowerProduct>,
}

impl LocalFactor {
    pub fn value(&self) -> f64 {
        self.lower.ln().exp()
    }

    pub fn upper_value(&self) -> f64 {
        self.upper.as_ref().unwrap_or(&self.lower).ln().exp()
    }
}

fn local_disc_exponent(cls: &KummerClass, p: u64, mode: Mode) -> Result<(u32, u32)> {
    let data = if cls.n() % p == 0 {
        wild_local(cls, p, mode)?
    } else {
        tame_local(cls, p)?
    };
    Ok((data.exponent.lo(), data.exponent.hi()))
}

/// `fdisc_v(a)`: `|a|_v^{1/n} · (q_v^{e_v})^{1/(n^2 - n^2/r)}` at finite
/// places and `|a|^{1/n}` at the real place.
pub fn darda_local(cls: &KummerClass, place: Place, mode: Mode) -> Result<LocalFactor> {
    let n = cls.n() as i64;
    match place {
        Place::Infinite => {
            let mut lower = PowerProduct::one();
            for &(p, e) in cls.a().factors() {
                lower.mul_prime(p, Ratio::new(e as i64, n));
            }
            Ok(LocalFactor {
                place,
                lower,
                upper: None,
            })
        }
        Place::Finite(p) => {
            let big_n = darda_degree(cls.n()) as i64;
            let (lo, hi) = local_disc_exponent(cls, p, mode)?;
            let abs_part = Ratio::new(-(cls.a().valuation(p) as i64), n);
            let at = |e: u32| PowerProduct::prime_power(p, abs_part + Ratio::new(e as i64, big_n));
            Ok(LocalFactor {
                place,
                lower: at(lo),
                upper: (lo != hi).then(|| at(hi)),
            })
        }
    }
}

/// Places where some local factor can differ from 1.
fn relevant_places(cls: &KummerClass) -> Vec<Place> {
    let mut ps: Vec<u64> = cls.a().primes().chain(prime_divisors(cls.n())).collect();
    ps.sort_unstable();
    ps.dedup();
    let mut out: Vec<Place> = ps.into_iter().map(Place::Finite).collect();
    out.push(Place::Infinite);
    out
}

/// The product of all local factors, as exact lower and upper power products.
pub fn darda_product(cls: &KummerClass, mode: Mode) -> Result<(PowerProduct, PowerProduct)> {
    let mut lo = PowerProduct::one();
    let mut hi = PowerProduct::one();
    for place in relevant_places(cls) {
        let f = darda_local(cls, place, mode)?;
        hi = hi.mul(f.upper.as_ref().unwrap_or(&f.lower));
        lo = lo.mul(&f.lower);
    }
    Ok((lo, hi))
}

/// `H^Δ(x) = ∏_v fdisc_v(x)`; its `(n^2 - n^2/r)`-th power is `|Δ|`.
pub fn darda_global(cls: &KummerClass, mode: Mode) -> Result<HeightValue> {
    let (lo, hi) = darda_product(cls, mode)?;
    let big_n = darda_degree(cls.n());
    let to_disc = |pp: &PowerProduct| {
        pp.pow(Ratio::from_integer(big_n as i64))
            .to_integer()
            .expect("product formula leaves integral discriminant exponents")
    };
    if lo == hi {
        Ok(HeightValue::exact(to_disc(&lo), Ratio::new(1, big_n)))
    } else {
        Ok(HeightValue {
            log_value: lo.ln(),
            log_upper: Some(hi.ln()),
            exact_form: None,
        })
    }
}

/// Which local weights a raising height uses.
#[derive(Clone, Debug, PartialEq)]
pub enum RaisingDatum {
    /// `c_v` = local discriminant exponent, `c_∞ = 0`.
    Discriminant,
    /// `c_v = c(v_p(a) mod n)` from a sector raising function, `c_∞ = 0`.
    Sector(RaisingFunction),
}

/// `Height_c(x) = ∏_v q_v^{c_v(x_v)}`.
pub fn raising_height(cls: &KummerClass, datum: &RaisingDatum, mode: Mode) -> Result<HeightValue> {
    match datum {
        RaisingDatum::Discriminant => {
            let d = discriminant(cls, mode)?;
            Ok(HeightValue::from_disc(&d, Ratio::from_integer(1)))
        }
        RaisingDatum::Sector(c) => {
            if c.n != cls.n() {
                return Err(Error::Unsupported(format!(
                    "raising function is for n={}, class has n={}",
                    c.n,
                    cls.n()
                )));
            }
            let mut pp = PowerProduct::one();
            for &(p, e) in cls.a().factors() {
                let w = c.value(e as u64 % c.n);
                pp.mul_prime(p, Ratio::new(*w.numer() as i64, *w.denom() as i64));
            }
            let exact_form = pp.to_integer().map(|base| ExactRoot {
                base,
                power: Ratio::from_integer(1),
            });
            Ok(HeightValue {
                log_value: pp.ln(),
                log_upper: None,
                exact_form,
            })
        }
    }
}

/// `Σ log p` over the primes ramified in the torsor. With bracketed wild
/// exponents the primes that may or may not ramify widen the interval.
pub fn edd(cls: &KummerClass, mode: Mode) -> Result<Bounds> {
    let d = discriminant(cls, mode)?;
    let mut b = Bounds::point(0.0);
    for l in &d.locals {
        let lp = (l.p as f64).ln();
        if l.exponent.lo() > 0 {
            b.lo += lp;
        }
        if l.exponent.hi() > 0 {
            b.hi += lp;
        }
    }
    Ok(b)
}

/// `D_{a'}(x) = a' · height(x) - edd(x)` (with `height = ½ log|Δ|`).
pub fn d_aprime(cls: &KummerClass, a_prime: f64, mode: Mode) -> Result<Bounds> {
    let h = eszb_height(cls, mode)?;
    let h_hi = h.log_upper.unwrap_or(h.log_value);
    let e = edd(cls, mode)?;
    let (h_lo, h_hi) = if a_prime >= 0.0 {
        (h.log_value, h_hi)
    } else {
        (h_hi, h.log_value)
    };
    Ok(Bounds {
        lo: a_prime * h_lo - e.hi,
        hi: a_prime * h_hi - e.lo,
    })
}

/// `2 / (n - n/r)`.
pub fn a_eszb_closed(n: u64) -> Result<Ratio<u64>> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    let r = smallest_prime_factor(n);
    Ok(Ratio::new(2, n - n / r))
}

/// `Σ_{p | n} log p`: how far the wild places alone can push `D_{a'}`
/// below zero at the threshold `a'`.
pub fn wild_bound(n: u64) -> f64 {
    prime_divisors(n).into_iter().map(|p| (p as f64).ln()).sum()
}

/// First `k` primes not dividing `n`.
pub fn witness_primes(n: u64, k: usize) -> Vec<u64> {
    primal::Primes::all()
        .map(|p| p as u64)
        .filter(|p| n % p != 0)
        .take(k)
        .collect()
}

/// Tame `D_{a'}` at `a = (p_1 ··· p_k)^{n/r}`.
pub fn a_eszb_witness(n: u64, a_prime: f64, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    let r = smallest_prime_factor(n);
    let e = (n / r) as u32;
    let a = FactoredInteger::from_factors(1, witness_primes(n, k).into_iter().map(|p| (p, e)))?;
    let cls = canonical(&a, &FactoredInteger::one(), n)?;
    Ok(d_aprime(&cls, a_prime, Mode::Tame)?.lo)
}
