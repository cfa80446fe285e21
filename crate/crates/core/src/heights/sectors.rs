use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{gcd, smallest_prime_factor};
use crate::error::{Error, Result};

/// Twisted sectors `j = 1..n-1` of B mu_n with their index `n - gcd(j, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorTable {
    pub n: u64,
    pub entries: Vec<(u64, u64)>,
}

impl SectorTable {
    pub fn min_index(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c).min().unwrap_or(0)
    }

    pub fn minimal_sectors(&self) -> Vec<u64> {
        let m = self.min_index();
        self.entries.iter().filter(|&&(_, c)| c == m).map(|&(j, _)| j).collect()
    }
}

pub fn sectors(n: u64) -> Result<SectorTable> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    Ok(SectorTable {
        n,
        entries: (1..n).map(|j| (j, n - gcd(j, n))).collect(),
    })
}

/// Weights on the sectors `Z/nZ`; the untwisted sector 0 always has weight 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaisingFunction {
    pub n: u64,
    values: Vec<Ratio<u64>>,
}

impl RaisingFunction {
    /// `twisted[j-1]` is the weight of sector `j`.
    pub fn new(n: u64, twisted: Vec<Ratio<u64>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegreeTooSmall(n));
        }
        if twisted.len() as u64 != n - 1 {
            return Err(Error::Unsupported(format!(
                "raising function for n={n} needs {} twisted values, got {}",
                n - 1,
                twisted.len()
            )));
        }
        let mut values = vec![Ratio::from_integer(0)];
        values.extend(twisted);
        Ok(Self { n, values })
    }

    pub fn value(&self, j: u64) -> Ratio<u64> {
        self.values[(j % self.n) as usize]
    }
}

/// The raising function whose weights are the local discriminant exponents,
/// i.e. the index `n - gcd(j, n)`.
pub fn index_raising_function(n: u64) -> RaisingFunction {
    let twisted = (1..n).map(|j| Ratio::from_integer(n - gcd(j, n))).collect();
    RaisingFunction::new(n, twisted).expect("n >= 2")
}

/// `a(c) = max 1/c(Y)` over twisted sectors and `b(c)` = number of sectors
/// attaining it.
pub fn abc_invariants(c: &RaisingFunction) -> Result<(Ratio<u64>, usize)> {
    let twisted = &c.values[1..];
    if let Some(j) = twisted.iter().position(|v| *v == Ratio::from_integer(0)) {
        return Err(Error::VanishingSector(j as u64 + 1));
    }
    let min = *twisted.iter().min().expect("n >= 2");
    let b = twisted.iter().filter(|&&v| v == min).count();
    Ok((min.recip(), b))
}

/// `1/(n - n/r)`, the expected a(c) for the index raising function.
pub fn expected_a(n: u64) -> Ratio<u64> {
    Ratio::new(1, n - n / smallest_prime_factor(n))
}
