use crate::error::{Error, Result};

/// Sorted primes up to a limit, skipping a fixed set of excluded primes
/// (the wild primes of the current census).
pub struct PrimeTable {
    primes: Vec<u32>,
}

impl PrimeTable {
    pub fn new(limit: u64, exclude: &[u64]) -> Result<Self> {
        if limit >= u32::MAX as u64 {
            return Err(Error::Unsupported(format!(
                "prime table limit {limit} exceeds 2^32; lower Bmax"
            )));
        }
        let sieve = primal::Sieve::new(limit.max(2) as usize);
        let primes = sieve
            .primes_from(2)
            .take_while(|&p| p as u64 <= limit)
            .filter(|&p| !exclude.contains(&(p as u64)))
            .map(|p| p as u32)
            .collect();
        Ok(Self { primes })
    }

    /// Keeps only the primes satisfying `keep`.
    pub fn retain(mut self, keep: impl Fn(u64) -> bool) -> Self {
        self.primes.retain(|&p| keep(p as u64));
        self
    }

    #[inline]
    pub fn get(&self, idx: usize) -> u64 {
        self.primes[idx] as u64
    }

    /// First index `>= start` at which `pred` fails; `pred` must be
    /// monotone (true then false) over the primes.
    pub fn partition_point_from(&self, start: usize, pred: impl Fn(u64) -> bool) -> usize {
        if start >= self.primes.len() {
            return self.primes.len();
        }
        start + self.primes[start..].partition_point(|&p| pred(p as u64))
    }
}
