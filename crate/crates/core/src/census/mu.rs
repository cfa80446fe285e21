//! Enumeration of B mu_n(Q) by bounded discriminant.
//!
//! Classes are built prime by prime: wild primes (dividing n) get every
//! exponent pattern up front, then a depth-first walk over increasing tame
//! primes appends `p^e` with `1 <= e < n`. Each tame prime multiplies the
//! discriminant by `p^(n - gcd(e, n)) >= p^(n - n/r)`, which is what lets the
//! walk stop as soon as the next prime overshoots.

use rayon::prelude::*;

use crate::arith::{gcd, prime_divisors, smallest_prime_factor, FactoredInteger};
use crate::error::{Error, Result};
use crate::kummer::KummerClass;

use super::primes::PrimeTable;
use super::MuSink;

/// How wild primes enter the discriminant that is bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscKind {
    /// Exact wild exponents (n = 2, 3).
    Exact,
    /// Wild exponents dropped.
    Tame,
}

/// A visited class. `wild` and `tame` are each sorted by prime.
#[derive(Debug)]
pub struct MuPoint<'a> {
    pub n: u64,
    pub sign: i8,
    pub wild: &'a [(u64, u32)],
    pub tame: &'a [(u64, u32)],
    pub disc: u128,
    pub irreducible: bool,
}

impl MuPoint<'_> {
    pub fn to_class(&self) -> KummerClass {
        let mut fs: Vec<(u64, u32)> = self.wild.iter().chain(self.tame).filter(|f| f.1 > 0).copied().collect();
        fs.sort_unstable();
        KummerClass::from_reduced(self.n, FactoredInteger::from_sorted_unchecked(self.sign, fs))
    }
}

struct WildChoice {
    factors: Vec<(u64, u32)>,
    residue: u64,
    min_factor: u128,
}

/// Walk configuration shared by all workers.
pub(crate) struct MuWalk<'p> {
    n: u64,
    kind: DiscKind,
    bound: u128,
    min_exp: u32,
    n_primes: Vec<u64>,
    primes: &'p PrimeTable,
}

const RES_MOD: u64 = 36;
// Nodes whose partial discriminant is below bound / PAR_SPLIT fan out in parallel.
const PAR_SPLIT: u128 = 1 << 16;

fn checked_pow(p: u64, e: u32) -> Option<u128> {
    (p as u128).checked_pow(e)
}

fn pow_mod(p: u64, e: u32, m: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * (p % m) % m)
}

impl<'p> MuWalk<'p> {
    pub(crate) fn new(n: u64, kind: DiscKind, bound: u128, primes: &'p PrimeTable) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegreeTooSmall(n));
        }
        if kind == DiscKind::Exact && !(2..=3).contains(&n) {
            return Err(Error::ExactUnsupported(n));
        }
        if n > 12 {
            return Err(Error::Unsupported(format!("census supports n <= 12, got {n}")));
        }
        let r = smallest_prime_factor(n);
        Ok(Self {
            n,
            kind,
            bound,
            min_exp: (n - n / r) as u32,
            n_primes: prime_divisors(n),
            primes,
        })
    }

    /// Largest tame prime that can occur.
    pub(crate) fn prime_limit(n: u64, bound: u128) -> u64 {
        let r = smallest_prime_factor(n);
        let m = (n - n / r) as f64;
        ((bound as f64).powf(1.0 / m).floor() as u64).saturating_add(1)
    }

    fn wild_choices(&self) -> Vec<WildChoice> {
        let mut out = vec![WildChoice {
            factors: Vec::new(),
            residue: 1,
            min_factor: 1,
        }];
        for &p in &self.n_primes {
            let mut next = Vec::new();
            for w in &out {
                for e in 0..self.n as u32 {
                    let mut factors = w.factors.clone();
                    factors.push((p, e));
                    next.push(WildChoice {
                        factors,
                        residue: w.residue * pow_mod(p, e, RES_MOD) % RES_MOD,
                        min_factor: 1,
                    });
                }
            }
            out = next;
        }
        for w in &mut out {
            w.min_factor = match (self.kind, self.n) {
                (DiscKind::Tame, _) => 1,
                (DiscKind::Exact, 2) => if w.factors[0].1 > 0 { 8 } else { 1 },
                (DiscKind::Exact, _) => if w.factors[0].1 > 0 { 243 } else { 3 },
            };
        }
        out
    }

    fn wild_factor(&self, wild: &[(u64, u32)], signed_residue: u64) -> u128 {
        match (self.kind, self.n) {
            (DiscKind::Tame, _) => 1,
            (DiscKind::Exact, 2) => {
                if wild[0].1 > 0 {
                    8
                } else if signed_residue % 4 == 1 {
                    1
                } else {
                    4
                }
            }
            (DiscKind::Exact, _) => {
                if wild[0].1 > 0 {
                    243
                } else if signed_residue % 9 * (signed_residue % 9) % 9 == 1 {
                    3
                } else {
                    27
                }
            }
        }
    }

    fn signs(&self) -> &'static [i8] {
        if self.n % 2 == 0 {
            &[1, -1]
        } else {
            &[1]
        }
    }

    fn irreducible(&self, sign: i8, e2: u32, g_odd: u32) -> bool {
        let g_all = gcd(e2 as u64, g_odd as u64);
        for &p in &self.n_primes {
            if (p != 2 || sign > 0) && g_all % p == 0 {
                return false;
            }
        }
        !(self.n % 4 == 0 && sign < 0 && e2 % 4 == 2 && g_odd % 4 == 0)
    }

    fn visit_node<S: MuSink>(&self, wild: &WildChoice, stack: &[(u64, u32)], node: &Node, sink: &mut S) {
        let e2 = wild.factors.iter().find(|f| f.0 == 2).map_or(0, |f| f.1);
        let g_odd = wild
            .factors
            .iter()
            .filter(|f| f.0 != 2)
            .fold(node.g_tame as u64, |g, f| gcd(g, f.1 as u64)) as u32;
        let residue = wild.residue * node.residue % RES_MOD;
        for &sign in self.signs() {
            let signed = if sign > 0 { residue } else { (RES_MOD - residue) % RES_MOD };
            let Some(disc) = node.disc.checked_mul(self.wild_factor(&wild.factors, signed)) else {
                continue;
            };
            if disc > self.bound {
                continue;
            }
            let irreducible = self.irreducible(sign, e2, g_odd);
            sink.visit_mu(&MuPoint {
                n: self.n,
                sign,
                wild: &wild.factors,
                tame: stack,
                disc,
                irreducible,
            });
        }
    }

    fn children(&self, node: &Node, wild: &WildChoice) -> (usize, usize) {
        // first index whose prime already overshoots the bound
        let budget = self.bound / node.disc.saturating_mul(wild.min_factor);
        let end = self.primes.partition_point_from(node.next, |p| {
            checked_pow(p, self.min_exp).is_some_and(|v| v <= budget)
        });
        (node.next, end)
    }

    fn expand<S: MuSink>(&self, wild: &WildChoice, stack: &mut Vec<(u64, u32)>, node: &Node, idx: usize, sink: &mut S) {
        let p = self.primes.get(idx);
        for e in 1..self.n as u32 {
            let f = self.n - gcd(e as u64, self.n);
            let Some(disc) = checked_pow(p, f as u32).and_then(|v| v.checked_mul(node.disc)) else {
                continue;
            };
            if disc.saturating_mul(wild.min_factor) > self.bound {
                continue;
            }
            let child = Node {
                disc,
                residue: node.residue * pow_mod(p, e, RES_MOD) % RES_MOD,
                g_tame: gcd(node.g_tame as u64, e as u64) as u32,
                next: idx + 1,
            };
            stack.push((p, e));
            self.walk(wild, stack, &child, sink);
            stack.pop();
        }
    }

    fn walk<S: MuSink>(&self, wild: &WildChoice, stack: &mut Vec<(u64, u32)>, node: &Node, sink: &mut S) {
        self.visit_node(wild, stack, node, sink);
        let (start, end) = self.children(node, wild);
        if end <= start {
            return;
        }
        if node.disc.saturating_mul(PAR_SPLIT) <= self.bound && end - start > 1 {
            let proto: &S = sink;
            let parts = (start..end)
                .into_par_iter()
                .fold(
                    || (proto.fork(), stack.clone()),
                    |(mut s, mut st), idx| {
                        self.expand(wild, &mut st, node, idx, &mut s);
                        (s, st)
                    },
                )
                .map(|(s, _)| s)
                .collect::<Vec<S>>();
            for part in parts {
                sink.merge(part);
            }
        } else {
            for idx in start..end {
                self.expand(wild, stack, node, idx, sink);
            }
        }
    }

    pub(crate) fn run<S: MuSink>(&self, sink: &mut S) {
        for wild in self.wild_choices() {
            if wild.min_factor > self.bound {
                continue;
            }
            let root = Node {
                disc: 1,
                residue: 1,
                g_tame: 0,
                next: 0,
            };
            let mut stack = Vec::new();
            self.walk(&wild, &mut stack, &root, sink);
        }
    }
}

struct Node {
    disc: u128,
    residue: u64,
    g_tame: u32,
    next: usize,
}

#[cfg(test)]
mod tests {
    use super::super::{enumerate_mu, Ordering};
    use crate::kummer::canonical_int;

    #[test]
    fn small_quadratic_list() {
        let got: Vec<(i128, u128)> = enumerate_mu(2, 10.0, Ordering::DiscExact, 1)
            .unwrap()
            .into_iter()
            .map(|(c, d)| (c.a().value().unwrap(), d))
            .collect();
        // fundamental discriminants of absolute value at most 10, plus the split algebra
        assert_eq!(got, vec![(1, 1), (-3, 3), (-1, 4), (5, 5), (-7, 7), (-2, 8), (2, 8)]);
        let trivial = enumerate_mu(2, 1.0, Ordering::DiscExact, 1).unwrap();
        assert_eq!(trivial, vec![(canonical_int(1, 2).unwrap(), 1)]);
    }

    #[test]
    fn pure_cubics_start_at_108() {
        let below = enumerate_mu(3, 100.0, Ordering::DiscExact, 1).unwrap();
        assert_eq!(below.len(), 1);
        assert!(below[0].0.is_trivial());
        let upto = enumerate_mu(3, 108.0, Ordering::DiscExact, 1).unwrap();
        assert_eq!(upto.last().unwrap().1, 108);
    }
}
