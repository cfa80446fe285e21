//! Cyclic degree-n extensions of Q as Dirichlet characters.
//!
//! A homomorphism Gal(Qbar/Q) -> Z/nZ is a character of some (Z/fZ)^x, and
//! it factors as a product of primitive local characters at the primes
//! dividing the conductor f. The walk picks one local character per prime,
//! reads off the discriminant from the conductor-discriminant formula
//! `∏_{j=1}^{n-1} cond(χ^j)`, and identifies characters that differ by an
//! automorphism of Z/nZ (they cut out the same field).

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, prime_divisors, smallest_prime_factor, unit_group};
use crate::error::{Error, Result};

use super::primes::PrimeTable;
use super::FieldSink;

/// A primitive character of `(Z/p^c Z)^x` with values in `Z/nZ`.
///
/// For odd `p`, `t` is the value on a fixed generator. For `p = 2`, `s` is
/// the value on -1 and `t` the value on 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LocalChar {
    pub p: u64,
    pub cond_exp: u32,
    pub s: u32,
    pub t: u32,
    /// `Σ_{j=1}^{n-1} cond_exp(χ^j)`
    pub disc_exp: u32,
}

impl LocalChar {
    /// `χ(-1)` as an element of Z/nZ.
    pub fn at_minus_one(&self, n: u64) -> u64 {
        if self.p == 2 {
            self.s as u64
        } else {
            let phi = (self.p - 1) * self.p.pow(self.cond_exp - 1);
            (self.t as u64 * (phi / 2)) % n
        }
    }
}

/// Conductor exponent of the character with values `(s, t)` at `p`.
fn conductor_exp(p: u64, s: u64, t: u64, n: u64) -> u32 {
    if p == 2 {
        if s % n == 0 && t % n == 0 {
            return 0;
        }
        if t % n == 0 {
            return 2;
        }
        let mut c = 3;
        while (1u64 << (c - 2)) % n * t % n != 0 {
            c += 1;
        }
        c
    } else {
        if t % n == 0 {
            return 0;
        }
        let mut c = 1;
        let mut k = (p - 1) % n;
        while k * t % n != 0 {
            k = k * p % n;
            c += 1;
        }
        c
    }
}

fn disc_exp(p: u64, s: u64, t: u64, n: u64) -> u32 {
    (1..n).map(|j| conductor_exp(p, j * s % n, j * t % n, n)).sum()
}

/// All primitive nontrivial local characters at `p` with values in Z/nZ.
pub fn local_characters(p: u64, n: u64) -> Vec<LocalChar> {
    let mut out = Vec::new();
    if p == 2 {
        let max_c = n.trailing_zeros() + 2;
        for c in 2..=max_c {
            for s in 0..n {
                for t in 0..n {
                    if 2 * s % n != 0 || (1u64 << (c - 2)) % n * t % n != 0 {
                        continue;
                    }
                    if conductor_exp(2, s, t, n) == c {
                        out.push(LocalChar {
                            p,
                            cond_exp: c,
                            s: s as u32,
                            t: t as u32,
                            disc_exp: disc_exp(2, s, t, n),
                        });
                    }
                }
            }
        }
    } else {
        let mut vp = 0;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            vp += 1;
        }
        for c in 1..=vp + 1 {
            let phi = (p - 1) * p.pow(c - 1);
            for t in 1..n {
                if phi % n * t % n != 0 {
                    continue;
                }
                if conductor_exp(p, 0, t, n) == c {
                    out.push(LocalChar {
                        p,
                        cond_exp: c,
                        s: 0,
                        t: t as u32,
                        disc_exp: disc_exp(p, 0, t, n),
                    });
                }
            }
        }
    }
    out
}

/// A visited character. `locals` lists one entry per ramified prime, wild
/// primes first and then tame primes in increasing order.
#[derive(Debug)]
pub struct FieldPoint<'a> {
    pub n: u64,
    pub locals: &'a [LocalChar],
    pub disc: u128,
    /// Order of the character; `n` means the algebra is a field.
    pub order: u64,
    /// True for exactly one character per field (order `n`, minimal under
    /// Aut(Z/nZ)).
    pub is_field_rep: bool,
}

/// A cyclic extension described by its character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CyclicField {
    pub n: u64,
    pub disc: u128,
    pub conductor: u64,
    /// `χ(-1)`; zero exactly when the field is real.
    pub parity: u64,
    pub locals: Vec<LocalChar>,
}

impl CyclicField {
    pub(crate) fn from_point(p: &FieldPoint) -> Self {
        let mut locals = p.locals.to_vec();
        locals.sort();
        CyclicField {
            n: p.n,
            disc: p.disc,
            conductor: locals.iter().map(|l| l.p.pow(l.cond_exp)).product(),
            parity: locals.iter().map(|l| l.at_minus_one(p.n)).sum::<u64>() % p.n,
            locals,
        }
    }

    /// For n = 2: the squarefree `d` with `L = Q(sqrt d)`.
    pub fn quadratic_kernel(&self) -> Option<i64> {
        if self.n != 2 {
            return None;
        }
        let mut d: i64 = 1;
        for l in &self.locals {
            if l.p != 2 {
                d *= l.p as i64;
            } else if l.cond_exp == 3 {
                d *= 2;
            }
        }
        Some(if self.parity == 0 { d } else { -d })
    }
}

pub(crate) struct CyclicWalk<'p> {
    n: u64,
    bound: u128,
    min_exp: u32,
    units: Vec<u64>,
    tame_options: HashMap<u64, Vec<(u32, u32)>>,
    wild: Vec<Vec<LocalChar>>,
    primes: &'p PrimeTable,
}

const PAR_SPLIT: u128 = 1 << 12;

struct Node {
    disc: u128,
    g: u64,
    next: usize,
}

impl<'p> CyclicWalk<'p> {
    pub(crate) fn new(n: u64, bound: u128, primes: &'p PrimeTable) -> Result<Self> {
        if !(2..=12).contains(&n) {
            return Err(Error::Unsupported(format!("cyclic census supports 2 <= n <= 12, got {n}")));
        }
        let r = smallest_prime_factor(n);
        let mut tame_options = HashMap::new();
        for g in (2..=n).filter(|g| n % g == 0) {
            // for p ∤ n with gcd(p-1, n) = g: t = k n/g, conductor p
            let opts = (1..g)
                .map(|k| {
                    let t = k * (n / g);
                    (t as u32, (n - gcd(t, n)) as u32)
                })
                .collect();
            tame_options.insert(g, opts);
        }
        let wild = prime_divisors(n)
            .into_iter().map(|p| local_characters(p, n)).collect();
        Ok(Self {
            n,
            bound,
            min_exp: (n - n / r) as u32,
            units: unit_group(n).into_iter().filter(|&u| u != 1).collect(),
            tame_options,
            wild,
            primes,
        })
    }

    /// Primes that can carry a tame character: odd, not dividing n, with
    /// `gcd(p - 1, n) > 1`.
    pub(crate) fn admits_tame(n: u64, p: u64) -> bool {
        p != 2 && n % p != 0 && gcd(p - 1, n) > 1
    }

    pub(crate) fn prime_limit(n: u64, bound: u128) -> u64 {
        let r = smallest_prime_factor(n);
        let m = (n - n / r) as f64;
        ((bound as f64).powf(1.0 / m).floor() as u64).saturating_add(1)
    }

    fn is_canonical(&self, stack: &[LocalChar]) -> bool {
        let n = self.n;
        for &u in &self.units {
            for l in stack {
                let (s, t) = (l.s as u64 * u % n, l.t as u64 * u % n);
                match (s, t).cmp(&(l.s as u64, l.t as u64)) {
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => continue,
                }
            }
        }
        true
    }

    fn visit<S: FieldSink>(&self, stack: &[LocalChar], node: &Node, sink: &mut S) {
        let order = self.n / gcd(node.g, self.n);
        let is_field_rep = order == self.n && self.is_canonical(stack);
        sink.visit_field(&FieldPoint {
            n: self.n,
            locals: stack,
            disc: node.disc,
            order,
            is_field_rep,
        });
    }

    fn push_child<S: FieldSink>(&self, stack: &mut Vec<LocalChar>, node: &Node, lc: LocalChar, next: usize, sink: &mut S) {
        let Some(disc) = (lc.p as u128).checked_pow(lc.disc_exp).and_then(|v| v.checked_mul(node.disc)) else {
            return;
        };
        if disc > self.bound {
            return;
        }
        let child = Node {
            disc,
            g: gcd(gcd(node.g, lc.s as u64), lc.t as u64),
            next,
        };
        stack.push(lc);
        self.walk(stack, &child, sink);
        stack.pop();
    }

    fn expand<S: FieldSink>(&self, stack: &mut Vec<LocalChar>, node: &Node, idx: usize, sink: &mut S) {
        let p = self.primes.get(idx);
        let opts = &self.tame_options[&gcd(p - 1, self.n)];
        for &(t, disc_exp) in opts {
            let lc = LocalChar {
                p,
                cond_exp: 1,
                s: 0,
                t,
                disc_exp,
            };
            self.push_child(stack, node, lc, idx + 1, sink);
        }
    }

    fn walk<S: FieldSink>(&self, stack: &mut Vec<LocalChar>, node: &Node, sink: &mut S) {
        self.visit(stack, node, sink);
        let budget = self.bound / node.disc;
        let start = node.next;
        let end = self.primes.partition_point_from(start, |p| {
            (p as u128).checked_pow(self.min_exp).is_some_and(|v| v <= budget)
        });
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
                        self.expand(&mut st, node, idx, &mut s);
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
                self.expand(stack, node, idx, sink);
            }
        }
    }

    fn wild_walk<S: FieldSink>(&self, level: usize, stack: &mut Vec<LocalChar>, node: &Node, sink: &mut S) {
        if level == self.wild.len() {
            self.walk(stack, node, sink);
            return;
        }
        self.wild_walk(level + 1, stack, node, sink);
        for &lc in &self.wild[level] {
            let Some(disc) = (lc.p as u128).checked_pow(lc.disc_exp).and_then(|v| v.checked_mul(node.disc)) else {
                continue;
            };
            if disc > self.bound {
                continue;
            }
            let child = Node {
                disc,
                g: gcd(gcd(node.g, lc.s as u64), lc.t as u64),
                next: 0,
            };
            stack.push(lc);
            self.wild_walk(level + 1, stack, &child, sink);
            stack.pop();
        }
    }

    pub(crate) fn run<S: FieldSink>(&self, sink: &mut S) {
        let root = Node {
            disc: 1,
            g: 0,
            next: 0,
        };
        self.wild_walk(0, &mut Vec::new(), &root, sink);
    }
}
