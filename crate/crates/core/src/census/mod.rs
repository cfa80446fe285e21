//! Counting torsors of bounded discriminant or height.
//!
//! Two targets are supported: Kummer classes for mu_n (every class, or only
//! the connected ones) and cyclic Z/nZ-extensions realized by Dirichlet
//! characters. A single walk over the largest bound fills a whole geometric
//! ladder of counts; `fit` then regresses `log count` on `log B` and
//! `log log B`.

mod cyclic;
mod fit;
mod mu;
mod primes;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{smallest_prime_factor, BaseField};
use crate::error::{Error, Result};
use crate::kummer::KummerClass;
use crate::malle::{group_preset, signature_for, Preset};
use crate::permgrp::{closure, DEFAULT_CAP};

pub use cyclic::{local_characters, CyclicField, FieldPoint, LocalChar};
pub use fit::{fit, fit_points, FitResult};
pub use mu::{DiscKind, MuPoint};

use cyclic::CyclicWalk;
use mu::MuWalk;
use primes::PrimeTable;

/// Per-worker state that can be split off and merged back.
pub trait Accumulator: Send + Sync + Sized {
    fn fork(&self) -> Self;
    fn merge(&mut self, other: Self);
}

pub trait MuSink: Accumulator {
    fn visit_mu(&mut self, point: &MuPoint);
}

pub trait FieldSink: Accumulator {
    fn visit_field(&mut self, point: &FieldPoint);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Mu(u64),
    Cyclic(u64),
}

impl Target {
    pub fn n(self) -> u64 {
        match self {
            Target::Mu(n) | Target::Cyclic(n) => n,
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, n) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("target {s:?}: expected mu:N or cyclic:N")))?;
        let n: u64 = n.trim().parse().map_err(|_| Error::Parse(format!("target {s:?}: bad degree")))?;
        match kind.trim() {
            "mu" => Ok(Target::Mu(n)),
            "cyclic" => Ok(Target::Cyclic(n)),
            other => Err(Error::Parse(format!("unknown target kind {other:?}"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Mu(n) => write!(f, "mu:{n}"),
            Target::Cyclic(n) => write!(f, "cyclic:{n}"),
        }
    }
}

/// `T` counts every torsor, `M` only the connected ones (fields).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Counter {
    T,
    M,
}

impl FromStr for Counter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(Counter::T),
            "M" | "m" => Ok(Counter::M),
            _ => Err(Error::Parse(format!("counter {s:?}: expected T or M"))),
        }
    }
}

/// What the bound `B` is compared against.
///
/// `Darda` bounds `H^n`, where `H` is the discriminant height with
/// `H^(n^2 - n^2/r) = |Δ|`; equivalently `|Δ| <= B^(n - n/r)`. Exact
/// discriminants are used for n in {2, 3}, tame ones otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    DiscExact,
    DiscTame,
    Darda,
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "disc_exact" => Ok(Ordering::DiscExact),
            "tame" | "disc_tame" => Ok(Ordering::DiscTame),
            "darda" => Ok(Ordering::Darda),
            _ => Err(Error::Parse(format!("ordering {s:?}: expected exact, tame or darda"))),
        }
    }
}

impl Ordering {
    /// Discriminant flavour used for mu_n under this ordering.
    pub fn disc_kind(self, n: u64) -> DiscKind {
        match self {
            Ordering::DiscExact => DiscKind::Exact,
            Ordering::DiscTame => DiscKind::Tame,
            Ordering::Darda if n <= 3 => DiscKind::Exact,
            Ordering::Darda => DiscKind::Tame,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LadderSpec {
    pub target: Target,
    pub counter: Counter,
    pub ordering: Ordering,
    pub b0: f64,
    pub doublings: u32,
    /// Worker threads; 0 picks the number of cores.
    pub jobs: usize,
}

impl LadderSpec {
    pub fn new(target: Target, counter: Counter, ordering: Ordering) -> Self {
        Self {
            target,
            counter,
            ordering,
            b0: 1e3,
            doublings: 18,
            jobs: 0,
        }
    }

    /// Largest doubling count whose top rung stays within `bmax`.
    pub fn with_bmax(mut self, bmax: f64) -> Result<Self> {
        if bmax.is_nan() || bmax < self.b0 {
            return Err(Error::Unsupported(format!("Bmax {bmax} is below B0 = {}", self.b0)));
        }
        self.doublings = (bmax / self.b0).log2().floor() as u32;
        Ok(self)
    }

    pub fn bounds(&self) -> Vec<f64> {
        (0..=self.doublings).map(|i| self.b0 * 2f64.powi(i as i32)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountLadder {
    pub target: Target,
    pub counter: Counter,
    pub ordering: Ordering,
    pub points: Vec<(f64, u64)>,
}

/// Largest discriminant admitted by `B` under `ordering`.
fn disc_threshold(b: f64, n: u64, ordering: Ordering) -> Result<u128> {
    if b.is_nan() || b < 1.0 {
        return Ok(0);
    }
    let e = match ordering {
        Ordering::Darda => (n - n / smallest_prime_factor(n)) as u32,
        _ => 1,
    };
    let overflow = || Error::Overflow(format!("bound {b} exceeds the census range"));
    if b.fract() == 0.0 && b < 2f64.powi(64) {
        (b as u128).checked_pow(e).ok_or_else(overflow)
    } else {
        let v = b.powi(e as i32).floor();
        if v >= 2f64.powi(127) {
            return Err(overflow());
        }
        Ok(v as u128)
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))
}

fn run_mu<S: MuSink>(n: u64, ordering: Ordering, bound: u128, jobs: usize, sink: &mut S) -> Result<()> {
    let limit = MuWalk::prime_limit(n, bound);
    let exclude = crate::arith::prime_divisors(n);
    let primes = PrimeTable::new(limit, &exclude)?;
    let walk = MuWalk::new(n, ordering.disc_kind(n), bound, &primes)?;
    pool(jobs)?.install(|| walk.run(sink));
    Ok(())
}

fn run_cyclic<S: FieldSink>(n: u64, ordering: Ordering, bound: u128, jobs: usize, sink: &mut S) -> Result<()> {
    if ordering == Ordering::DiscTame {
        return Err(Error::Unsupported(
            "cyclic census uses exact conductor discriminants; use exact or darda".into(),
        ));
    }
    let limit = CyclicWalk::prime_limit(n, bound);
    let primes = PrimeTable::new(limit, &[])?.retain(|p| CyclicWalk::admits_tame(n, p));
    let walk = CyclicWalk::new(n, bound, &primes)?;
    pool(jobs)?.install(|| walk.run(sink));
    Ok(())
}

struct Collect<T>(Vec<T>);

impl<T: Send + Sync> Accumulator for Collect<T> {
    fn fork(&self) -> Self {
        Collect(Vec::new())
    }

    fn merge(&mut self, other: Self) {
        self.0.extend(other.0);
    }
}

impl MuSink for Collect<(KummerClass, u128)> {
    fn visit_mu(&mut self, point: &MuPoint) {
        self.0.push((point.to_class(), point.disc));
    }
}

impl FieldSink for Collect<(CyclicField, u128)> {
    fn visit_field(&mut self, point: &FieldPoint) {
        if point.is_field_rep {
            self.0.push((CyclicField::from_point(point), point.disc));
        }
    }
}

/// All canonical Kummer classes of degree `n` with measure at most `bmax`,
/// sorted by (discriminant, class). The second component is the bounded
/// discriminant (exact or tame per `ordering`).
pub fn enumerate_mu(n: u64, bmax: f64, ordering: Ordering, jobs: usize) -> Result<Vec<(KummerClass, u128)>> {
    let bound = disc_threshold(bmax, n, ordering)?;
    let mut sink = Collect(Vec::new());
    run_mu(n, ordering, bound, jobs, &mut sink)?;
    let mut out = sink.0;
    out.sort_unstable_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
    Ok(out)
}

/// Cyclic degree-`n` fields with `|Δ| <= bmax`, one per field, sorted by
/// (discriminant, descriptor).
pub fn enumerate_cyclic(n: u64, bmax: f64, jobs: usize) -> Result<Vec<(CyclicField, u128)>> {
    let bound = disc_threshold(bmax, n, Ordering::DiscExact)?;
    let mut sink = Collect(Vec::new());
    run_cyclic(n, Ordering::DiscExact, bound, jobs, &mut sink)?;
    let mut out = sink.0;
    out.sort_unstable_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
    Ok(out)
}

/// Counts per ladder rung; `cells[i]` holds points with
/// `thresholds[i-1] < disc <= thresholds[i]`.
struct Histogram<'t> {
    thresholds: &'t [u128],
    counter: Counter,
    cells: Vec<u64>,
}

impl<'t> Histogram<'t> {
    fn new(thresholds: &'t [u128], counter: Counter) -> Self {
        Self {
            thresholds,
            counter,
            cells: vec![0; thresholds.len()],
        }
    }

    #[inline]
    fn add(&mut self, disc: u128) {
        let idx = self.thresholds.partition_point(|&t| t < disc);
        if idx < self.cells.len() {
            self.cells[idx] += 1;
        }
    }

    fn cumulative(&self) -> Vec<u64> {
        self.cells
            .iter()
            .scan(0, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }
}

impl Accumulator for Histogram<'_> {
    fn fork(&self) -> Self {
        Histogram::new(self.thresholds, self.counter)
    }

    fn merge(&mut self, other: Self) {
        for (a, b) in self.cells.iter_mut().zip(other.cells) {
            *a += b;
        }
    }
}

impl MuSink for Histogram<'_> {
    fn visit_mu(&mut self, point: &MuPoint) {
        if self.counter == Counter::T || point.irreducible {
            self.add(point.disc);
        }
    }
}

impl FieldSink for Histogram<'_> {
    fn visit_field(&mut self, point: &FieldPoint) {
        match self.counter {
            Counter::T => self.add(point.disc),
            Counter::M if point.is_field_rep => self.add(point.disc),
            Counter::M => {}
        }
    }
}

/// Runs one walk up to the top rung and reads off every rung.
///
/// For cyclic targets `T` counts all homomorphisms to Z/nZ (each
/// connected or not), `M` counts fields.
pub fn count(spec: &LadderSpec) -> Result<CountLadder> {
    let n = spec.target.n();
    let bounds = spec.bounds();
    let thresholds = bounds
        .iter()
        .map(|&b| disc_threshold(b, n, spec.ordering))
        .collect::<Result<Vec<_>>>()?;
    let top = *thresholds.last().expect("ladder has at least one rung");
    let mut hist = Histogram::new(&thresholds, spec.counter);
    match spec.target {
        Target::Mu(n) => run_mu(n, spec.ordering, top, spec.jobs, &mut hist)?,
        Target::Cyclic(n) => run_cyclic(n, spec.ordering, top, spec.jobs, &mut hist)?,
    }
    Ok(CountLadder {
        target: spec.target,
        counter: spec.counter,
        ordering: spec.ordering,
        points: bounds.into_iter().zip(hist.cumulative()).collect(),
    })
}

/// Expected `(a, b)` in `count ~ C B^a (log B)^(b-1)`.
///
/// For mu_n these are the sector invariants `(1/(n - n/r), r - 1)`; for
/// cyclic fields `b` is Malle's `b(Q, Z/nZ)`. Under the darda ordering the
/// bound is rescaled so that `a = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    #[serde(serialize_with = "crate::ratio_string")]
    pub a: Ratio<u64>,
    pub b: usize,
}

pub fn predicted_exponents(target: Target, ordering: Ordering) -> Result<Prediction> {
    let n = target.n();
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    let r = smallest_prime_factor(n);
    let mut a = Ratio::new(1, n - n / r);
    if ordering == Ordering::Darda {
        a = Ratio::from_integer(1);
    }
    let b = match target {
        Target::Mu(_) => (r - 1) as usize,
        Target::Cyclic(_) => {
            let g = closure(&group_preset(&Preset::CyclicRegular(n))?, DEFAULT_CAP)?;
            let sig = signature_for(&g, None, &BaseField::Rationals)?;
            crate::malle::b_invariant(&g, &sig)?
        }
    };
    Ok(Prediction { a, b })
}

/// `count / (B^a (log B)^(b-1))` at the top rung.
pub fn empirical_constant(ladder: &CountLadder, pred: &Prediction) -> Option<f64> {
    let &(b, c) = ladder.points.last()?;
    let a = *pred.a.numer() as f64 / *pred.a.denom() as f64;
    Some(c as f64 / (b.powf(a) * b.ln().powi(pred.b as i32 - 1)))
}

#[derive(Deserialize)]
struct CsvRow {
    #[serde(rename = "B")]
    b: f64,
    count: u64,
}

/// Writes `B,count` rows.
pub fn write_csv<W: Write>(points: &[(f64, u64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["B", "count"]).map_err(err)?;
    for &(b, count) in points {
        // f64 Display is the shortest exact round-trip form
        w.write_record([b.to_string(), count.to_string()]).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<(f64, u64)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut points = Vec::new();
    for row in r.deserialize::<CsvRow>() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        points.push((row.b, row.count));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Parse("ladder bounds must be strictly increasing".into()));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        let mut spec = LadderSpec::new(Target::Mu(2), Counter::T, Ordering::DiscExact);
        spec.b0 = 10.0;
        spec.doublings = 0;
        assert_eq!(count(&spec).unwrap().points, vec![(10.0, 7)]);
        spec.counter = Counter::M;
        assert_eq!(count(&spec).unwrap().points, vec![(10.0, 6)]);
        let mut spec = LadderSpec::new(Target::Cyclic(3), Counter::M, Ordering::DiscExact);
        spec.b0 = 100.0;
        spec.doublings = 0;
        // conductors 7 and 9
        assert_eq!(count(&spec).unwrap().points, vec![(100.0, 2)]);
        spec.counter = Counter::T;
        assert_eq!(count(&spec).unwrap().points, vec![(100.0, 5)]);
    }

    #[test]
    fn cyclic_examples() {
        let c3 = enumerate_cyclic(3, 80.0, 1).unwrap();
        assert_eq!(c3.len(), 1);
        assert_eq!((c3[0].0.conductor, c3[0].1), (7, 49));
        assert!(enumerate_cyclic(3, 48.0, 1).unwrap().is_empty());
        let at81 = enumerate_cyclic(3, 81.0, 1).unwrap();
        assert_eq!(at81.iter().map(|f| f.0.conductor).collect::<Vec<_>>(), vec![7, 9]);
        let q: Vec<(i64, u128)> = enumerate_cyclic(2, 5.0, 1)
            .unwrap()
            .into_iter()
            .map(|(f, d)| (f.quadratic_kernel().unwrap(), d))
            .collect();
        assert_eq!(q, vec![(-3, 3), (-1, 4), (5, 5)]);
    }

    #[test]
    fn ladder_is_monotone_and_jobs_invariant() {
        let mut spec = LadderSpec::new(Target::Mu(3), Counter::M, Ordering::DiscExact);
        spec.b0 = 100.0;
        spec.doublings = 12;
        spec.jobs = 1;
        let serial = count(&spec).unwrap();
        spec.jobs = 4;
        let parallel = count(&spec).unwrap();
        assert_eq!(serial, parallel);
        assert!(serial.points.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 < w[1].0));
    }

    #[test]
    fn csv_round_trip() {
        let pts = vec![(1000.0, 3), (2000.0, 7), (262144000.0, 11)];
        let mut buf = Vec::new();
        write_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("B,count\n1000,3\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn predictions() {
        let p = predicted_exponents(Target::Mu(3), Ordering::DiscExact).unwrap();
        assert_eq!((p.a, p.b), (Ratio::new(1, 2), 2));
        let p = predicted_exponents(Target::Cyclic(3), Ordering::DiscExact).unwrap();
        assert_eq!((p.a, p.b), (Ratio::new(1, 2), 1));
        let p = predicted_exponents(Target::Mu(4), Ordering::DiscTame).unwrap();
        assert_eq!((p.a, p.b), (Ratio::new(1, 2), 1));
    }

    #[test]
    fn rejected_modes() {
        assert!(matches!(enumerate_mu(5, 100.0, Ordering::DiscExact, 1), Err(Error::ExactUnsupported(5))));
        assert!(enumerate_mu(13, 100.0, Ordering::DiscTame, 1).is_err());
        let spec = LadderSpec::new(Target::Cyclic(3), Counter::M, Ordering::DiscTame);
        assert!(count(&spec).is_err());
    }
}
