//! Finite permutation groups stored by their full element list.
//!
//! Everything Malle's invariants need is small (regular representations of
//! order at most 30, a handful of transitive groups of degree at most 8), so
//! groups are closed by breadth-first multiplication and conjugacy classes
//! are found as orbits under conjugation by the generators.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::arith::{gcd, lcm, CyclotomicSignature};
use crate::error::{Error, Result};

pub const DEFAULT_CAP: usize = 1_000_000;

/// A bijection of `{0, .., n-1}`; displayed 1-based in cycle notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::InvalidPermutation(format!("image {} out of range", i + 1)))?;
            if *slot {
                return Err(Error::InvalidPermutation(format!("image {} repeated", i + 1)));
            }
            *slot = true;
        }
        Ok(Self { images })
    }

    /// From 1-based cycles on `degree` points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &pt) in cycle.iter().enumerate() {
                if pt == 0 || pt > degree {
                    return Err(Error::InvalidPermutation(format!(
                        "point {pt} outside 1..={degree}"
                    )));
                }
                if touched[pt - 1] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {pt} appears in two cycles"
                    )));
                }
                touched[pt - 1] = true;
                let next = cycle[(i + 1) % cycle.len()];
                images[pt - 1] = (next - 1) as u32;
            }
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` followed by `other`: `i -> other(self(i))`.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Self { images: inv }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::identity(self.degree());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        acc
    }

    /// `g^-1 self g`
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.inverse().then(self).then(g)
    }

    /// Cycle lengths including fixed points.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lens = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.apply(i);
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }

    pub fn order(&self) -> u64 {
        self.cycle_type().into_iter().fold(1, |acc, l| lcm(acc, l as u64))
    }

    /// Degree minus the number of cycles.
    pub fn index(&self) -> usize {
        self.degree() - self.cycle_type().len()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i + 1);
                i = self.apply(i);
            }
            out.push(cyc);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn index(g: &Permutation) -> usize {
    g.index()
}

/// A conjugacy class. `members` are indices into [`PermGroup::elements`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjClass {
    pub representative: Permutation,
    pub members: Vec<usize>,
    pub index: usize,
}

impl ConjClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    lookup: HashMap<Permutation, usize>,
    exponent: u64,
    classes: Vec<ConjClass>,
    class_of: Vec<usize>,
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// lcm of the element orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn position(&self, g: &Permutation) -> Option<usize> {
        self.lookup.get(g).copied()
    }

    /// Conjugacy classes ordered by (index, smallest member).
    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    /// Class number of the element at `element` in [`Self::elements`].
    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn class_containing(&self, g: &Permutation) -> Option<usize> {
        self.position(g).map(|i| self.class_of[i])
    }

    pub fn is_transitive(&self) -> bool {
        if self.degree <= 1 {
            return true;
        }
        let mut seen = vec![false; self.degree];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for g in &self.generators {
                let j = g.apply(i);
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.degree
    }
}

/// Closes `generators` under composition. The element list is in
/// breadth-first order from the identity, so it depends only on the
/// generator list.
pub fn closure(generators: &[Permutation], cap: usize) -> Result<PermGroup> {
    let degree = generators.first().map_or(1, Permutation::degree);
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::DegreeMismatch(degree, g.degree()));
    }
    let id = Permutation::identity(degree);
    let mut elements = vec![id.clone()];
    let mut lookup = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let y = elements[i].then(g);
            if !lookup.contains_key(&y) {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                lookup.insert(y.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(y);
            }
        }
    }
    let exponent = elements.iter().fold(1, |acc, g| lcm(acc, g.order()));

    let mut group = PermGroup {
        degree,
        generators: generators.to_vec(),
        elements,
        lookup,
        exponent,
        classes: Vec::new(),
        class_of: Vec::new(),
    };
    compute_classes(&mut group);
    Ok(group)
}

fn compute_classes(g: &mut PermGroup) {
    let n = g.elements.len();
    let mut class_id = vec![usize::MAX; n];
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if class_id[start] != usize::MAX {
            continue;
        }
        let id = raw.len();
        class_id[start] = id;
        let mut members = vec![start];
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for h in &g.generators {
                let y = g.lookup[&g.elements[x].conjugate_by(h)];
                if class_id[y] == usize::MAX {
                    class_id[y] = id;
                    members.push(y);
                    stack.push(y);
                }
            }
        }
        raw.push(members);
    }
    let mut classes: Vec<ConjClass> = raw
        .into_iter()
        .map(|mut members| {
            members.sort_unstable_by(|&a, &b| g.elements[a].cmp(&g.elements[b]));
            let representative = g.elements[members[0]].clone();
            let index = representative.index();
            members.sort_unstable();
            ConjClass {
                representative,
                members,
                index,
            }
        })
        .collect();
    classes.sort_by(|a, b| (a.index, &a.representative).cmp(&(b.index, &b.representative)));
    let mut class_of = vec![0; n];
    for (ci, c) in classes.iter().enumerate() {
        for &m in &c.members {
            class_of[m] = ci;
        }
    }
    g.classes = classes;
    g.class_of = class_of;
}

pub fn conjugacy_classes(g: &PermGroup) -> &[ConjClass] {
    g.classes()
}

/// Class of `representative^k` for `k` coprime to the exponent.
pub fn power_action(g: &PermGroup, class: usize, k: u64) -> Result<usize> {
    if gcd(k % g.exponent().max(1), g.exponent()) != 1 && g.exponent() > 1 {
        return Err(Error::PowerNotCoprime {
            k,
            exponent: g.exponent(),
        });
    }
    let rep = &g.classes[class].representative;
    let img = rep.pow(k % g.exponent());
    Ok(g.class_containing(&img).expect("powers stay in the group"))
}

/// Orbits of `classes` under `c -> c^u` for `u` in the signature's units.
/// Orbits come out sorted, each as a sorted list of class numbers.
pub fn gamma_orbits(
    g: &PermGroup,
    sig: &CyclotomicSignature,
    classes: &[usize],
) -> Result<Vec<Vec<usize>>> {
    if sig.modulus != g.exponent() {
        return Err(Error::ModulusMismatch {
            expected: g.exponent(),
            found: sig.modulus,
        });
    }
    let mut orbit_of: HashMap<usize, usize> = HashMap::new();
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for &c in classes {
        if orbit_of.contains_key(&c) {
            continue;
        }
        let id = orbits.len();
        let mut orbit = vec![c];
        orbit_of.insert(c, id);
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            for &u in &sig.units {
                let y = power_action(g, x, u)?;
                if let std::collections::hash_map::Entry::Vacant(e) = orbit_of.entry(y) {
                    e.insert(id);
                    orbit.push(y);
                    stack.push(y);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    orbits.sort();
    Ok(orbits)
}

pub fn is_transitive(g: &PermGroup) -> bool {
    g.is_transitive()
}

/// Parses generator lists such as `"(1 2 3)(4 5 6); (1 4)(2 5)(3 6)"`.
/// A `deg=N` item fixes the degree; otherwise the largest point is used.
pub fn parse_generators(spec: &str) -> Result<Vec<Permutation>> {
    let mut degree: Option<usize> = None;
    let mut raw: Vec<Vec<Vec<usize>>> = Vec::new();
    for item in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(d) = item.strip_prefix("deg=") {
            degree = Some(
                d.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad degree `{d}`")))?,
            );
            continue;
        }
        raw.push(parse_cycles(item)?);
    }
    let max_pt = raw.iter().flatten().flatten().copied().max().unwrap_or(1);
    let degree = degree.unwrap_or(max_pt);
    if max_pt > degree {
        return Err(Error::Parse(format!("point {max_pt} exceeds deg={degree}")));
    }
    raw.iter().map(|c| Permutation::from_cycles(degree, c)).collect()
}

fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected `(` in `{s}`")))?;
        let close = body
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed cycle in `{s}`")))?;
        let pts = body[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad point `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !pts.is_empty() {
            cycles.push(pts);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}
