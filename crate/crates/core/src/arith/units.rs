use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{gcd, lcm};
use crate::error::{Error, Result};

/// Image of the cyclotomic character of a base field in (Z/mZ)^x.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicSignature {
    pub modulus: u64,
    pub units: Vec<u64>,
}

/// The base fields we can describe through their cyclotomic character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseField {
    Rationals,
    /// Q(zeta_d)
    Cyclotomic(u64),
    /// The subgroup generated by explicit residues.
    Generators(Vec<u64>),
}

impl CyclotomicSignature {
    pub fn contains(&self, u: u64) -> bool {
        self.units.binary_search(&residue(u, self.modulus)).is_ok()
    }

    pub fn is_subgroup(&self) -> bool {
        let m = self.modulus;
        self.contains(1)
            && self.units.iter().all(|&u| gcd(u, m) == 1 || m == 1)
            && self
                .units
                .iter()
                .all(|&u| self.units.iter().all(|&v| self.contains(mul(u, v, m))))
    }

    pub fn order(&self) -> usize {
        self.units.len()
    }
}

// Residues live in [1, m]; the modulus-1 ring is represented by 1.
fn residue(x: u64, m: u64) -> u64 {
    if m == 1 {
        1
    } else {
        x % m
    }
}

fn mul(a: u64, b: u64, m: u64) -> u64 {
    residue(((a as u128 * b as u128) % m as u128) as u64, m)
}

/// Units of Z/mZ as sorted representatives in `[1, m]`.
pub fn unit_group(m: u64) -> Vec<u64> {
    if m <= 1 {
        return vec![1];
    }
    (1..m).filter(|&u| gcd(u, m) == 1).collect()
}

fn generated_subgroup(gens: &[u64], m: u64) -> Vec<u64> {
    let mut seen: BTreeSet<u64> = BTreeSet::from([residue(1, m)]);
    let mut frontier = vec![residue(1, m)];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = mul(x, g, m);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// Image of Gal(Qbar/K) in (Z/mZ)^x for the given base field K.
pub fn cyclotomic_image(m: u64, field: &BaseField) -> Result<CyclotomicSignature> {
    if m == 0 {
        return Err(Error::Zero);
    }
    let units = match field {
        BaseField::Rationals => unit_group(m),
        BaseField::Cyclotomic(d) => {
            let d = (*d).max(1);
            let big = lcm(d, m);
            let set: BTreeSet<u64> = unit_group(big)
                .into_iter()
                .filter(|&u| d == 1 || u % d == 1)
                .map(|u| residue(u, m))
                .collect();
            set.into_iter().collect()
        }
        BaseField::Generators(gens) => {
            if let Some(&g) = gens.iter().find(|&&g| m > 1 && gcd(g % m, m) != 1) {
                return Err(Error::NotCoprime {
                    residue: g,
                    modulus: m,
                });
            }
            generated_subgroup(gens, m)
        }
    };
    Ok(CyclotomicSignature { modulus: m, units })
}
