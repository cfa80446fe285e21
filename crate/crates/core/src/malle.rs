//! Malle's a- and b-invariants of transitive permutation groups, and the
//! named groups used throughout the crate.

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{cyclotomic_image, BaseField, CyclotomicSignature};
use crate::error::{Error, Result};
use crate::permgrp::{self, closure, gamma_orbits, parse_generators, PermGroup, Permutation};

/// Named generator sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Z/nZ acting on itself by `j -> j + 1`.
    CyclicRegular(u64),
    Symmetric(u64),
    /// C3 wr C2 in S6, Kluners' counterexample group.
    KlunersC3WrC2,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self> {
        let mut parts = name.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let arg = parts.next();
        let num = |a: Option<&str>| -> Result<u64> {
            a.ok_or_else(|| Error::UnknownPreset(name.to_string()))?
                .parse()
                .map_err(|_| Error::UnknownPreset(name.to_string()))
        };
        let preset = match head {
            "cyclic_regular" => Preset::CyclicRegular(num(arg)?),
            "symmetric" => Preset::Symmetric(num(arg)?),
            "kluners_c3wrc2" if arg.is_none() => Preset::KlunersC3WrC2,
            _ => return Err(Error::UnknownPreset(name.to_string())),
        };
        if parts.next().is_some() {
            return Err(Error::UnknownPreset(name.to_string()));
        }
        Ok(preset)
    }
}

/// Generators of a named group.
pub fn group_preset(preset: &Preset) -> Result<Vec<Permutation>> {
    match *preset {
        Preset::CyclicRegular(n) => {
            if !(1..=30).contains(&n) {
                return Err(Error::PresetOutOfRange {
                    name: "cyclic_regular",
                    n,
                    min: 1,
                    max: 30,
                });
            }
            let cycle: Vec<usize> = (1..=n as usize).collect();
            Ok(vec![Permutation::from_cycles(n as usize, &[cycle])?])
        }
        Preset::Symmetric(n) => {
            if !(2..=8).contains(&n) {
                return Err(Error::PresetOutOfRange {
                    name: "symmetric",
                    n,
                    min: 2,
                    max: 8,
                });
            }
            let n = n as usize;
            let transposition = Permutation::from_cycles(n, &[vec![1, 2]])?;
            if n == 2 {
                return Ok(vec![transposition]);
            }
            let long = Permutation::from_cycles(n, &[(1..=n).collect()])?;
            Ok(vec![transposition, long])
        }
        Preset::KlunersC3WrC2 => parse_generators("(1 2 3); (4 5 6); (1 4)(2 5)(3 6)"),
    }
}

/// Resolves `preset:<name>[:n]` or a cycle-notation generator list.
pub fn parse_group(spec: &str) -> Result<PermGroup> {
    let gens = match spec.trim().strip_prefix("preset:") {
        Some(name) => group_preset(&Preset::parse(name)?)?,
        None => parse_generators(spec)?,
    };
    closure(&gens, permgrp::DEFAULT_CAP)
}

/// Parses `Q`, `Q(zeta_d)` or `units:m:g1,g2,...`.
pub fn parse_field(spec: &str) -> Result<(Option<u64>, BaseField)> {
    let s = spec.trim();
    if s == "Q" {
        return Ok((None, BaseField::Rationals));
    }
    if let Some(d) = s.strip_prefix("Q(zeta_").and_then(|r| r.strip_suffix(')')) {
        let d = d
            .parse()
            .map_err(|_| Error::Parse(format!("bad cyclotomic field `{spec}`")))?;
        return Ok((None, BaseField::Cyclotomic(d)));
    }
    if let Some(rest) = s.strip_prefix("units:") {
        let (m, gens) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected units:m:g1,g2 in `{spec}`")))?;
        let m = m
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus in `{spec}`")))?;
        let gens = gens
            .split(',')
            .filter(|g| !g.trim().is_empty())
            .map(|g| {
                g.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad generator `{g}`")))
            })
            .collect::<Result<Vec<u64>>>()?;
        return Ok((Some(m), BaseField::Generators(gens)));
    }
    Err(Error::Parse(format!("unknown field `{spec}`")))
}

/// Signature of `field` at the group's exponent. An explicit modulus must
/// equal that exponent.
pub fn signature_for(g: &PermGroup, modulus: Option<u64>, field: &BaseField) -> Result<CyclotomicSignature> {
    let e = g.exponent();
    if let Some(m) = modulus {
        if m != e {
            return Err(Error::ModulusMismatch { expected: e, found: m });
        }
    }
    cyclotomic_image(e, field)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MalleInvariants {
    #[serde(serialize_with = "crate::ratio_string")]
    pub a: Ratio<u64>,
    pub min_index: usize,
    pub b: usize,
    /// Class numbers (see [`PermGroup::classes`]) of minimal index.
    pub minimal_classes: Vec<usize>,
    /// Each orbit listed by its class representatives.
    pub orbits: Vec<Vec<String>>,
}

fn check_malle_input(g: &PermGroup) -> Result<()> {
    if g.order() <= 1 {
        return Err(Error::TrivialGroup);
    }
    if !g.is_transitive() {
        return Err(Error::Intransitive);
    }
    Ok(())
}

fn minimal_classes(g: &PermGroup) -> (usize, Vec<usize>) {
    let min_index = g
        .classes()
        .iter()
        .filter(|c| c.index > 0)
        .map(|c| c.index)
        .min()
        .expect("nontrivial group");
    let classes = g
        .classes()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.index == min_index)
        .map(|(i, _)| i)
        .collect();
    (min_index, classes)
}

/// `1 / min{ind(g) : g != 1}`.
pub fn a_invariant(g: &PermGroup) -> Result<Ratio<u64>> {
    check_malle_input(g)?;
    let (min_index, _) = minimal_classes(g);
    Ok(Ratio::new(1, min_index as u64))
}

/// Number of Galois orbits on the minimal-index classes.
pub fn b_invariant(g: &PermGroup, sig: &CyclotomicSignature) -> Result<usize> {
    Ok(invariants(g, sig)?.b)
}

pub fn invariants(g: &PermGroup, sig: &CyclotomicSignature) -> Result<MalleInvariants> {
    check_malle_input(g)?;
    let (min_index, minimal) = minimal_classes(g);
    let orbits = gamma_orbits(g, sig, &minimal)?;
    Ok(MalleInvariants {
        a: Ratio::new(1, min_index as u64),
        min_index,
        b: orbits.len(),
        orbits: orbits
            .iter()
            .map(|o| o.iter().map(|&c| g.classes()[c].representative.to_string()).collect())
            .collect(),
        minimal_classes: minimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{smallest_prime_factor, totient};

    fn preset(name: &str) -> PermGroup {
        parse_group(&format!("preset:{name}")).unwrap()
    }

    fn b_for(g: &PermGroup, field: BaseField) -> usize {
        b_invariant(g, &signature_for(g, None, &field).unwrap()).unwrap()
    }

    #[test]
    fn a_examples() {
        assert_eq!(a_invariant(&preset("symmetric:3")).unwrap(), Ratio::from_integer(1));
        assert_eq!(a_invariant(&preset("cyclic_regular:6")).unwrap(), Ratio::new(1, 3));
        assert_eq!(a_invariant(&preset("kluners_c3wrc2")).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn a_errors() {
        assert_eq!(a_invariant(&preset("cyclic_regular:1")), Err(Error::TrivialGroup));
        let g = parse_group("(1 2); deg=3").unwrap();
        assert_eq!(a_invariant(&g), Err(Error::Intransitive));
    }

    #[test]
    fn b_examples() {
        let z3 = preset("cyclic_regular:3");
        assert_eq!(b_for(&z3, BaseField::Rationals), 1);
        assert_eq!(b_for(&z3, BaseField::Cyclotomic(3)), 2);
        assert_eq!(b_for(&preset("kluners_c3wrc2"), BaseField::Rationals), 1);
        let (m, field) = parse_field("units:4:3").unwrap();
        assert!(matches!(
            signature_for(&z3, m, &field),
            Err(Error::ModulusMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn preset_generators() {
        let c4 = group_preset(&Preset::CyclicRegular(4)).unwrap();
        assert_eq!(c4.len(), 1);
        assert_eq!(c4[0].to_string(), "(1 2 3 4)");
        let s3: Vec<String> = group_preset(&Preset::Symmetric(3))
            .unwrap()
            .iter()
            .map(|g| g.to_string())
            .collect();
        assert_eq!(s3, vec!["(1 2)", "(1 2 3)"]);
        let k: Vec<String> = group_preset(&Preset::KlunersC3WrC2)
            .unwrap()
            .iter()
            .map(|g| g.to_string())
            .collect();
        assert_eq!(k, vec!["(1 2 3)", "(4 5 6)", "(1 4)(2 5)(3 6)"]);
        let w = preset("kluners_c3wrc2");
        assert_eq!(w.order(), 18);
        assert!(w.is_transitive());
        assert_eq!(invariants(&w, &signature_for(&w, None, &BaseField::Rationals).unwrap()).unwrap().min_index, 2);

        assert!(matches!(Preset::parse("dihedral:4"), Err(Error::UnknownPreset(_))));
        assert!(matches!(
            group_preset(&Preset::CyclicRegular(31)),
            Err(Error::PresetOutOfRange { .. })
        ));
        assert!(matches!(group_preset(&Preset::Symmetric(9)), Err(Error::PresetOutOfRange { .. })));
    }

    #[test]
    fn field_grammar() {
        assert_eq!(parse_field("Q").unwrap(), (None, BaseField::Rationals));
        assert_eq!(parse_field("Q(zeta_5)").unwrap(), (None, BaseField::Cyclotomic(5)));
        assert_eq!(
            parse_field("units:9:4,7").unwrap(),
            (Some(9), BaseField::Generators(vec![4, 7]))
        );
        assert!(parse_field("Q(i)").is_err());
    }

    #[test]
    fn cyclic_regular_closed_forms() {
        for n in 2..=30u64 {
            let g = preset(&format!("cyclic_regular:{n}"));
            let r = smallest_prime_factor(n);
            assert_eq!(a_invariant(&g).unwrap(), Ratio::new(1, n - n / r), "n={n}");
            // (r-1)/[K(zeta_r):K]
            assert_eq!(b_for(&g, BaseField::Rationals) as u64, (r - 1) / totient(r));
            assert_eq!(b_for(&g, BaseField::Cyclotomic(r)) as u64, r - 1);
        }
    }

    #[test]
    fn a_one_forces_b_one() {
        let fields = [BaseField::Rationals, BaseField::Cyclotomic(3), BaseField::Cyclotomic(4), BaseField::Cyclotomic(8)];
        for name in ["symmetric:2", "symmetric:3", "symmetric:4", "symmetric:5", "cyclic_regular:2"] {
            let g = preset(name);
            assert_eq!(a_invariant(&g).unwrap(), Ratio::from_integer(1));
            for f in &fields {
                assert_eq!(b_for(&g, f.clone()), 1, "{name}");
            }
        }
    }

    #[test]
    fn b_is_antitone_in_units() {
        for name in ["cyclic_regular:5", "cyclic_regular:7", "cyclic_regular:12", "kluners_c3wrc2", "symmetric:4"] {
            let g = preset(name);
            let full = b_for(&g, BaseField::Rationals);
            for d in 1..=14 {
                assert!(b_for(&g, BaseField::Cyclotomic(d)) >= full, "{name} d={d}");
            }
        }
    }
}
