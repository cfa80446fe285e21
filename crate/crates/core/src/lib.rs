//! Torsors for mu_n and Z/nZ over Q: Kummer classes and their
//! discriminants, three height functions, Malle's a/b invariants for
//! permutation groups, and counting harnesses that fit the exponents of
//! `B^a (log B)^(b-1)`.

pub mod arith;
pub mod census;
pub mod cli;
pub mod error;
pub mod heights;
pub mod kummer;
pub mod malle;
pub mod permgrp;

pub use error::{Error, Result};

use num_rational::Ratio;

/// Renders a rational as `"p/q"` (or `"p"` when integral).
pub fn format_ratio<T>(r: &Ratio<T>) -> String
where
    T: Clone + num_integer::Integer + std::fmt::Display,
{
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn ratio_string<S, T>(r: &Ratio<T>, s: S) -> std::result::Result<S::Ok, S::Error>
where
    S: serde::Serializer,
    T: Clone + num_integer::Integer + std::fmt::Display,
{
    s.serialize_str(&format_ratio(r))
}
