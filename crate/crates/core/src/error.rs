use thiserror::Error;

/// Errors raised by the library. The CLI reports parse failures as usage
/// errors (exit 2) and everything else as domain errors (exit 1).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero has no factorization and is not a unit of Q")]
    Zero,
    #[error("exponent n must be at least 2, got {0}")]
    DegreeTooSmall(u64),
    #[error("residue {residue} is not coprime to modulus {modulus}")]
    NotCoprime { residue: u64, modulus: u64 },
    #[error("group closure exceeded the element cap of {0}")]
    CapExceeded(usize),
    #[error("generators act on different degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("power {k} is not coprime to the group exponent {exponent}")]
    PowerNotCoprime { k: u64, exponent: u64 },
    #[error("signature modulus {found} does not match the group exponent {expected}")]
    ModulusMismatch { expected: u64, found: u64 },
    #[error("the trivial group has no Malle invariants")]
    TrivialGroup,
    #[error("the group does not act transitively")]
    Intransitive,
    #[error("unknown group preset `{0}`")]
    UnknownPreset(String),
    #[error("preset {name} supports n in {min}..={max}, got {n}")]
    PresetOutOfRange {
        name: &'static str,
        n: u64,
        min: u64,
        max: u64,
    },
    #[error("exact wild exponents supported only for n in {{2,3}} (got n={0})")]
    ExactUnsupported(u64),
    #[error("prime {p} divides n={n}; use the wild local computation")]
    WildPrime { p: u64, n: u64 },
    #[error("prime {p} does not divide n={n}; use the tame local computation")]
    TamePrime { p: u64, n: u64 },
    #[error("raising function vanishes on twisted sector {0}")]
    VanishingSector(u64),
    #[error("{0}")]
    Unsupported(String),
    #[error("fit needs at least {needed} ladder points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("count is zero at B={0} inside the fitting window")]
    ZeroCount(f64),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
