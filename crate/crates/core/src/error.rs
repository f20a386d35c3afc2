//! Shared error type for the whole crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported 32-bit range")]
    ModulusTooLarge(u64),
    #[error("dimension {0} is unsupported (2 through 4)")]
    UnsupportedDimension(usize),
    #[error("residue encoding for n = {n}, p = {p} does not fit in 128 bits")]
    EncodingOverflow { n: usize, p: u64 },
    #[error("entry {value} is not a canonical residue mod {p}")]
    EntryOutOfRange { value: u64, p: u64 },
    #[error("matrix shape is not {n}x{n}")]
    BadShape { n: usize },
    #[error("determinant is {det}, not 1")]
    NotUnimodular { det: u64 },
    #[error("operands live in different ambient groups")]
    AmbientMismatch,
    #[error("characteristic {p} is too small for dimension {n}: the regular-semisimplicity test needs p > n")]
    SmallCharacteristic { p: u64, n: usize },
    #[error("input set must be symmetric and contain the identity")]
    AsymmetricSet,
    #[error("set has {len} elements, need at least {min}")]
    SetTooSmall { len: usize, min: usize },
    #[error("element is not regular semisimple")]
    NotRegularSemisimple,
    #[error("input set is not closed under the group product")]
    NotClosed,
    #[error("family '{0}' has no generator form")]
    NoGeneratorForm(&'static str),
    #[error("element budget exceeded: needs {needed}, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
