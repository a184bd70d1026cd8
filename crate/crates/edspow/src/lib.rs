//! Exact arithmetic for elliptic divisibility sequences (EDS) and for the
//! enumeration of perfect-power products of their terms taken along
//! arithmetic progressions of indices.
//!
//! The library is organized bottom-up:
//!
//! * [`arith`] — prime sieve, prime counting, p-adic valuations, integer roots;
//! * [`curve`] — the group law on a long-Weierstrass curve over ℚ;
//! * [`eds`] — the sequence `B_n` extracted from the multiples of a rational
//!   point, ranks of apparition, and power scanning;
//! * [`apblocks`] — smooth/rough splitting and W-set analysis of an index
//!   block `m, m+d, ..., m+(k-1)d`;
//! * [`bounds`] — exact evaluation of the bound chain that certifies a finite
//!   search box;
//! * [`solver`] — pruned enumeration of all solutions of
//!   `B_m B_{m+d} ... B_{m+(k-1)d} = y^ℓ` inside the certified box;
//! * [`verify`] — the executable property suite for the divisibility lemmas;
//! * [`config`] — CLI job configuration.

pub mod apblocks;
pub mod arith;
pub mod bounds;
pub mod config;
pub mod curve;
pub mod eds;
pub mod solver;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("undefined input: {0}")]
    UndefinedInput(String),
    #[error("sieve limit {limit} too small for query up to {needed}")]
    SieveCapacity { limit: u64, needed: u64 },
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("curve is singular (discriminant = 0)")]
    SingularCurve,
    #[error("point does not lie on the curve")]
    NotOnCurve,
    #[error("base point is a torsion point")]
    TorsionPoint,
    #[error("no rank of apparition for p = {p} within n <= {window}")]
    RankBoundViolation { p: u64, window: u64 },
    #[error("invalid block: gcd(m, d) must be 1 (got m = {m}, d = {d})")]
    InvalidBlock { m: u64, d: u64 },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
