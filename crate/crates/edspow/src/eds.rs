//! The elliptic divisibility sequence B_n attached to a rational point of
//! infinite order: nP = (A_n/B_n², C_n/B_n³) with gcd(A_n·C_n, B_n) = 1 and
//! B_n > 0. Provides ranks of apparition, the valuation formula, and
//! ℓ-th-power scanning.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, PrimeTable};
use crate::curve::{Curve, Point};
use crate::{Error, Result};

/// One term of the sequence, in Silverman's normalization:
/// x(nP) = A_n/B_n² and y(nP) = C_n/B_n³ in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdsTerm {
    pub n: u64,
    pub a: BigInt,
    pub b: BigUint,
    pub c: BigInt,
}

/// Rank of apparition of p: the least index with p | B_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankRecord {
    pub p: u64,
    pub r_p: u64,
    pub base_valuation: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    AssertedComplete,
    ScannedUpTo(u64),
}

/// The data (ℓ, P_ℓ(B), N_ℓ, M_ℓ) driving every bound in the search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSet {
    pub ell: u32,
    pub indices: BTreeSet<u64>,
    pub provenance: Provenance,
}

impl PowerSet {
    pub fn n_ell(&self) -> usize {
        self.indices.len()
    }

    pub fn m_ell(&self) -> u64 {
        *self.indices.iter().next_back().expect("power set is nonempty")
    }

    pub fn contains(&self, index: u64) -> bool {
        self.indices.contains(&index)
    }

    pub fn is_asserted_complete(&self) -> bool {
        matches!(self.provenance, Provenance::AssertedComplete)
    }

    /// An asserted-complete set. Each listed index is verified to actually be
    /// an ℓ-th-power term; completeness itself is taken on trust.
    pub fn asserted(seq: &EdsSequence, ell: u32, indices: &[u64]) -> Result<Self> {
        if ell < 2 {
            return Err(Error::Config(format!("ell must be >= 2, got {ell}")));
        }
        let set: BTreeSet<u64> = indices.iter().copied().collect();
        if !set.contains(&1) {
            return Err(Error::Config("power set must contain index 1 (B_1 = 1)".into()));
        }
        for &n in &set {
            if n == 0 {
                return Err(Error::Config("power set indices must be positive".into()));
            }
            let b = seq.term_b(n)?;
            if !arith::is_perfect_power(&b, ell) {
                return Err(Error::Config(format!(
                    "asserted index {n} is not an {ell}-th power term (B_{n} = {b})"
                )));
            }
        }
        Ok(PowerSet { ell, indices: set, provenance: Provenance::AssertedComplete })
    }
}

struct CacheEntry {
    point: Point,
    term: Arc<EdsTerm>,
}

/// Lazily extended cache of terms for a fixed (curve, point) pair.
///
/// If B_1 ≠ 1 for the configured point, queries through [`term_b`] return the
/// normalized sequence B'_n = B_n/B_1, which preserves the divisibility
/// properties; [`EdsSequence::is_normalized`] reports when this is active.
/// The raw Silverman terms stay available through [`term`].
///
/// [`term_b`]: EdsSequence::term_b
/// [`term`]: EdsSequence::term
pub struct EdsSequence {
    curve: Curve,
    base: Point,
    b1: BigUint,
    cache: Mutex<BTreeMap<u64, CacheEntry>>,
    rank_cache: Mutex<BTreeMap<u64, RankRecord>>,
    overrides: Mutex<BTreeMap<u64, BigUint>>,
}

impl EdsSequence {
    pub fn new(curve: Curve, base: Point) -> Result<Self> {
        if !curve.contains(&base) {
            return Err(Error::NotOnCurve);
        }
        if base.is_infinity() {
            return Err(Error::TorsionPoint);
        }
        if !curve.assert_infinite_order(&base)? {
            return Err(Error::TorsionPoint);
        }
        let seq = EdsSequence {
            curve,
            base,
            b1: BigUint::one(),
            cache: Mutex::new(BTreeMap::new()),
            rank_cache: Mutex::new(BTreeMap::new()),
            overrides: Mutex::new(BTreeMap::new()),
        };
        let b1 = seq.term(1)?.b.clone();
        Ok(EdsSequence { b1, ..seq })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn base_point(&self) -> &Point {
        &self.base
    }

    pub fn is_normalized(&self) -> bool {
        !self.b1.is_one()
    }

    fn extract_term(&self, n: u64, point: &Point) -> Result<EdsTerm> {
        let (x, y) = match point {
            Point::Infinity => return Err(Error::TorsionPoint),
            Point::Affine { x, y } => (x, y),
        };
        // Denominators of reduced rationals are positive; the x-denominator
        // must be a perfect square and the y-denominator its cube.
        let den = x.denom().magnitude();
        let b = den.sqrt();
        assert_eq!(&(&b * &b), den, "x({n}P) denominator is not a perfect square");
        assert_eq!(
            y.denom().magnitude(),
            &(&b * &b * &b),
            "y({n}P) denominator is not B_{n}^3"
        );
        Ok(EdsTerm { n, a: x.numer().clone(), b, c: y.numer().clone() })
    }

    /// The raw Silverman term (A_n, B_n, C_n) for n ≥ 1.
    pub fn term(&self, n: u64) -> Result<Arc<EdsTerm>> {
        assert!(n >= 1, "term index must be >= 1");
        let prev = {
            let cache = self.cache.lock().unwrap();
            if let Some(entry) = cache.get(&n) {
                return Ok(entry.term.clone());
            }
            cache.get(&(n - 1)).map(|e| e.point.clone())
        };
        // Sequential scans extend the cache one addition at a time; random
        // access falls back to double-and-add.
        let point = match prev {
            Some(prev) => self.curve.add(&prev, &self.base),
            None => self.curve.scalar_mul(n, &self.base),
        };
        let term = Arc::new(self.extract_term(n, &point)?);
        let mut cache = self.cache.lock().unwrap();
        let entry = cache.entry(n).or_insert(CacheEntry { point, term });
        Ok(entry.term.clone())
    }

    /// B_n of the (normalized) sequence as a positive integer.
    pub fn term_b(&self, n: u64) -> Result<BigUint> {
        if let Some(b) = self.overrides.lock().unwrap().get(&n) {
            return Ok(b.clone());
        }
        let raw = self.term(n)?.b.clone();
        if self.b1.is_one() {
            return Ok(raw);
        }
        let (q, r) = raw.div_rem(&self.b1);
        assert!(r.is_zero(), "B_1 does not divide B_{n}; normalization broken");
        Ok(q)
    }

    /// The least n ≤ window with p | B_n, if any.
    pub fn rank_within(&self, p: u64, window: u64) -> Result<Option<RankRecord>> {
        let pb = BigUint::from(p);
        for n in 1..=window {
            let b = self.term_b(n)?;
            if (&b % &pb).is_zero() {
                let base_valuation = arith::valuation(p, &b)?;
                return Ok(Some(RankRecord { p, r_p: n, base_valuation }));
            }
        }
        Ok(None)
    }

    /// Rank of apparition, searched within the Hasse window n ≤ p + 1 + 2√p.
    ///
    /// The window bound presumes good reduction at p; if no term in the
    /// window is divisible this returns a rank-bound-violation error rather
    /// than silently scanning further (bad-reduction primes can exceed the
    /// window: on the example curve r_2 = 6 > 2 + 1 + 2√2).
    pub fn rank_of_apparition(&self, p: u64) -> Result<RankRecord> {
        if let Some(record) = self.rank_cache.lock().unwrap().get(&p) {
            return Ok(record.clone());
        }
        let window = arith::floor_kprime(p);
        match self.rank_within(p, window)? {
            Some(record) => {
                self.rank_cache.lock().unwrap().insert(p, record.clone());
                Ok(record)
            }
            None => Err(Error::RankBoundViolation { p, window }),
        }
    }

    /// ν_p(B_n) from the valuation formula:
    /// 0 if r_p ∤ n, else ν_p(n/r_p) + ν_p(B_{r_p}).
    pub fn term_valuation(&self, rank: &RankRecord, n: u64) -> u32 {
        if n % rank.r_p != 0 {
            return 0;
        }
        arith::valuation_u64(rank.p, n / rank.r_p).expect("n/r_p is positive")
            + rank.base_valuation
    }

    /// All n ≤ bound whose term is an exact ℓ-th power.
    pub fn scan_powers(&self, ell: u32, bound: u64) -> Result<PowerSet> {
        if ell < 2 {
            return Err(Error::Config(format!("ell must be >= 2, got {ell}")));
        }
        let mut indices = BTreeSet::new();
        for n in 1..=bound {
            let b = self.term_b(n)?;
            if arith::is_perfect_power(&b, ell) {
                indices.insert(n);
            }
        }
        Ok(PowerSet { ell, indices, provenance: Provenance::ScannedUpTo(bound) })
    }

    /// Primes of bad reduction for the underlying curve.
    pub fn bad_reduction_primes(&self, table: &PrimeTable) -> Result<Vec<u64>> {
        self.curve.bad_reduction_primes(table)
    }

    /// Write all computed B_n to a JSON file (index → decimal string).
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let mut map = BTreeMap::new();
        {
            let cache = self.cache.lock().unwrap();
            for (&n, entry) in cache.iter() {
                let b = if self.b1.is_one() {
                    entry.term.b.clone()
                } else {
                    &entry.term.b / &self.b1
                };
                map.insert(n.to_string(), b.to_string());
            }
        }
        for (&n, b) in self.overrides.lock().unwrap().iter() {
            map.insert(n.to_string(), b.to_string());
        }
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, &map)?;
        Ok(())
    }

    /// Load previously saved B_n values. Loaded values take precedence over
    /// recomputation in [`term_b`](EdsSequence::term_b); `verify` cross-checks
    /// them through the divisibility identities.
    pub fn load_cache(&self, path: &Path) -> Result<usize> {
        let file = std::fs::File::open(path)?;
        let map: BTreeMap<String, String> = serde_json::from_reader(file)?;
        let mut overrides = self.overrides.lock().unwrap();
        for (n, b) in &map {
            let n: u64 = n
                .parse()
                .map_err(|_| Error::Config(format!("bad cache index {n:?}")))?;
            let b: BigUint = b
                .parse()
                .map_err(|_| Error::Config(format!("bad cache value for index {n}")))?;
            overrides.insert(n, b);
        }
        Ok(map.len())
    }
}
