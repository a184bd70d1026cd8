//! Integer utilities: prime sieve, prime counting, p-adic valuation, exact
//! integer roots, and the Rosser–Schoenfeld π(x) estimates.

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};

use crate::{Error, Result};

/// All primes up to a fixed limit, produced by a sieve of Eratosthenes.
///
/// The table is immutable; [`PrimeTable::grown`] builds a larger one instead
/// of mutating in place, so a table can be shared read-only across threads.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        let mut i = 2usize;
        while i <= n {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
            i += 1;
        }
        PrimeTable { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// A new table with at least the given limit (doubling to amortize).
    pub fn grown(&self, needed: u64) -> Self {
        PrimeTable::new(needed.max(self.limit * 2))
    }

    fn require(&self, x: u64) -> Result<()> {
        if x > self.limit {
            Err(Error::SieveCapacity { limit: self.limit, needed: x })
        } else {
            Ok(())
        }
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n <= self.limit {
            return Ok(self.primes.binary_search(&n).is_ok());
        }
        // Trial division by sieved primes; enough as long as limit^2 covers n.
        self.require(n.sqrt())?;
        if n < 2 {
            return Ok(false);
        }
        for &p in &self.primes {
            if p * p > n {
                break;
            }
            if n % p == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// π(x): the number of primes ≤ x.
    pub fn pi(&self, x: u64) -> Result<usize> {
        self.require(x)?;
        Ok(self.primes.partition_point(|&p| p <= x))
    }

    /// π_d(x): the number of primes ≤ x not dividing d.
    pub fn pi_d(&self, x: u64, d: u64) -> Result<usize> {
        let total = self.pi(x)?;
        let dividing = self
            .primes
            .iter()
            .take_while(|&&p| p <= x)
            .filter(|&&p| d % p == 0)
            .count();
        Ok(total - dividing)
    }

    /// Distinct prime factors of n (requires the table to cover √n).
    pub fn factor(&self, mut n: u64) -> Result<Vec<(u64, u32)>> {
        self.require(n.sqrt())?;
        let mut out = Vec::new();
        for &p in &self.primes {
            if p * p > n {
                break;
            }
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        if n > 1 {
            out.push((n, 1));
        }
        Ok(out)
    }
}

/// ν_p(z): the exponent of the prime p in |z|. Undefined for z = 0.
pub fn valuation(p: u64, z: &BigUint) -> Result<u32> {
    if z.is_zero() {
        return Err(Error::UndefinedInput("valuation of 0".into()));
    }
    let p = BigUint::from(p);
    let mut z = z.clone();
    let mut e = 0;
    loop {
        let (q, r) = z.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        z = q;
        e += 1;
    }
}

/// ν_p(z) for machine integers; z must be nonzero.
pub fn valuation_u64(p: u64, mut z: u64) -> Result<u32> {
    if z == 0 {
        return Err(Error::UndefinedInput("valuation of 0".into()));
    }
    let mut e = 0;
    while z % p == 0 {
        z /= p;
        e += 1;
    }
    Ok(e)
}

/// ⌊z^{1/ℓ}⌋ together with a flag telling whether the root is exact.
pub fn iroot(z: &BigUint, ell: u32) -> Result<(BigUint, bool)> {
    if z.is_zero() {
        return Err(Error::UndefinedInput("iroot of 0".into()));
    }
    if ell < 2 {
        return Err(Error::OutOfDomain(format!("iroot exponent {ell} < 2")));
    }
    let root = z.nth_root(ell);
    let exact = root.pow(ell) == *z;
    Ok((root, exact))
}

/// ⌊k + 1 + 2√k⌋, computed exactly: ⌊2√k⌋ = ⌊√(4k)⌋.
pub fn floor_kprime(k: u64) -> u64 {
    k + 1 + (4 * k).sqrt()
}

/// Exact test p ≤ k + 1 + 2√k, avoiding any floating point:
/// p ≤ k+1, or (p − k − 1)² ≤ 4k.
pub fn le_kprime(p: u64, k: u64) -> bool {
    if p <= k + 1 {
        return true;
    }
    let t = p - k - 1;
    t * t <= 4 * k
}

fn step_down(x: f64, ulps: u32) -> f64 {
    let mut x = x;
    for _ in 0..ulps {
        x = x.next_down();
    }
    x
}

fn step_up(x: f64, ulps: u32) -> f64 {
    let mut x = x;
    for _ in 0..ulps {
        x = x.next_up();
    }
    x
}

// Directed-rounding margin for the libm calls below. std's ln() is within
// 1 ulp of the true value; 4 ulps on every intermediate is a comfortable
// over-approximation.
const ULPS: u32 = 4;

/// Verify the Rosser–Schoenfeld two-sided bound
/// x/log x < π(x) < (x/log x)(1 + 3/(2 log x)) for an integer x ≥ 17.
///
/// π(x) is computed exactly from the sieve. The transcendental sides are
/// evaluated with directed rounding so that a `true` verdict is rigorous: the
/// lower bound is rounded up and the upper bound rounded down before
/// comparing.
pub fn check_rosser_schoenfeld(table: &PrimeTable, x: u64) -> Result<bool> {
    if x < 17 {
        return Err(Error::OutOfDomain(format!("Rosser–Schoenfeld needs x >= 17, got {x}")));
    }
    let pi = table.pi(x)? as f64;
    let xf = x as f64; // exact for x < 2^53
    let ln = (xf).ln();
    let ln_lo = step_down(ln, ULPS);
    let ln_hi = step_up(ln, ULPS);

    // Upper estimate of x/log x: round the quotient up, the log down.
    let lower_side = step_up(xf / ln_lo, ULPS);
    // Lower estimate of (x/log x)(1 + 3/(2 log x)): round everything down.
    let q_lo = step_down(xf / ln_hi, ULPS);
    let factor_lo = step_down(1.0 + step_down(3.0 / step_up(2.0 * ln_hi, ULPS), ULPS), ULPS);
    let upper_side = step_down(q_lo * factor_lo, ULPS);

    Ok(lower_side < pi && pi < upper_side)
}

/// Exact ℓ-th root test for a `BigUint` known to be positive.
pub fn is_perfect_power(z: &BigUint, ell: u32) -> bool {
    if z.is_one() {
        return true;
    }
    match iroot(z, ell) {
        Ok((_, exact)) => exact,
        Err(_) => false,
    }
}
