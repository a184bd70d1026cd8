//! Combinatorics of an arithmetic-progression index block
//! m, m+d, ..., m+(k-1)d: the smooth/rough splitting m+id = a_i·x_i, the
//! W-sets, coprime-term detection, and Pillai-type index search.

use num_integer::Integer;

use crate::arith::{le_kprime, PrimeTable};
use crate::{Error, Result};

/// For a block (m, d, k): the splits a_i·x_i and the index sets
/// W1 (a prime factor > k exists), W2 (a prime factor in (k, k'] exists) and
/// W0 = W1 \ W2, where k' = k + 1 + 2√k.
#[derive(Debug, Clone)]
pub struct BlockAnalysis {
    pub m: u64,
    pub d: u64,
    pub k: u64,
    /// (a_i, x_i) for i in [0, k).
    pub splits: Vec<(u64, u64)>,
    pub w1: Vec<usize>,
    pub w2: Vec<usize>,
    pub w0: Vec<usize>,
}

impl BlockAnalysis {
    pub fn w0_count(&self) -> usize {
        self.w0.len()
    }

    pub fn w1_count(&self) -> usize {
        self.w1.len()
    }

    pub fn w2_count(&self) -> usize {
        self.w2.len()
    }
}

/// Factor m + i·d into its k-smooth part a_i and k-rough part x_i.
pub fn split_term(table: &PrimeTable, m: u64, d: u64, k: u64, i: u64) -> Result<(u64, u64)> {
    debug_assert!(i < k);
    if k > table.limit() {
        return Err(Error::SieveCapacity { limit: table.limit(), needed: k });
    }
    let mut rough = m + i * d;
    let mut smooth = 1u64;
    for &p in table.primes() {
        if p > k || p > rough {
            break;
        }
        while rough % p == 0 {
            rough /= p;
            smooth *= p;
        }
    }
    Ok((smooth, rough))
}

/// Populate the splits and W-sets of the block.
pub fn analyze(table: &PrimeTable, m: u64, d: u64, k: u64) -> Result<BlockAnalysis> {
    if m.gcd(&d) != 1 {
        return Err(Error::InvalidBlock { m, d });
    }
    let mut splits = Vec::with_capacity(k as usize);
    let mut w1 = Vec::new();
    let mut w2 = Vec::new();
    let mut w0 = Vec::new();
    // Primes in (k, k'], by the exact comparison (p-k-1)^2 <= 4k.
    let gap_primes: Vec<u64> = table
        .primes()
        .iter()
        .copied()
        .skip_while(|&p| p <= k)
        .take_while(|&p| le_kprime(p, k))
        .collect();
    for i in 0..k {
        let (a, x) = split_term(table, m, d, k, i)?;
        let value = m + i * d;
        splits.push((a, x));
        if x > 1 {
            w1.push(i as usize);
            if gap_primes.iter().any(|&p| value % p == 0) {
                w2.push(i as usize);
            } else {
                w0.push(i as usize);
            }
        }
    }
    Ok(BlockAnalysis { m, d, k, splits, w1, w2, w0 })
}

/// The least i > 0 with gcd(m+id, m+jd) ≤ g for every j ≠ i, if any.
pub fn pillai_index(m: u64, d: u64, k: u64, g: u64) -> Result<Option<u64>> {
    if m.gcd(&d) != 1 {
        return Err(Error::InvalidBlock { m, d });
    }
    'outer: for i in 1..k {
        let vi = m + i * d;
        for j in 0..k {
            if j != i && vi.gcd(&(m + j * d)) > g {
                continue 'outer;
            }
        }
        return Ok(Some(i));
    }
    Ok(None)
}

/// All i in [0, k) whose term is coprime to every other term of the block.
pub fn coprime_isolated_indices(m: u64, d: u64, k: u64) -> Result<Vec<u64>> {
    if m.gcd(&d) != 1 {
        return Err(Error::InvalidBlock { m, d });
    }
    let mut out = Vec::new();
    'outer: for i in 0..k {
        let vi = m + i * d;
        for j in 0..k {
            if j != i && vi.gcd(&(m + j * d)) != 1 {
                continue 'outer;
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// W(Δ): the number of block terms having a prime factor > k.
pub fn count_large_factor_terms(table: &PrimeTable, m: u64, d: u64, k: u64) -> Result<usize> {
    Ok(analyze(table, m, d, k)?.w1_count())
}
