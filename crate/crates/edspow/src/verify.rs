//! Executable property suite for the divisibility identities the search
//! relies on: the valuation formula, strong divisibility, the rank-of-
//! apparition bound, the quotient gcd, the block coprimality lemma, and the
//! Rosser–Schoenfeld π(x) estimates.
//!
//! The valuation formula and the rank bound are checked at primes of good
//! reduction only: both rest on Hasse's theorem and genuinely fail at bad
//! reduction (on the example curve, disc = −2⁴·53, r₂ = 6 exceeds the Hasse
//! window and ν₂(B₁₂) = 7 ≠ 2). Bad-reduction primes are reported as
//! warnings with their observed ranks instead.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::json;

use crate::arith::{self, PrimeTable};
use crate::eds::EdsSequence;
use crate::Result;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub checks: u64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub outcomes: Vec<CheckOutcome>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.violations.is_empty())
    }

    pub fn total_checks(&self) -> u64 {
        self.outcomes.iter().map(|o| o.checks).sum()
    }

    pub fn json(&self) -> serde_json::Value {
        json!({
            "passed": self.passed(),
            "total_checks": self.total_checks(),
            "outcomes": self.outcomes.iter().map(|o| json!({
                "name": o.name,
                "checks": o.checks,
                "violations": o.violations,
            })).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

struct Suite<'a> {
    seq: &'a EdsSequence,
    table: &'a PrimeTable,
    terms: Vec<BigUint>, // terms[n] = B_n for 1 <= n <= max_n; terms[0] unused
    max_n: u64,
    report: SuiteReport,
}

impl Suite<'_> {
    fn b(&self, n: u64) -> &BigUint {
        &self.terms[n as usize]
    }

    fn outcome(&mut self, name: &str, f: impl FnOnce(&mut Self, &mut CheckOutcome)) {
        let mut outcome =
            CheckOutcome { name: name.into(), checks: 0, violations: Vec::new() };
        f(self, &mut outcome);
        // cap the noise on a badly broken input
        outcome.violations.truncate(20);
        self.report.outcomes.push(outcome);
    }

    fn strong_divisibility(&mut self) {
        self.outcome("strong-divisibility: gcd(B_m, B_n) = B_gcd(m,n)", |s, out| {
            for m in 1..=s.max_n {
                for n in m..=s.max_n {
                    out.checks += 1;
                    let g = s.b(m).gcd(s.b(n));
                    if g != *s.b(m.gcd(&n)) {
                        out.violations.push(format!(
                            "gcd(B_{m}, B_{n}) = {g} != B_{} = {}",
                            m.gcd(&n),
                            s.b(m.gcd(&n))
                        ));
                    }
                }
            }
        });
        self.outcome("divisibility: m | n => B_m | B_n", |s, out| {
            for m in 1..=s.max_n {
                for n in (m..=s.max_n).step_by(m as usize) {
                    out.checks += 1;
                    if !(s.b(n) % s.b(m)).is_zero() {
                        out.violations.push(format!("B_{m} does not divide B_{n}"));
                    }
                }
            }
        });
    }

    fn rank_and_valuation(&mut self, max_p: u64) -> Result<()> {
        let bad = self.seq.bad_reduction_primes(self.table)?;
        let primes: Vec<u64> =
            self.table.primes().iter().copied().take_while(|&p| p <= max_p).collect();
        for &p in primes.iter().filter(|p| bad.contains(p)) {
            let note = match self.seq.rank_within(p, self.max_n)? {
                Some(r) => format!(
                    "bad reduction at p = {p}: rank checks skipped (observed r_{p} = {})",
                    r.r_p
                ),
                None => format!(
                    "bad reduction at p = {p}: rank checks skipped (no rank within n <= {})",
                    self.max_n
                ),
            };
            self.report.warnings.push(note);
        }
        let good: Vec<u64> = primes.iter().copied().filter(|p| !bad.contains(p)).collect();

        let mut ranks = Vec::new();
        self.outcome("rank bound: r_p <= p + 1 + 2*sqrt(p) (good reduction)", |s, out| {
            for &p in &good {
                out.checks += 1;
                match s.seq.rank_within(p, arith::floor_kprime(p)) {
                    Ok(Some(record)) => ranks.push(record),
                    Ok(None) => out.violations.push(format!(
                        "no rank of apparition for p = {p} within the Hasse window"
                    )),
                    Err(e) => out.violations.push(format!("p = {p}: {e}")),
                }
            }
        });
        self.outcome(
            "valuation formula: nu_p(B_n) = nu_p(n/r_p) + nu_p(B_r_p) (good reduction)",
            |s, out| {
                for rank in &ranks {
                    for n in 1..=s.max_n {
                        out.checks += 1;
                        let direct = arith::valuation(rank.p, s.b(n)).unwrap();
                        let formula = s.seq.term_valuation(rank, n);
                        if direct != formula {
                            out.violations.push(format!(
                                "p = {}, n = {n}: nu_p(B_n) = {direct}, formula gives {formula}",
                                rank.p
                            ));
                        }
                    }
                }
            },
        );
        Ok(())
    }

    fn quotient_gcd(&mut self) {
        self.outcome("quotient gcd: gcd(B_m, B_n/B_m) divides n/m", |s, out| {
            for m in 1..=s.max_n {
                for n in (m..=s.max_n).step_by(m as usize) {
                    if (s.b(n) % s.b(m)).is_zero() {
                        out.checks += 1;
                        let g = s.b(m).gcd(&(s.b(n) / s.b(m)));
                        if !(BigUint::from(n / m) % &g).is_zero() {
                            out.violations.push(format!(
                                "gcd(B_{m}, B_{n}/B_{m}) = {g} does not divide {}",
                                n / m
                            ));
                        }
                    }
                }
            }
        });
    }

    fn block_coprimality(&mut self) -> Result<()> {
        // gcd(B_x_i, prod_{j != i} B_{m+jd}) = 1 and
        // gcd(B_x_i, B_{m+id}/B_x_i) | a_i, over all blocks with indices
        // inside the computed range.
        let max_n = self.max_n;
        let table = self.table;
        let mut failures = Vec::new();
        let mut checks = 0u64;
        for d in 1..max_n {
            for m in 1..max_n {
                if m.gcd(&d) != 1 {
                    continue;
                }
                let mut k = 2;
                while m + (k - 1) * d <= max_n {
                    let analysis = crate::apblocks::analyze(table, m, d, k)?;
                    for &i in &analysis.w1 {
                        let (a_i, x_i) = analysis.splits[i];
                        let term = m + i as u64 * d;
                        checks += 1;
                        let b_x = self.b(x_i).clone();
                        let mut rest = BigUint::one();
                        for j in 0..k {
                            if j != i as u64 {
                                rest *= self.b(m + j * d);
                            }
                        }
                        if !b_x.gcd(&rest).is_one() {
                            failures.push(format!(
                                "block ({m},{d},{k}), i = {i}: gcd(B_{x_i}, rest) != 1"
                            ));
                        }
                        if (self.b(term) % &b_x).is_zero() {
                            let g = b_x.gcd(&(self.b(term) / &b_x));
                            if !(BigUint::from(a_i) % &g).is_zero() {
                                failures.push(format!(
                                    "block ({m},{d},{k}), i = {i}: gcd(B_{x_i}, \
                                     B_{term}/B_{x_i}) = {g} does not divide a_i = {a_i}"
                                ));
                            }
                        } else {
                            failures.push(format!(
                                "block ({m},{d},{k}), i = {i}: B_{x_i} does not divide B_{term}"
                            ));
                        }
                    }
                    k += 1;
                }
            }
        }
        self.outcome("block coprimality: rough parts are coprime to the rest", |_, out| {
            out.checks = checks;
            out.violations = failures;
        });
        Ok(())
    }

    fn rosser_schoenfeld(&mut self, rs_max: u64) -> Result<()> {
        let table = self.table;
        let mut violations = Vec::new();
        let mut checks = 0u64;
        for x in 17..=rs_max {
            checks += 1;
            if !arith::check_rosser_schoenfeld(table, x)? {
                violations.push(format!("Rosser–Schoenfeld bound fails at x = {x}"));
            }
        }
        self.outcome("Rosser–Schoenfeld: x/log x < pi(x) < (x/log x)(1 + 3/(2 log x))", |_, out| {
            out.checks = checks;
            out.violations = violations;
        });
        Ok(())
    }
}

/// Run the whole identity suite over terms B_1..B_max_n, primes up to max_p,
/// and Rosser–Schoenfeld over [17, rs_max].
pub fn run_suite(
    seq: &EdsSequence,
    table: &PrimeTable,
    max_n: u64,
    max_p: u64,
    rs_max: u64,
) -> Result<SuiteReport> {
    let mut terms = vec![BigUint::one()];
    for n in 1..=max_n {
        terms.push(seq.term_b(n)?);
    }
    let mut suite = Suite {
        seq,
        table,
        terms,
        max_n,
        report: SuiteReport { outcomes: Vec::new(), warnings: Vec::new() },
    };
    if max_n <= 1 {
        suite.report.warnings.push(format!(
            "max_n = {max_n}: term identities are vacuous at this range"
        ));
    }
    suite.strong_divisibility();
    suite.rank_and_valuation(max_p)?;
    suite.quotient_gcd();
    suite.block_coprimality()?;
    suite.rosser_schoenfeld(rs_max)?;
    Ok(suite.report)
}
