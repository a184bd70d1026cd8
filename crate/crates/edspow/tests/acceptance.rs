//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Criteria with stated runtime limits enforce them.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use edspow::arith::{self, PrimeTable};
use edspow::bounds::{c2_for_k, neweq_holds, BoundCertificate};
use edspow::curve::{Curve, Point};
use edspow::eds::{EdsSequence, PowerSet};
use edspow::solver::{self, SolveOptions};
use edspow::{apblocks, verify};

fn example_sequence() -> EdsSequence {
    let curve = Curve::from_integers(1, 1, 0, -7, 5).unwrap();
    EdsSequence::new(curve, Point::from_integers(2, -3)).unwrap()
}

fn table() -> PrimeTable {
    PrimeTable::new(250_000)
}

fn power_set(seq: &EdsSequence, ell: u32) -> PowerSet {
    let indices: &[u64] = if ell == 7 { &[1, 2, 3, 4, 7, 12] } else { &[1, 2, 3, 4, 7] };
    PowerSet::asserted(seq, ell, indices).unwrap()
}

/// Run a criterion, print its one-line verdict, and fail the test on error.
fn criterion(name: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let mut outcome = body();
    let elapsed = start.elapsed();
    if let (Ok(()), Some(limit)) = (&outcome, limit) {
        if elapsed > limit {
            outcome = Err(format!("runtime {elapsed:?} exceeds limit {limit:?}"));
        }
    }
    match &outcome {
        Ok(()) => println!("[PASS] {name} ({elapsed:?})"),
        Err(e) => println!("[FAIL] {name}: {e}"),
    }
    assert!(outcome.is_ok(), "{name}: {:?}", outcome);
}

fn check<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

#[test]
fn criterion_1_sequence_reproduction() {
    criterion(
        "criterion 1: sequence reproduction",
        Some(Duration::from_secs(1)),
        || {
            let seq = example_sequence();
            for n in [1u64, 2, 3, 4, 7] {
                check(&format!("B_{n}"), seq.term_b(n).unwrap(), BigUint::one())?;
            }
            check("B_12", seq.term_b(12).unwrap(), BigUint::from(128u32))
        },
    );
}

/// The 13 tuples with y = 1, shared by every exponent.
fn y1_tuples() -> BTreeSet<(u64, u64, u64, String)> {
    [
        (1, 1, 2),
        (2, 1, 2),
        (3, 1, 2),
        (1, 2, 2),
        (1, 3, 2),
        (4, 3, 2),
        (3, 4, 2),
        (2, 5, 2),
        (1, 6, 2),
        (1, 1, 3),
        (2, 1, 3),
        (1, 3, 3),
        (1, 1, 4),
    ]
    .into_iter()
    .map(|(m, d, k)| (m, d, k, "1".to_string()))
    .collect()
}

fn ell7_tuples() -> BTreeSet<(u64, u64, u64, String)> {
    let mut set = y1_tuples();
    set.insert((7, 5, 2, "2".into()));
    set.insert((1, 11, 2, "2".into()));
    set.insert((2, 5, 3, "2".into()));
    set
}

#[test]
fn criterion_2_solution_lists() {
    criterion(
        "criterion 2: solution lists",
        Some(Duration::from_secs(60)),
        || {
            // ell = 7 through the CLI binary on the bundled config.
            let config = format!("{}/configs/example.json", env!("CARGO_MANIFEST_DIR"));
            let output = Command::new(env!("CARGO_BIN_EXE_edspow"))
                .args(["solve", "--config", &config])
                .output()
                .map_err(|e| format!("spawn: {e}"))?;
            if !output.status.success() {
                return Err(format!(
                    "solve exited with {:?}: {}",
                    output.status.code(),
                    String::from_utf8_lossy(&output.stderr)
                ));
            }
            let stdout = String::from_utf8_lossy(&output.stdout);
            let mut tuples = BTreeSet::new();
            let mut saw_report = false;
            for line in stdout.lines().filter(|l| !l.trim().is_empty()) {
                let value: serde_json::Value =
                    serde_json::from_str(line).map_err(|e| format!("bad JSONL line: {e}"))?;
                if let Some(report) = value.get("report") {
                    saw_report = true;
                    check(
                        "completeness",
                        report["completeness"].clone(),
                        serde_json::json!("complete"),
                    )?;
                    check("conditional", report["conditional"].clone(), serde_json::json!(false))?;
                } else {
                    tuples.insert((
                        value["m"].as_u64().ok_or("missing m")?,
                        value["d"].as_u64().ok_or("missing d")?,
                        value["k"].as_u64().ok_or("missing k")?,
                        value["y"].as_str().ok_or("missing y")?.to_string(),
                    ));
                }
            }
            if !saw_report {
                return Err("no trailing report line in solve output".into());
            }
            check("ell = 7 tuple count", tuples.len(), 16)?;
            check("ell = 7 tuples", tuples, ell7_tuples())?;

            // ell in {2, 3, 5} through the library.
            let seq = example_sequence();
            let t = table();
            for ell in [2u32, 3, 5] {
                let set = power_set(&seq, ell);
                let report =
                    solver::solve(&seq, &t, &set, &SolveOptions::default()).map_err(|e| e.to_string())?;
                if report.is_truncated() {
                    return Err(format!("ell = {ell}: search truncated"));
                }
                let got: BTreeSet<_> = report
                    .solutions
                    .iter()
                    .map(|s| (s.m, s.d, s.k, s.y.to_string()))
                    .collect();
                check(&format!("ell = {ell} tuple count"), got.len(), 13)?;
                check(&format!("ell = {ell} tuples"), got, y1_tuples())?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_3_bound_chain() {
    criterion("criterion 3: bound chain", None, || {
        let seq = example_sequence();
        let t = table();
        for ell in [7u32, 2] {
            let set = power_set(&seq, ell);
            let cert = BoundCertificate::build(&t, &set, 100_000).map_err(|e| e.to_string())?;
            check(&format!("ell = {ell} k_max"), cert.k_max, 48)?;
            check(&format!("ell = {ell} unexcluded k >= 49"), cert.unexcluded_k.len(), 0)?;
            for regime in &cert.regimes {
                if regime.min_w0_lower < 1 {
                    return Err(format!(
                        "ell = {ell}, regime {}: min w0 lower bound {} < 1 at k = {}",
                        regime.regime, regime.min_w0_lower, regime.at_k
                    ));
                }
            }
            for k in 2..=48u64 {
                check(
                    &format!("ell = {ell} m+d bound at k = {k}"),
                    cert.md_bound_per_k[&k],
                    c2_for_k(k).unwrap() * set.m_ell(),
                )?;
            }
            if ell == 7 {
                check("ell = 7 max m+d bound", *cert.md_bound_per_k.values().max().unwrap(), 36)?;
            }
            if !cert.reverify(&t, &set).map_err(|e| e.to_string())? {
                return Err(format!("ell = {ell}: certificate failed re-verification"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_4_inequality_thresholds() {
    criterion("criterion 4: inequality thresholds", None, || {
        let t = table();
        if neweq_holds(&t, 41, 1).unwrap() {
            return Err("inequality claims to hold at k = 41".into());
        }
        for k in 42..=10_000u64 {
            if !neweq_holds(&t, k, 1).unwrap() {
                return Err(format!("inequality fails at k = {k}"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_5_lemma_property_suite() {
    criterion(
        "criterion 5: divisibility property suite",
        Some(Duration::from_secs(300)),
        || {
            let seq = example_sequence();
            let t = table();
            let report = verify::run_suite(&seq, &t, 60, 50, 100_000).map_err(|e| e.to_string())?;
            for outcome in &report.outcomes {
                if !outcome.violations.is_empty() {
                    return Err(format!(
                        "{}: {} violation(s), first: {}",
                        outcome.name,
                        outcome.violations.len(),
                        outcome.violations[0]
                    ));
                }
            }
            if report.total_checks() == 0 {
                return Err("suite ran zero checks".into());
            }
            Ok(())
        },
    );
}

/// Independent enumerator: no pruning, every coprime block with
/// m + (k-1)d <= bound, direct product and integer-root test.
fn brute_force(
    terms: &[BigUint],
    ell: u32,
    bound: u64,
) -> BTreeSet<(u64, u64, u64, String)> {
    let mut out = BTreeSet::new();
    for d in 1..bound {
        for m in 1..bound {
            if m.gcd(&d) != 1 {
                continue;
            }
            let mut product = terms[m as usize].clone();
            let mut k = 2u64;
            while m + (k - 1) * d <= bound {
                product *= &terms[(m + (k - 1) * d) as usize];
                let (root, exact) = arith::iroot(&product, ell).unwrap();
                if exact {
                    out.insert((m, d, k, root.to_string()));
                }
                k += 1;
            }
        }
    }
    out
}

#[test]
fn criterion_6_oracle_equivalence() {
    criterion("criterion 6: oracle equivalence", None, || {
        let seq = example_sequence();
        let t = table();
        let bound = 60u64;
        let mut terms = vec![BigUint::one()];
        for n in 1..=bound {
            terms.push(seq.term_b(n).unwrap());
        }
        for ell in [2u32, 3, 5, 7] {
            let set = power_set(&seq, ell);
            // guard the asserted completeness inside the box
            let scanned = seq.scan_powers(ell, bound).map_err(|e| e.to_string())?;
            check(&format!("ell = {ell} power indices <= {bound}"), scanned.indices, set.indices.clone())?;

            let report =
                solver::solve(&seq, &t, &set, &SolveOptions::default()).map_err(|e| e.to_string())?;
            if report.is_truncated() {
                return Err(format!("ell = {ell}: search truncated inside the box"));
            }
            let solver_in_box: BTreeSet<_> = report
                .solutions
                .iter()
                .filter(|s| s.m + (s.k - 1) * s.d <= bound)
                .map(|s| (s.m, s.d, s.k, s.y.to_string()))
                .collect();
            let oracle = brute_force(&terms, ell, bound);
            check(&format!("ell = {ell} solutions in box"), solver_in_box, oracle)?;
        }
        Ok(())
    });
}

#[test]
fn criterion_7_pillai_existence() {
    criterion("criterion 7: Pillai-type existence", None, || {
        for d in 1..100u64 {
            for m in 1..=(100 - d) {
                if m.gcd(&d) != 1 {
                    continue;
                }
                for k in 2..=48u64 {
                    let g = match k {
                        2..=16 => 1,
                        17..=24 => 2,
                        _ => 3,
                    };
                    if apblocks::pillai_index(m, d, k, g).unwrap().is_none() {
                        return Err(format!("no index with gcd <= {g} in block ({m},{d},{k})"));
                    }
                }
            }
        }
        Ok(())
    });
}
