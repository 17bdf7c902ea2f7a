//! One line per acceptance criterion. Criterion 8 is expected to report
//! FAIL: the height-2 fixture declares marker {1} while its finite Γ shadow
//! is empty. Every other sub-check of 8 must pass, and the mismatch must be
//! exactly that one.

use std::time::{Duration, Instant};

use rcalg::selftest::{self, Check, SelftestConfig, CHECKS};

const LIMITS: [u64; 9] = [60, 30, 300, 300, 120, 180, 120, 120, 120];

fn line(n: usize, ok: bool, detail: &str) {
    println!(
        "criterion {n}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn describe(c: &Check, took: Duration, limit: u64) -> String {
    format!(
        "[{}] {} cases, {} failures, {:.2}s (limit {limit}s){}",
        c.id,
        c.cases,
        c.failures,
        took.as_secs_f64(),
        if c.notes.is_empty() {
            String::new()
        } else {
            format!(" {:?}", c.notes)
        }
    )
}

fn main() {
    let cfg = SelftestConfig::default();
    let mut unexpected = Vec::new();
    for (i, f) in CHECKS.iter().enumerate() {
        let n = i + 1;
        let t = Instant::now();
        let c = f(&cfg).unwrap();
        let took = t.elapsed();
        let timely = took <= Duration::from_secs(LIMITS[i]);
        let ok = c.passed && timely && c.cases > 0;
        line(n, ok, &describe(&c, took, LIMITS[i]));
        if n == 8 {
            let marker_mismatch = c.failures == 1
                && c.notes == vec!["height-2: Γ shadow [], declared markers [1]".to_string()];
            if !(ok || marker_mismatch) || !timely {
                unexpected.push(n);
            }
        } else if !ok {
            unexpected.push(n);
        }
    }
    let a = serde_json::to_vec(&selftest::run_selftest(&cfg).unwrap()).unwrap();
    let b = serde_json::to_vec(&selftest::run_selftest(&cfg).unwrap()).unwrap();
    line(
        10,
        a == b,
        &format!("{} bytes, two runs with seed {}", a.len(), cfg.seed),
    );
    if a != b {
        unexpected.push(10);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
