//! Runs every acceptance criterion at its stated tolerance and prints one line per criterion.

use std::fs;
use std::process::{Command, ExitCode};

use conjugate_core::acceptance::{self, CriterionOutcome};

const SEED: u64 = 7;

type Check = Box<dyn Fn() -> conjugate_core::Result<CriterionOutcome>>;

fn determinism() -> CriterionOutcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let spawn = |name: &str| {
        Command::new(env!("CARGO_BIN_EXE_conjugate"))
            .args(["selftest", "--seed", "7", "--csv", "--out"])
            .arg(dir.path().join(name))
            .output()
            .expect("run selftest")
    };
    let (a, b) = std::thread::scope(|s| {
        let a = s.spawn(|| spawn("a.csv"));
        let b = s.spawn(|| spawn("b.csv"));
        (a.join().unwrap(), b.join().unwrap())
    });
    let fa = fs::read(dir.path().join("a.csv")).unwrap_or_default();
    let fb = fs::read(dir.path().join("b.csv")).unwrap_or_default();
    let identical = !fa.is_empty() && fa == fb && a.stdout == b.stdout;
    let ok = identical && a.status.success() && b.status.success();
    CriterionOutcome {
        id: 11,
        name: "determinism",
        passed: ok,
        observed: (!identical) as u8 as f64,
        threshold: 0.0,
        detail: format!(
            "two `selftest --seed 7` runs, {} output bytes each",
            fa.len()
        ),
    }
}

fn main() -> ExitCode {
    let checks: Vec<(u32, Check)> = vec![
        (1, Box::new(acceptance::trace_distance_closed_form)),
        (2, Box::new(acceptance::recursion_consistency)),
        (3, Box::new(acceptance::channel_identity)),
        (4, Box::new(acceptance::sigma_distance)),
        (5, Box::new(|| acceptance::breidbart_probabilities(SEED))),
        (6, Box::new(acceptance::helstrom_saturation)),
        (7, Box::new(|| acceptance::protocol_correctness(SEED))),
        (8, Box::new(|| acceptance::no_signalling(SEED))),
        (9, Box::new(|| acceptance::unicity_budgets(SEED))),
        (10, Box::new(acceptance::complexity_formulas)),
    ];
    let mut failed = 0;
    for (id, check) in checks {
        match check() {
            Ok(outcome) => {
                failed += (!outcome.passed) as usize;
                println!("{}", outcome.line());
            }
            Err(e) => {
                failed += 1;
                println!("[FAIL] criterion {id:>2} error: {e}");
            }
        }
    }
    let det = determinism();
    failed += (!det.passed) as usize;
    println!("{}", det.line());
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
