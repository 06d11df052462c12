//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod categories;
mod lattices;

use std::any::Any;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Runs `dgk` from the fixtures directory; returns (exit code, stdout, stderr).
fn dgk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dgk"))
        .current_dir(fixtures())
        .args(args)
        .output()
        .expect("dgk runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn panic_message(p: Box<dyn Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .map_or_else(|| "panicked".to_string(), |s| format!("panicked: {s}"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "algebraic validity fuzz", categories::validity_fuzz),
        (2, "A2 quotient by x", categories::flagship),
        (3, "contracting every object", categories::contractibility),
        (4, "Euler characteristic additivity", categories::chi_additivity),
        (5, "Serre and Coxeter matrices of A_n", lattices::serre_suite),
        (6, "kernel agreement on a degenerate lattice", lattices::degenerate_kernels),
        (7, "numerical sequence end to end", lattices::sequence_end_to_end),
        (8, "corollary route and torsion", lattices::corollary_route),
        (9, "Smith normal form contract", lattices::snf_contract),
        (10, "extension and restriction of scalars", categories::adjunction_shadow),
        (11, "CLI golden files", lattices::golden_files),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| Err(panic_message(p)));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} ({secs:.2} s)"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {reason} ({secs:.2} s)");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
