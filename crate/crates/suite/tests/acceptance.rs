//! The eleven acceptance criteria at full size. Prints one PASS/FAIL line
//! per criterion followed by its individual checks, and exits nonzero when
//! any criterion fails.
//!
//! Positional arguments select criteria by number.

use std::process::ExitCode;
use std::time::Instant;

use coconvex::verify::{self, Level};

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for &(id, _) in &verify::CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        match verify::run(id, Level::Full) {
            Ok(outcome) => {
                print!("{}", outcome.render());
                println!("     ({:.1} s)", start.elapsed().as_secs_f64());
                if !outcome.passed() {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("FAIL {id:>2} {}: error[{}] {e}", verify::CRITERIA[id as usize - 1].1, e.code());
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
