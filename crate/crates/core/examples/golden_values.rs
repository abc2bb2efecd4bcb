// Recompute the reference values and classify each against its expectation.

use std::error::Error;

use siminf::golden::{verify_golden, Status};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let report = verify_golden();
    for row in report.rows.iter().filter(|r| r.status != Status::Match) {
        println!("{:?} {}: expected {}, computed {}", row.status, row.id, row.expected, row.computed);
    }
    println!(
        "{} match, {} deviation, {} mismatch",
        report.matches, report.deviations, report.mismatches
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
