// Load a database file and check that its theory holds.

use std::error::Error;

use siminf::fixtures;
use siminf::format::{parse_database, parse_database_parts, write_database};
use siminf::model::check_correctness;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = parse_database(fixtures::CITIES_DB)?;
    println!("{}", write_database(d.structure(), d.theory()));

    let broken = fixtures::CITIES_DB.replace("rel E = { e_a }", "rel E = { e_a, e_l }");
    let (s, theory) = parse_database_parts(&broken)?;
    let report = check_correctness(&s, &theory)?;
    for f in &report.failing {
        println!("fails: theory sentence {} `{}`", f.index, f.sentence);
    }
    assert!(!report.is_correct());
    assert!(parse_database(&broken).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
