// Build updates step by step and watch the frame property hold.

use std::error::Error;

use siminf::fixtures;
use siminf::format::{parse_script, write_database};
use siminf::updates::{build_update, build_update_with, changed_symbols, TheoryCheck};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = fixtures::base_database();

    let u = build_update(&d, &parse_script(fixtures::ALIAS_THEN_EXTEND_SCRIPT)?)?;
    for (op, pair) in u.ops().iter().zip(u.structures().windows(2)) {
        let changed = changed_symbols(&pair[0], &pair[1]);
        println!("{:<24} changes {changed:?}", op.to_string());
        assert_eq!(changed.len(), 1);
    }
    println!("{}", write_database(u.final_structure(), u.theory()));

    let err = build_update(&d, &parse_script(fixtures::REPOINT_S_SKIP_H_SCRIPT)?).unwrap_err();
    println!("rejected: {err}");

    let detach = parse_script(fixtures::DETACH_B_SCRIPT)?;
    assert!(build_update(&d, &detach).is_err());
    let recorded = build_update_with(&d, &detach, TheoryCheck::Record)?;
    for v in recorded.theory_violations() {
        println!("step {} leaves {} theory sentence(s) false", v.step, v.failing.len());
    }
    assert!(!recorded.is_valid());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
