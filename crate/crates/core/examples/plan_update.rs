// Find a shortest update that makes a sentence true.

use std::error::Error;

use siminf::fixtures;
use siminf::format::write_script;
use siminf::planner::{plan_coherent_update, PlanBounds, PlanError};
use siminf::syntax::parse_sentence;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = fixtures::base_database();
    let sig = fixtures::extended_signature();
    let bounds = PlanBounds::new(3, 1);

    for text in ["E(b)", "exists x. (E(x) & ~C(x) & ~x = a)", "E(s) & ~E(s)"] {
        let f = parse_sentence(text, &sig)?;
        match plan_coherent_update(&d, &f, &bounds) {
            Ok(Some(plan)) => print!("{text}: coherency {}\n{}", plan.coherency, write_script(plan.update.ops())),
            Ok(None) => println!("{text}: unreachable"),
            Err(PlanError::Impossible) => println!("{text}: contradiction"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
