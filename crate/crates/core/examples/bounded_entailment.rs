// Bounded entailment: search for small countermodels.

use std::error::Error;

use siminf::entailment::{entails_bounded, is_tautology_bounded, EntailmentBound};
use siminf::fixtures;
use siminf::format::write_database;
use siminf::syntax::parse_sentence;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = fixtures::base_database();
    let sig = d.signature();
    let bound = EntailmentBound::new(3);

    let f = parse_sentence("exists x. exists y. H(x, y)", sig)?;
    let v = entails_bounded(d.theory(), &f, &bound)?;
    println!("T |= {f}: {:?} after {} structures", v.outcome, v.enumeration_size);
    assert!(v.is_entailed());

    let g = parse_sentence("E(a)", sig)?;
    let v = entails_bounded(d.theory(), &g, &bound)?;
    let witness = v.witness.as_ref().ok_or("expected a countermodel")?;
    println!("T does not entail {g}; countermodel:\n{}", write_database(witness, d.theory()));

    let taut = parse_sentence("forall x. (E(x) | ~E(x))", sig)?;
    assert!(is_tautology_bounded(&taut, &bound)?);

    let huge = EntailmentBound::new(3).with_budget(10);
    println!("tiny budget: {}", entails_bounded(d.theory(), &f, &huge).unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
