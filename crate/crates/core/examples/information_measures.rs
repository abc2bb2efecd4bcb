// Coherency, relevancy and informativity of a deduction under an update.

use std::error::Error;

use siminf::entailment::EntailmentBound;
use siminf::fixtures;
use siminf::metrics::{coherency_detail, deduction_metrics, informativity_proposition, produced_results, Deduction};
use siminf::syntax::parse_sentence;
use siminf::updates::{build_update_with, TheoryCheck};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let bound = EntailmentBound::default();
    // The detached state breaks a theory sentence, so violations are recorded.
    let u = build_update_with(&fixtures::base_database(), &fixtures::detach_b_script(), TheoryCheck::Record)?;
    let sig = u.final_structure().signature().clone();
    let p = |t: &str| parse_sentence(t, &sig);

    let goal = p("~E(b)")?;
    let c = coherency_detail(&u, &goal);
    println!("coherency of {goal}: {} (first true at step {:?})", c.value, c.m_index);

    let d = Deduction::new([p("forall x. (C(x) -> ~E(x))")?, p("C(b)")?], goal);
    let m = deduction_metrics(&u, &d, &bound)?;
    println!("{d}");
    println!("  relevant premises: {:?}", m.relevant_premises.as_slice().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("  relevancy {} informativity {} ({})", m.relevancy, m.informativity, m.informativity.decimal(4));

    for f in d.premises() {
        println!("  I({f}) = {}", informativity_proposition(&u, f, &bound)?);
    }
    for r in produced_results(&u, &d, &bound)? {
        println!("  result: {r}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
