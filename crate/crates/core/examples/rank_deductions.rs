// Rank candidate deductions by how informative their planned updates are.

use std::error::Error;

use siminf::fixtures;
use siminf::format::parse_deductions;
use siminf::planner::{rank_deductions, PlanBounds};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = fixtures::base_database();
    let text = format!(
        "{}declare: b/0\nforall x. (C(x) -> ~E(x)); C(b) |- ~E(b)\n",
        fixtures::RANKING_DEDUCTIONS
    );
    let cands = parse_deductions(&text, d.signature())?;
    let ranking = rank_deductions(&d, &cands, &PlanBounds::default());
    for (i, r) in ranking.ranked.iter().enumerate() {
        println!(
            "{}. I = {:<4} steps = {} valid = {:?}  {}",
            i + 1,
            r.informativity.to_string(),
            r.plan.steps_used,
            r.valid_up_to_bound,
            r.deduction
        );
    }
    for s in &ranking.skipped {
        println!("skipped {}: {}", s.deduction, s.reason);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
