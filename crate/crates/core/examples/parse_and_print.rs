// Parse sentences against a signature and print them back.

use std::error::Error;

use siminf::syntax::{parse_formula, parse_sentence, Signature};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sig = Signature::parse_decls("C/1 E/1 H/2 s/0 a/0")?;
    for text in [
        "forall x. (C(x) -> exists y. H(x, y))",
        "~E(s) & (C(a) | s = a)",
        "exists x. forall y. (H(x, y) <-> ~x = y)",
    ] {
        let f = parse_sentence(text, &sig)?;
        let printed = f.to_string();
        assert_eq!(parse_sentence(&printed, &sig)?, f);
        println!("{text}\n  => {printed}  (depth {})", f.depth());
    }

    let open = parse_formula("H(x, s)", &sig)?;
    println!("free variables of {open}: {:?}", open.free_variables());
    assert!(parse_sentence("H(x, s)", &sig).is_err());
    assert!(parse_sentence("Q(s)", &sig).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
