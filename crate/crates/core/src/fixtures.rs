//! Small embedded databases and scripts used by examples, tests, and
//! `verify-paper`.

use crate::format::{parse_database, parse_database_parts, parse_script};
use crate::model::{Database, FiniteStructure};
use crate::syntax::Signature;
use crate::updates::Operation;

pub const CITIES_DB: &str = include_str!("../fixtures/cities.db");
pub const CITIES_FRESH_B_DB: &str = include_str!("../fixtures/cities_fresh_b.db");
pub const EMPTY_THEORY_DB: &str = include_str!("../fixtures/empty_theory.db");
pub const ALIAS_B_SCRIPT: &str = include_str!("../fixtures/alias_b.script");
pub const ALIAS_THEN_EXTEND_SCRIPT: &str = include_str!("../fixtures/alias_then_extend.script");
pub const FRESH_B_SCRIPT: &str = include_str!("../fixtures/fresh_b.script");
pub const REPOINT_S_SCRIPT: &str = include_str!("../fixtures/repoint_s.script");
pub const REPOINT_S_SKIP_H_SCRIPT: &str = include_str!("../fixtures/repoint_s_skip_h.script");
pub const DETACH_B_SCRIPT: &str = include_str!("../fixtures/detach_b.script");
pub const RANKING_DEDUCTIONS: &str = include_str!("../fixtures/ranking.ded");

/// Two cities and an avenue, with a four-sentence theory.
pub fn base_database() -> Database {
    parse_database(CITIES_DB).expect("embedded database is valid")
}

/// The base structure extended by a constant `b` naming a new element.
pub fn fresh_b_structure() -> FiniteStructure {
    parse_database_parts(CITIES_FRESH_B_DB)
        .expect("embedded structure parses")
        .0
}

/// The base signature plus the constant `b`.
pub fn extended_signature() -> Signature {
    base_database()
        .signature()
        .union(&Signature::parse_decls("b/0").expect("valid"))
        .expect("no conflict")
}

fn script(text: &str) -> Vec<Operation> {
    parse_script(text).expect("embedded script parses")
}

/// `insert b = e_a`.
pub fn alias_b_script() -> Vec<Operation> {
    script(ALIAS_B_SCRIPT)
}

/// Alias `b`, then add a new street.
pub fn alias_then_extend_script() -> Vec<Operation> {
    script(ALIAS_THEN_EXTEND_SCRIPT)
}

/// `insert b = e_b*`, which the theory rejects.
pub fn fresh_b_script() -> Vec<Operation> {
    script(FRESH_B_SCRIPT)
}

/// Re-point `s`, remove `H(e_s, e_a)`, then remove `e_s` from `C` and the
/// domain.
pub fn repoint_s_script() -> Vec<Operation> {
    script(REPOINT_S_SCRIPT)
}

/// As [`repoint_s_script`] without the `H` step, so the drop dangles.
pub fn repoint_s_skip_h_script() -> Vec<Operation> {
    script(REPOINT_S_SKIP_H_SCRIPT)
}

/// Alias `b`, add a street, move `b` to it, then remove it from `E`.
pub fn detach_b_script() -> Vec<Operation> {
    script(DETACH_B_SCRIPT)
}
