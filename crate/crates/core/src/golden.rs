//! Expected-versus-computed table over the embedded fixtures.
//!
//! Each row pairs a published value with the value computed here. Rows
//! that disagree are `Deviation` when the disagreement is a known
//! evaluation discrepancy and `Mismatch` otherwise. Rows about metrics
//! carry a per-step truth trace from the reference evaluator.

use serde::Serialize;

use crate::entailment::{is_tautology_bounded, EntailmentBound};
use crate::metrics::{
    coherency, informativity_deduction, informativity_proposition, is_new, produced_results,
    relevancy, relevant_premises, Deduction, MetricValue, RelevantPremises,
};
use crate::model::{check_correctness, holds};
use crate::planner::{plan_coherent_update, PlanBounds};
use crate::reference::{trace, TraceStep};
use crate::syntax::{parse_sentence, Formula};
use crate::updates::{build_update, build_update_with, Operation, OperationError, TheoryCheck, Update};
use crate::{fixtures, model::Database};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Match,
    Deviation,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenRow {
    pub id: String,
    pub expected: String,
    pub computed: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceStep>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenReport {
    pub rows: Vec<GoldenRow>,
    pub matches: usize,
    pub deviations: usize,
    pub mismatches: usize,
}

impl GoldenReport {
    pub fn row(&self, id: &str) -> Option<&GoldenRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// How a computed value is judged against the expected one.
enum Known {
    Exact,
    /// A documented evaluation discrepancy.
    Deviation(&'static str),
    /// A disagreement with a known cause that is nevertheless not excused.
    Conflict(&'static str),
    /// Computed on a sequence that is not a valid update; noted even on a match.
    Transcribed(&'static str),
}

struct Table {
    rows: Vec<GoldenRow>,
}

impl Table {
    fn push(&mut self, id: &str, expected: String, computed: String, known: Known, trace: Option<Vec<TraceStep>>) {
        let (status, note) = match known {
            _ if expected == computed => (Status::Match, None),
            Known::Exact => (Status::Mismatch, None),
            Known::Deviation(n) => (Status::Deviation, Some(n)),
            Known::Conflict(n) => (Status::Mismatch, Some(n)),
            Known::Transcribed(_) => (Status::Mismatch, None),
        };
        let note = note.or(match known {
            Known::Transcribed(n) => Some(n),
            _ => None,
        });
        self.rows.push(GoldenRow {
            id: id.to_string(),
            expected,
            computed,
            status,
            note: note.map(str::to_string),
            trace,
        });
    }

    fn value(&mut self, id: &str, expected: MetricValue, computed: MetricValue, known: Known, t: Vec<TraceStep>) {
        self.push(id, expected.to_string(), computed.to_string(), known, Some(t));
    }

    fn fact(&mut self, id: &str, expected: &str, computed: String, known: Known) {
        self.push(id, expected.to_string(), computed, known, None);
    }
}

fn verdict(r: &Result<Update, crate::updates::UpdateError>) -> String {
    match r {
        Ok(_) => "accepted".into(),
        Err(e) => rejection(&e.source),
    }
}

fn rejection(e: &OperationError) -> String {
    match e {
        OperationError::TheoryViolation(f) => format!("rejected: {} false", f.sentence),
        OperationError::DanglingElement { element, by } => {
            format!("rejected: {element} still referenced by {by}")
        }
        other => format!("rejected: {other}"),
    }
}

/// Strict validity of the last operation of `ops`, applied to the structure
/// that the preceding operations produce when transcribed.
fn last_step_verdict(d: &Database, ops: &[Operation]) -> String {
    let (prefix, last) = ops.split_at(ops.len() - 1);
    let before = match build_update_with(d, prefix, TheoryCheck::Record) {
        Ok(u) => u,
        Err(e) => return format!("prefix invalid: {e}"),
    };
    let prev = Database::new_unchecked(before.final_structure().clone(), d.theory().to_vec());
    verdict(&build_update(&prev, last))
}

const REPOINT_NOTE: &str = "re-pointing s to e_a falsifies C(s), which is in the theory; the structure \
     after the H step also falsifies forall x. (C(x) -> exists y. H(x, y))";
const SA_NOTE: &str = "s and a both denote e_a from the second structure on, so s = a first holds at m = 2";
const NOT_HSA_NOTE: &str = "s denotes e_a at the second structure and (e_a, e_a) is not in H, so the \
     sentence first holds at m = 2";
const NOT_EB_NOTE: &str = "~E(b) first holds at the fifth structure, so m = 5 and coherency is 5/15";
const COND_NOTE: &str = "the conditional mentions b, which is outside the base language, so it is not \
     a consequence of the theory; it is true at the end and b first appears at m = 2";
const DETACH_NOTE: &str = "the last structure of this sequence falsifies forall x. (C(x) | E(x)); \
     metrics are computed on the sequence as transcribed";

/// Builds the full table.
pub fn verify_golden() -> GoldenReport {
    let d1 = fixtures::base_database();
    let sig = fixtures::extended_signature();
    let p = |t: &str| -> Formula { parse_sentence(t, &sig).expect("fixture sentence parses") };
    let k = EntailmentBound::default();
    let mut t = Table { rows: Vec::new() };

    // databases and structural operations
    let ok = check_correctness(d1.structure(), d1.theory()).expect("in language");
    t.fact("database/base/correct", "true", ok.is_correct().to_string(), Known::Exact);
    t.fact(
        "database/base/H(l, a) & E(a)",
        "true",
        holds(d1.structure(), &p("H(l, a) & E(a)")).to_string(),
        Known::Exact,
    );
    let star = check_correctness(&fixtures::fresh_b_structure(), d1.theory()).expect("in language");
    t.fact(
        "database/fresh-b/failing",
        "forall x. C(x) | E(x)",
        star.failing.iter().map(|f| f.sentence.to_string()).collect::<Vec<_>>().join("; "),
        Known::Exact,
    );
    let alias = build_update(&d1, &fixtures::alias_b_script());
    t.fact("update/alias-b", "accepted", verdict(&alias), Known::Exact);
    t.fact(
        "update/alias-then-extend",
        "accepted",
        verdict(&build_update(&d1, &fixtures::alias_then_extend_script())),
        Known::Exact,
    );
    t.fact(
        "update/fresh-b",
        "rejected: forall x. C(x) | E(x) false",
        verdict(&build_update(&d1, &fixtures::fresh_b_script())),
        Known::Exact,
    );
    let repoint = fixtures::repoint_s_script();
    t.fact("update/repoint-s/step-1", "accepted", last_step_verdict(&d1, &repoint[..1]), Known::Conflict(REPOINT_NOTE));
    t.fact("update/repoint-s/step-2", "accepted", last_step_verdict(&d1, &repoint[..2]), Known::Conflict(REPOINT_NOTE));
    t.fact("update/repoint-s/step-3", "accepted", last_step_verdict(&d1, &repoint), Known::Conflict(REPOINT_NOTE));
    let skip = build_update_with(&d1, &fixtures::repoint_s_skip_h_script(), TheoryCheck::Record);
    t.fact(
        "update/repoint-s-skip-h/step-2",
        "rejected: e_s still referenced by H",
        verdict(&skip),
        Known::Exact,
    );

    // coherency
    let alias = alias.expect("alias update is valid");
    for f in ["E(b)", "H(l, b)", "E(b) & H(l, b)", "E(b) | H(l, b)"] {
        let f = p(f);
        t.value(&format!("coherency/alias-b/{f}"), MetricValue::new(2, 3), coherency(&alias, &f), Known::Exact, trace(&alias, &f));
    }
    let repointed = build_update_with(&d1, &repoint, TheoryCheck::Record).expect("structurally valid");
    let rows: [(&str, MetricValue, Known); 5] = [
        ("E(s)", MetricValue::new(2, 3), Known::Exact),
        ("~H(s, a)", MetricValue::new(2, 5), Known::Deviation(NOT_HSA_NOTE)),
        ("E(s) & ~H(s, a)", MetricValue::new(2, 5), Known::Deviation(NOT_HSA_NOTE)),
        ("s = a", MetricValue::zero(), Known::Conflict(SA_NOTE)),
        ("E(s) & s = a", MetricValue::zero(), Known::Conflict(SA_NOTE)),
    ];
    for (f, expected, known) in rows {
        let f = p(f);
        t.value(&format!("coherency/repoint-s/{f}"), expected, coherency(&repointed, &f), known, trace(&repointed, &f));
    }

    // relevancy and informativity
    let trivial = Update::trivial(&d1);
    let street = Deduction::new([p("E(a)")], p("exists x. E(x)"));
    let show = |r: RelevantPremises| match r {
        RelevantPremises::Undefined => "undefined".to_string(),
        RelevantPremises::Defined(v) => format!("{{{}}}", v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")),
    };
    let rp = relevant_premises(&trivial, &street, &k).expect("within budget");
    t.fact("relevant/trivial/E(a) |- exists x. E(x)", "{E(a)}", show(rp), Known::Exact);
    let rel = relevancy(&trivial, &street, &k).expect("within budget");
    t.value("relevancy/trivial/E(a) |- exists x. E(x)", MetricValue::one(), rel, Known::Exact, trace(&trivial, street.conclusion()));

    let separation = Deduction::new([p("forall x. (C(x) -> ~E(x))"), p("C(b)")], p("~E(b)"));
    let rp = relevant_premises(&alias, &separation, &k).expect("within budget");
    t.fact("relevant/alias-b/separation", "undefined", show(rp), Known::Exact);
    let detach = build_update_with(&d1, &fixtures::detach_b_script(), TheoryCheck::Record).expect("structurally valid");
    let rp = relevant_premises(&detach, &separation, &k).expect("within budget");
    t.push(
        "relevant/detach-b/separation",
        "{forall x. C(x) -> ~E(x)}".into(),
        show(rp),
        Known::Transcribed(DETACH_NOTE),
        None,
    );
    let rel = relevancy(&detach, &separation, &k).expect("within budget");
    t.value("relevancy/detach-b/separation", MetricValue::new(1, 2), rel, Known::Transcribed(DETACH_NOTE), trace(&detach, separation.conclusion()));

    let i = informativity_deduction(&trivial, &street, &k).expect("within budget");
    t.value("informativity/trivial/E(a) |- exists x. E(x)", MetricValue::one(), i, Known::Exact, trace(&trivial, street.conclusion()));
    let i = informativity_deduction(&detach, &separation, &k).expect("within budget");
    t.value("informativity/detach-b/separation", MetricValue::new(1, 6), i, Known::Transcribed(DETACH_NOTE), trace(&detach, separation.conclusion()));

    let props: [(&str, MetricValue, Known); 5] = [
        ("C(b)", MetricValue::zero(), Known::Exact),
        ("forall x. (C(x) -> ~E(x))", MetricValue::one(), Known::Exact),
        ("E(a) -> exists x. E(x)", MetricValue::zero(), Known::Exact),
        ("(forall x. (C(x) -> ~E(x))) & C(b) -> ~E(b)", MetricValue::zero(), Known::Conflict(COND_NOTE)),
        ("~E(b)", MetricValue::new(2, 5), Known::Deviation(NOT_EB_NOTE)),
    ];
    for (f, expected, known) in props {
        let f = p(f);
        let i = informativity_proposition(&detach, &f, &k).expect("within budget");
        t.value(&format!("informativity/detach-b/{f}"), expected, i, known, trace(&detach, &f));
    }

    // general claims checked on the fixtures
    let base_true = p("H(l, a) & E(a)");
    t.value("claim/base-true-has-coherency-1", MetricValue::one(), coherency(&alias, &base_true), Known::Exact, trace(&alias, &base_true));
    let taut = p("E(a) -> exists x. E(x)");
    t.value("claim/in-language-tautology-has-coherency-1", MetricValue::one(), coherency(&alias, &taut), Known::Exact, trace(&alias, &taut));
    let contra = p("C(s) & ~C(s)");
    t.value("claim/contradiction-has-coherency-0", MetricValue::zero(), coherency(&alias, &contra), Known::Exact, trace(&alias, &contra));
    let fresh_taut = p("E(b) -> E(b)");
    let h = coherency(&alias, &fresh_taut);
    t.fact(
        "claim/fresh-tautology-coherency-strictly-between-0-and-1",
        "true",
        (!h.is_zero() && h < MetricValue::one()).to_string(),
        Known::Exact,
    );
    t.fact(
        "claim/fresh-tautology-is-tautology",
        "true",
        is_tautology_bounded(&fresh_taut, &k).map_or_else(|e| e.to_string(), |v| v.to_string()),
        Known::Exact,
    );
    let empty = Deduction::new([], p("C(s)"));
    t.value("claim/empty-premises-relevancy-0", MetricValue::zero(), relevancy(&trivial, &empty, &k).expect("within budget"), Known::Exact, trace(&trivial, empty.conclusion()));
    let from_t = Deduction::new([p("C(s)"), p("~E(l)")], p("C(s) & ~E(l)"));
    t.value("claim/theory-premises-relevancy-0", MetricValue::zero(), relevancy(&trivial, &from_t, &k).expect("within budget"), Known::Exact, trace(&trivial, from_t.conclusion()));
    let cond = street.conditional();
    let i = informativity_proposition(&trivial, &cond, &k).expect("within budget");
    t.value("claim/in-language-conditional-uninformative", MetricValue::zero(), i, Known::Exact, trace(&trivial, &cond));
    let fresh_cond = separation.conditional();
    let i = informativity_proposition(&detach, &fresh_cond, &k).expect("within budget");
    t.fact("claim/fresh-conditional-informative", "true", (!i.is_zero()).to_string(), Known::Exact);

    // newness, results, planning
    t.fact("new/C(s)", "false", is_new(&d1, &p("C(s)"), &k).map_or_else(|e| e.to_string(), |v| v.to_string()), Known::Exact);
    t.fact("new/E(l)", "false", is_new(&d1, &p("E(l)"), &k).map_or_else(|e| e.to_string(), |v| v.to_string()), Known::Exact);
    t.fact("new/E(b)", "true", is_new(&d1, &p("E(b)"), &k).map_or_else(|e| e.to_string(), |v| v.to_string()), Known::Exact);
    let results = |u: &Update, d: &Deduction| match produced_results(u, d, &k) {
        Ok(v) => format!("{{{}}}", v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")),
        Err(e) => e.to_string(),
    };
    t.fact("results/trivial/E(a) |- exists x. E(x)", "{E(a); exists x. E(x)}", results(&trivial, &street), Known::Exact);
    t.fact(
        "results/detach-b/separation",
        "{forall x. C(x) -> ~E(x); ~E(b)}",
        results(&detach, &separation),
        Known::Exact,
    );
    let plan = plan_coherent_update(&d1, &p("E(b)"), &PlanBounds::new(2, 1));
    t.fact(
        "plan/E(b)",
        "insert b = e_a; H = 2/3",
        match plan {
            Ok(Some(plan)) => format!(
                "{}; H = {}",
                plan.update.ops().iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                plan.coherency
            ),
            Ok(None) => "no plan".into(),
            Err(e) => e.to_string(),
        },
        Known::Exact,
    );

    let count = |s: Status| t.rows.iter().filter(|r| r.status == s).count();
    GoldenReport {
        matches: count(Status::Match),
        deviations: count(Status::Deviation),
        mismatches: count(Status::Mismatch),
        rows: t.rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_rows() {
        let r = verify_golden();
        assert_eq!(r.row("coherency/alias-b/E(b)").unwrap().status, Status::Match);
        let d = r.row("coherency/repoint-s/~H(s, a)").unwrap();
        assert_eq!(d.status, Status::Deviation);
        assert_eq!(d.computed, "2/3");
        assert!(d.trace.is_some());
        let d = r.row("informativity/detach-b/~E(b)").unwrap();
        assert_eq!((d.status, d.computed.as_str()), (Status::Deviation, "1/3"));
        assert_eq!(r.row("informativity/trivial/E(a) |- exists x. E(x)").unwrap().status, Status::Match);
        assert_eq!(r.row("plan/E(b)").unwrap().status, Status::Match);
        assert_eq!(r.deviations, 3);
    }

    #[test]
    fn row_ids_are_unique() {
        let r = verify_golden();
        let ids: std::collections::BTreeSet<_> = r.rows.iter().map(|r| &r.id).collect();
        assert_eq!(ids.len(), r.rows.len());
    }
}
