//! A second, deliberately naive evaluator.
//!
//! Quantifiers are unfolded into finite conjunctions/disjunctions by
//! substituting domain elements for the bound variable, and the resulting
//! ground formula is evaluated. It shares no code with
//! [`crate::model::satisfies`] and is used to cross-check it and to produce
//! per-step truth traces for reports.

use serde::Serialize;

use crate::model::{Element, FiniteStructure};
use crate::syntax::{symbols_of, Formula, Term};
use crate::updates::Update;

#[derive(Clone, Debug)]
enum GTerm {
    Var(String),
    Const(String),
    Elem(Element),
}

#[derive(Clone, Debug)]
enum Ground {
    Atom(String, Vec<GTerm>),
    Eq(GTerm, GTerm),
    Not(Box<Ground>),
    And(Vec<Ground>),
    Or(Vec<Ground>),
}

fn lift(t: &Term) -> GTerm {
    match t {
        Term::Var(v) => GTerm::Var(v.clone()),
        Term::Const(c) => GTerm::Const(c.clone()),
    }
}

fn subst_term(t: &GTerm, var: &str, e: &Element) -> GTerm {
    match t {
        GTerm::Var(v) if v == var => GTerm::Elem(e.clone()),
        other => other.clone(),
    }
}

/// Unfolds `f` over `domain`, substituting elements for bound variables.
fn unfold(f: &Formula, subst: &[(String, Element)], domain: &[Element]) -> Ground {
    let term = |t: &Term| {
        let mut g = lift(t);
        // innermost binding wins
        for (v, e) in subst.iter().rev() {
            if let GTerm::Var(_) = g {
                g = subst_term(&g, v, e);
            }
        }
        g
    };
    match f {
        Formula::Atom { relation, args } => {
            Ground::Atom(relation.clone(), args.iter().map(term).collect())
        }
        Formula::Eq(a, b) => Ground::Eq(term(a), term(b)),
        Formula::Not(a) => Ground::Not(Box::new(unfold(a, subst, domain))),
        Formula::And(a, b) => Ground::And(vec![unfold(a, subst, domain), unfold(b, subst, domain)]),
        Formula::Or(a, b) => Ground::Or(vec![unfold(a, subst, domain), unfold(b, subst, domain)]),
        Formula::Implies(a, b) => Ground::Or(vec![
            Ground::Not(Box::new(unfold(a, subst, domain))),
            unfold(b, subst, domain),
        ]),
        Formula::Iff(a, b) => {
            let (ga, gb) = (unfold(a, subst, domain), unfold(b, subst, domain));
            Ground::Or(vec![
                Ground::And(vec![ga.clone(), gb.clone()]),
                Ground::And(vec![Ground::Not(Box::new(ga)), Ground::Not(Box::new(gb))]),
            ])
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let parts = domain
                .iter()
                .map(|e| {
                    let mut inner = subst.to_vec();
                    inner.push((v.clone(), e.clone()));
                    unfold(body, &inner, domain)
                })
                .collect();
            if matches!(f, Formula::Forall(..)) {
                Ground::And(parts)
            } else {
                Ground::Or(parts)
            }
        }
    }
}

fn denote(s: &FiniteStructure, t: &GTerm) -> Option<Element> {
    match t {
        GTerm::Elem(e) => Some(e.clone()),
        GTerm::Const(c) => s.constant(c).cloned(),
        GTerm::Var(_) => None,
    }
}

fn eval_ground(s: &FiniteStructure, g: &Ground) -> Option<bool> {
    match g {
        Ground::Atom(r, args) => {
            let tuple = args
                .iter()
                .map(|t| denote(s, t))
                .collect::<Option<Vec<_>>>()?;
            Some(s.relation(r)?.contains(&tuple))
        }
        Ground::Eq(a, b) => Some(denote(s, a)? == denote(s, b)?),
        Ground::Not(a) => eval_ground(s, a).map(|v| !v),
        Ground::And(parts) => {
            let mut all = true;
            for p in parts {
                all &= eval_ground(s, p)?;
            }
            Some(all)
        }
        Ground::Or(parts) => {
            let mut any = false;
            for p in parts {
                any |= eval_ground(s, p)?;
            }
            Some(any)
        }
    }
}

/// Truth of sentence `f` in `s`; `None` when `f` mentions a symbol `s` does
/// not interpret or has a free variable.
pub fn evaluate(s: &FiniteStructure, f: &Formula) -> Option<bool> {
    if !symbols_of(f).is_subset(s.signature()) {
        return None;
    }
    let domain: Vec<Element> = s.domain().iter().cloned().collect();
    eval_ground(s, &unfold(f, &[], &domain))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepTruth {
    True,
    False,
    /// The sentence uses a symbol not yet interpreted at this step.
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// 1-based position in the update.
    pub index: usize,
    pub truth: StepTruth,
    /// How each constant of the sentence is interpreted at this step.
    pub referents: Vec<(String, Option<Element>)>,
}

/// Truth of `f` at every database of `u`, computed by unfolding.
pub fn trace(u: &Update, f: &Formula) -> Vec<TraceStep> {
    let consts: Vec<String> = symbols_of(f).constants().map(str::to_string).collect();
    u.structures()
        .iter()
        .enumerate()
        .map(|(i, s)| TraceStep {
            index: i + 1,
            truth: match evaluate(s, f) {
                Some(true) => StepTruth::True,
                Some(false) => StepTruth::False,
                None => StepTruth::Absent,
            },
            referents: consts
                .iter()
                .map(|c| (c.clone(), s.constant(c).cloned()))
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{satisfies, Assignment};
    use crate::syntax::parse_sentence;

    #[test]
    fn agrees_with_satisfies_on_base_theory() {
        let d = fixtures::base_database();
        for t in d.theory() {
            assert_eq!(
                evaluate(d.structure(), t),
                Some(satisfies(d.structure(), t, &Assignment::new()).unwrap())
            );
        }
    }

    #[test]
    fn shadowed_variables_use_innermost_binding() {
        let d = fixtures::base_database();
        // inner x ranges over everything, so the body is "some element is in E"
        let f = parse_sentence("forall x. (C(x) -> exists x. E(x))", d.signature()).unwrap();
        assert_eq!(evaluate(d.structure(), &f), Some(true));
        let g = parse_sentence("exists x. (E(x) & forall x. C(x))", d.signature()).unwrap();
        assert_eq!(evaluate(d.structure(), &g), Some(false));
    }

    #[test]
    fn absent_symbols_are_reported() {
        let d = fixtures::base_database();
        let sig = d.signature().union(&crate::syntax::Signature::parse_decls("b/0").unwrap()).unwrap();
        let f = parse_sentence("E(b)", &sig).unwrap();
        assert_eq!(evaluate(d.structure(), &f), None);
    }
}
