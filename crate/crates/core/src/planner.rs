//! Breadth-first search for the shortest update that makes a sentence true.
//!
//! Coherency is `2/(m+1)` for the first index `m` at which the target
//! holds, so fewer operations always means higher coherency; BFS with unit
//! cost per operation therefore maximises it. Successors of a state are the
//! valid insertions and deletions over the current signature plus the
//! target's symbols, generated in canonical order: insertions before
//! deletions, symbols by name, payloads lexicographically with existing
//! elements before fresh ones. The first plan found is returned, which
//! makes results deterministic.
//!
//! Fresh elements come from a budget shared by the whole plan. They are
//! interchangeable, so by default a new one is always the lowest-numbered
//! unused id; this cuts branching without changing the minimal length.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::entailment::{is_contradiction_bounded, EntailmentBound, EntailmentError};
use crate::metrics::{coherency_detail, deduction_metrics, produced_results, Deduction, MetricValue};
use crate::model::{holds, Database, Element, FiniteStructure};
use crate::syntax::{symbols_of, Formula, Signature, SignatureError};
use crate::updates::{
    apply_structural, build_update, violation, DeletionSpec, ElementRef, InsertionSpec, Operation, Update,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlanBounds {
    pub max_steps: usize,
    /// Fresh elements available to the whole plan.
    pub max_fresh: usize,
    /// Most successors expanded from any one state.
    pub max_branch: usize,
    pub entailment: EntailmentBound,
    /// Introduce fresh elements in a fixed order only.
    pub quotient_fresh: bool,
}

impl Default for PlanBounds {
    fn default() -> Self {
        PlanBounds {
            max_steps: 3,
            max_fresh: 2,
            max_branch: 10_000,
            entailment: EntailmentBound::default(),
            quotient_fresh: true,
        }
    }
}

impl PlanBounds {
    pub fn new(max_steps: usize, max_fresh: usize) -> Self {
        PlanBounds {
            max_steps,
            max_fresh,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), PlanError> {
        if self.max_steps == 0 {
            return Err(PlanError::InvalidBounds("max_steps must be positive".into()));
        }
        if self.max_branch == 0 {
            return Err(PlanError::InvalidBounds("max_branch must be positive".into()));
        }
        if self.max_fresh > 32 {
            return Err(PlanError::InvalidBounds("max_fresh must be at most 32".into()));
        }
        if self.entailment.max_domain == 0 {
            return Err(PlanError::InvalidBounds("entailment bound must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("target is a contradiction; no update can make it true")]
    Impossible,
    #[error("no plan within {max_steps} step(s){}", if *.branch_truncated { " (successor lists were truncated)" } else { "" })]
    BoundsExhausted { max_steps: usize, branch_truncated: bool },
    #[error("target does not fit the database signature: {0}")]
    Signature(#[from] SignatureError),
    #[error("target `{0}` is not a sentence")]
    NotSentence(String),
    #[error(transparent)]
    Entailment(#[from] EntailmentError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub update: Update,
    pub coherency: MetricValue,
    pub steps_used: usize,
}

impl Serialize for Plan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Plan", 3)?;
        st.serialize_field("script", self.update.ops())?;
        st.serialize_field("steps_used", &self.steps_used)?;
        st.serialize_field("coherency", &self.coherency)?;
        st.end()
    }
}

#[derive(Clone)]
struct Node {
    structure: FiniteStructure,
    introduced: u64,
    path: Vec<Operation>,
}

struct Expander<'a> {
    theory: &'a [Formula],
    vocab: Signature,
    fresh_names: Vec<Element>,
    quotient: bool,
}

impl Expander<'_> {
    /// Payload tuples of length `n` in lexicographic order over existing
    /// elements followed by fresh ones; returns `(payload, new fresh mask)`.
    fn payloads(&self, s: &FiniteStructure, introduced: u64, n: usize) -> Vec<(Vec<ElementRef>, u64)> {
        let existing: Vec<&Element> = s.domain().iter().collect();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        self.extend(&existing, introduced, 0, n, &mut current, &mut out);
        out
    }

    fn extend(
        &self,
        existing: &[&Element],
        introduced: u64,
        chosen: u64,
        n: usize,
        current: &mut Vec<ElementRef>,
        out: &mut Vec<(Vec<ElementRef>, u64)>,
    ) {
        if current.len() == n {
            out.push((current.clone(), chosen));
            return;
        }
        for e in existing {
            current.push(ElementRef {
                id: (*e).clone(),
                fresh: false,
            });
            self.extend(existing, introduced, chosen, n, current, out);
            current.pop();
        }
        let used = introduced | chosen;
        let mut next_new_allowed = true;
        for (i, name) in self.fresh_names.iter().enumerate() {
            let bit = 1u64 << i;
            let pick = if chosen & bit != 0 {
                true
            } else if used & bit == 0 && next_new_allowed {
                // under the quotient only the lowest unused id may be introduced
                next_new_allowed = !self.quotient;
                true
            } else {
                false
            };
            if pick {
                current.push(ElementRef {
                    id: name.clone(),
                    fresh: true,
                });
                self.extend(existing, introduced, chosen | bit, n, current, out);
                current.pop();
            }
        }
    }

    /// Candidate operations in canonical order, each with the fresh ids it
    /// introduces.
    fn candidates(&self, s: &FiniteStructure, introduced: u64) -> Vec<(Operation, u64)> {
        let mut out = Vec::new();
        for sym in self.vocab.iter() {
            let payloads = self.payloads(s, introduced, sym.arity().max(1));
            if sym.is_constant() {
                let current = s.constant(sym.name());
                for (p, mask) in payloads {
                    if Some(&p[0].id) != current {
                        out.push((Operation::Insert(InsertionSpec { symbol: sym.clone(), payload: p }), mask));
                    }
                }
            } else {
                let current = s.relation(sym.name());
                for (p, mask) in payloads {
                    let tuple: Vec<Element> = p.iter().map(|e| e.id.clone()).collect();
                    if current.is_none_or(|ts| !ts.contains(&tuple)) {
                        out.push((Operation::Insert(InsertionSpec { symbol: sym.clone(), payload: p }), mask));
                    }
                }
            }
        }
        for sym in s.signature().iter() {
            if sym.is_constant() {
                let old = s.constant(sym.name()).expect("interpreted");
                for e in s.domain() {
                    if e == old {
                        continue;
                    }
                    for drop in [None, Some(old)] {
                        out.push((
                            Operation::Delete(DeletionSpec {
                                symbol: sym.clone(),
                                payload: vec![e.clone()],
                                drop: drop.into_iter().cloned().collect(),
                            }),
                            0,
                        ));
                    }
                }
            } else {
                for t in s.relation(sym.name()).expect("interpreted") {
                    let distinct: Vec<&Element> = t.iter().collect::<BTreeSet<_>>().into_iter().collect();
                    for subset in 0u32..(1 << distinct.len()) {
                        let drop: BTreeSet<Element> = distinct
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| subset & (1 << i) != 0)
                            .map(|(_, e)| (*e).clone())
                            .collect();
                        out.push((
                            Operation::Delete(DeletionSpec {
                                symbol: sym.clone(),
                                payload: t.clone(),
                                drop,
                            }),
                            0,
                        ));
                    }
                }
            }
        }
        out
    }
}

fn fresh_names(base: &FiniteStructure, count: usize) -> Vec<Element> {
    let mut names = Vec::with_capacity(count);
    let mut i = 1;
    while names.len() < count {
        let e = Element::new(format!("n{i}"));
        if !base.domain().contains(&e) {
            names.push(e);
        }
        i += 1;
    }
    names
}

fn target_vocabulary(d: &Database, f: &Formula) -> Result<Signature, PlanError> {
    if !f.is_sentence() {
        return Err(PlanError::NotSentence(f.to_string()));
    }
    Ok(d.signature().union(&symbols_of(f))?)
}

/// Shortest valid update whose final structure satisfies `f`.
///
/// `Ok(None)` means every update reachable within the fresh-element
/// budget was explored and none works; a search cut short by `max_steps`
/// or `max_branch` is reported as `BoundsExhausted` instead.
pub fn plan_coherent_update(d: &Database, f: &Formula, b: &PlanBounds) -> Result<Option<Plan>, PlanError> {
    b.validate()?;
    let vocab = target_vocabulary(d, f)?;
    if is_contradiction_bounded(f, &b.entailment)? {
        return Err(PlanError::Impossible);
    }
    let finish = |path: Vec<Operation>| -> Plan {
        let update = build_update(d, &path).expect("planned steps revalidate");
        let c = coherency_detail(&update, f);
        assert_eq!(c.m_index, Some(update.len()), "target first holds at the final step");
        Plan {
            steps_used: path.len(),
            coherency: c.value,
            update,
        }
    };
    if holds(d.structure(), f) {
        return Ok(Some(finish(Vec::new())));
    }
    let ex = Expander {
        theory: d.theory(),
        vocab,
        fresh_names: fresh_names(d.structure(), b.max_fresh),
        quotient: b.quotient_fresh,
    };
    let mut visited: HashSet<(FiniteStructure, u64)> = HashSet::new();
    visited.insert((d.structure().clone(), 0));
    let mut frontier = vec![Node {
        structure: d.structure().clone(),
        introduced: 0,
        path: Vec::new(),
    }];
    let mut truncated = false;
    for _ in 0..b.max_steps {
        let mut next = Vec::new();
        for node in &frontier {
            let mut expanded = 0;
            for (op, mask) in ex.candidates(&node.structure, node.introduced) {
                let Ok(s) = apply_structural(&node.structure, ex.theory, &op) else {
                    continue;
                };
                if violation(&s, ex.theory).is_some() {
                    continue;
                }
                if expanded == b.max_branch {
                    truncated = true;
                    break;
                }
                expanded += 1;
                let introduced = node.introduced | mask;
                if !visited.insert((s.clone(), introduced)) {
                    continue;
                }
                let mut path = node.path.clone();
                path.push(op);
                if holds(&s, f) {
                    return Ok(Some(finish(path)));
                }
                next.push(Node {
                    structure: s,
                    introduced,
                    path,
                });
            }
        }
        if next.is_empty() {
            return if truncated {
                Err(PlanError::BoundsExhausted {
                    max_steps: b.max_steps,
                    branch_truncated: true,
                })
            } else {
                Ok(None)
            };
        }
        frontier = next;
    }
    Err(PlanError::BoundsExhausted {
        max_steps: b.max_steps,
        branch_truncated: truncated,
    })
}

/// Number of operations the shortest plan needs.
pub fn changes_required(d: &Database, f: &Formula, b: &PlanBounds) -> Result<Option<usize>, PlanError> {
    Ok(plan_coherent_update(d, f, b)?.map(|p| p.steps_used))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedDeduction {
    pub deduction: Deduction,
    pub plan: Plan,
    pub coherency: MetricValue,
    pub relevancy: MetricValue,
    pub informativity: MetricValue,
    pub results: Vec<Formula>,
    /// Set when informativity is zero.
    pub uninformative: bool,
    /// `Some(false)` when bounded checking found the deduction invalid.
    pub valid_up_to_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedDeduction {
    pub deduction: Deduction,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Ranking {
    pub ranked: Vec<RankedDeduction>,
    pub skipped: Vec<SkippedDeduction>,
}

/// Plans each candidate's conclusion and ranks by informativity (higher
/// first), then fewer steps, then more results, then deduction text.
pub fn rank_deductions(d: &Database, candidates: &[Deduction], b: &PlanBounds) -> Ranking {
    let mut ranking = Ranking::default();
    for ded in candidates {
        let skip = |reason: String| SkippedDeduction {
            deduction: ded.clone(),
            reason,
        };
        let plan = match plan_coherent_update(d, ded.conclusion(), b) {
            Ok(Some(p)) => p,
            Ok(None) => {
                ranking.skipped.push(skip("no coherent update exists within the fresh-element budget".into()));
                continue;
            }
            Err(e) => {
                ranking.skipped.push(skip(e.to_string()));
                continue;
            }
        };
        let metrics = match deduction_metrics(&plan.update, ded, &b.entailment) {
            Ok(m) => m,
            Err(e) => {
                ranking.skipped.push(skip(e.to_string()));
                continue;
            }
        };
        let results = if metrics.relevancy.is_zero() {
            Vec::new()
        } else {
            match produced_results(&plan.update, ded, &b.entailment) {
                Ok(r) => r,
                Err(e) => {
                    ranking.skipped.push(skip(e.to_string()));
                    continue;
                }
            }
        };
        ranking.ranked.push(RankedDeduction {
            deduction: ded.clone(),
            coherency: metrics.coherency.value,
            relevancy: metrics.relevancy,
            informativity: metrics.informativity,
            uninformative: metrics.informativity.is_zero(),
            valid_up_to_bound: ded.is_valid_bounded(&b.entailment).ok(),
            results,
            plan,
        });
    }
    ranking.ranked.sort_by(|x, y| {
        y.informativity
            .cmp(&x.informativity)
            .then(x.plan.steps_used.cmp(&y.plan.steps_used))
            .then(y.results.len().cmp(&x.results.len()))
            .then_with(|| x.deduction.to_string().cmp(&y.deduction.to_string()))
    });
    ranking
}
