//! Bounded semantic entailment by exhaustive enumeration of finite structures.
//!
//! `T ⊨ f` is checked over every structure with domain size `1..=k` that
//! interprets the symbols of `T` and `f`. A countermodel is always a genuine
//! refutation; "entailed" only means no countermodel exists up to `k`.
//!
//! Structures are enumerated symbol by symbol (constants, then relations,
//! each in name order). A theory sentence is evaluated as soon as every
//! symbol it mentions has been assigned, which prunes whole subtrees; the
//! target is treated the same way, since once it is true no extension of
//! that partial interpretation can falsify it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{Element, FiniteStructure};
use crate::syntax::{symbols_of, symbols_of_all, Formula, Signature, SignatureError, Term};

pub const DEFAULT_MAX_DOMAIN: usize = 3;
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// How the enumerator treats isomorphic copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// Constants are assigned in restricted-growth order: the i-th constant
    /// may only use an element already used by an earlier constant or the
    /// next unused one. Every structure is isomorphic to one of these.
    PinConstants,
    /// Every interpretation is enumerated.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EntailmentBound {
    pub max_domain: usize,
    /// Largest number of structures the enumeration may range over.
    pub budget: u64,
    pub symmetry: Symmetry,
}

impl EntailmentBound {
    pub fn new(max_domain: usize) -> Self {
        EntailmentBound {
            max_domain,
            ..Default::default()
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }
}

impl Default for EntailmentBound {
    fn default() -> Self {
        EntailmentBound {
            max_domain: DEFAULT_MAX_DOMAIN,
            budget: DEFAULT_BUDGET,
            symmetry: Symmetry::PinConstants,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntailmentError {
    #[error("maximum domain size must be at least 1")]
    InvalidBound,
    #[error("enumeration over {required} structures exceeds the budget of {budget}")]
    BudgetExceeded { required: String, budget: u64 },
    #[error("`{0}` is not a sentence")]
    NotSentence(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    EntailedUpToBound,
    CountermodelFound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentVerdict {
    pub outcome: Outcome,
    /// First countermodel in enumeration order; present iff one was found.
    pub witness: Option<FiniteStructure>,
    pub bound: usize,
    /// Number of structures the enumeration ranges over (before pruning).
    pub enumeration_size: u64,
}

impl EntailmentVerdict {
    pub fn is_entailed(&self) -> bool {
        self.outcome == Outcome::EntailedUpToBound
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Const(usize),
    Var(usize),
}

#[derive(Debug, Clone)]
enum Code {
    Rel(usize, Vec<Slot>),
    Eq(Slot, Slot),
    Not(Box<Code>),
    And(Box<Code>, Box<Code>),
    Or(Box<Code>, Box<Code>),
    Implies(Box<Code>, Box<Code>),
    Iff(Box<Code>, Box<Code>),
    Forall(usize, Box<Code>),
    Exists(usize, Box<Code>),
}

struct Vocabulary {
    constants: Vec<String>,
    relations: Vec<(String, usize)>,
}

impl Vocabulary {
    fn new(sig: &Signature) -> Self {
        Vocabulary {
            constants: sig.constants().map(str::to_string).collect(),
            relations: sig.relations().map(|(n, a)| (n.to_string(), a)).collect(),
        }
    }

    fn levels(&self) -> usize {
        self.constants.len() + self.relations.len()
    }

    fn const_level(&self, name: &str) -> usize {
        self.constants.iter().position(|c| c == name).expect("constant in vocabulary")
    }

    fn rel_index(&self, name: &str) -> usize {
        self.relations
            .iter()
            .position(|(r, _)| r == name)
            .expect("relation in vocabulary")
    }
}

struct Compiled {
    code: Code,
    /// Enumeration level after which the sentence can be evaluated;
    /// `None` when it mentions no symbol at all.
    ready: Option<usize>,
    depth: usize,
}

fn compile(f: &Formula, vocab: &Vocabulary) -> Compiled {
    fn slot(t: &Term, vocab: &Vocabulary, scope: &[&str], ready: &mut Option<usize>) -> Slot {
        match t {
            Term::Var(v) => {
                let i = scope.iter().rposition(|s| s == v).expect("sentence has no free variables");
                Slot::Var(i)
            }
            Term::Const(c) => {
                let lvl = vocab.const_level(c);
                *ready = (*ready).max(Some(lvl));
                Slot::Const(lvl)
            }
        }
    }
    fn go<'a>(
        f: &'a Formula,
        vocab: &Vocabulary,
        scope: &mut Vec<&'a str>,
        ready: &mut Option<usize>,
        depth: &mut usize,
    ) -> Code {
        let mut bin = |a: &'a Formula, b: &'a Formula, scope: &mut Vec<&'a str>| {
            (
                Box::new(go(a, vocab, scope, ready, depth)),
                Box::new(go(b, vocab, scope, ready, depth)),
            )
        };
        match f {
            Formula::Atom { relation, args } => {
                let r = vocab.rel_index(relation);
                *ready = (*ready).max(Some(vocab.constants.len() + r));
                let slots = args.iter().map(|t| slot(t, vocab, scope, ready)).collect();
                Code::Rel(r, slots)
            }
            Formula::Eq(a, b) => Code::Eq(slot(a, vocab, scope, ready), slot(b, vocab, scope, ready)),
            Formula::Not(a) => Code::Not(Box::new(go(a, vocab, scope, ready, depth))),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b, scope);
                Code::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b, scope);
                Code::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b, scope);
                Code::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b, scope);
                Code::Iff(a, b)
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let idx = scope.len();
                scope.push(v);
                *depth = (*depth).max(scope.len());
                let body = Box::new(go(body, vocab, scope, ready, depth));
                scope.pop();
                if matches!(f, Formula::Forall(..)) {
                    Code::Forall(idx, body)
                } else {
                    Code::Exists(idx, body)
                }
            }
        }
    }
    let mut ready = None;
    let mut depth = 0;
    let code = go(f, vocab, &mut Vec::new(), &mut ready, &mut depth);
    Compiled { code, ready, depth }
}

struct Interp {
    n: usize,
    consts: Vec<usize>,
    rels: Vec<u64>,
}

impl Interp {
    #[inline]
    fn value(&self, s: Slot, env: &[usize]) -> usize {
        match s {
            Slot::Const(c) => self.consts[c],
            Slot::Var(v) => env[v],
        }
    }

    fn eval(&self, code: &Code, env: &mut [usize]) -> bool {
        match code {
            Code::Rel(r, slots) => {
                let idx = slots.iter().fold(0usize, |acc, s| acc * self.n + self.value(*s, env));
                (self.rels[*r] >> idx) & 1 == 1
            }
            Code::Eq(a, b) => self.value(*a, env) == self.value(*b, env),
            Code::Not(a) => !self.eval(a, env),
            Code::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Code::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Code::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Code::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Code::Forall(d, body) => (0..self.n).all(|v| {
                env[*d] = v;
                self.eval(body, env)
            }),
            Code::Exists(d, body) => (0..self.n).any(|v| {
                env[*d] = v;
                self.eval(body, env)
            }),
        }
    }
}

/// Number of constant assignments over `n` elements: all of them, or only
/// restricted-growth ones.
fn constant_assignments(constants: usize, n: usize, symmetry: Symmetry) -> u128 {
    match symmetry {
        Symmetry::Exhaustive => (n as u128).saturating_pow(constants as u32),
        Symmetry::PinConstants => {
            // ways[m] = prefixes using exactly m distinct elements
            let mut ways = vec![0u128; n + 1];
            ways[0] = 1;
            for _ in 0..constants {
                let mut next = vec![0u128; n + 1];
                for m in 0..=n {
                    if ways[m] == 0 {
                        continue;
                    }
                    next[m] = next[m].saturating_add(ways[m].saturating_mul(m as u128));
                    if m < n {
                        next[m + 1] = next[m + 1].saturating_add(ways[m]);
                    }
                }
                ways = next;
            }
            ways.iter().fold(0u128, |a, &w| a.saturating_add(w))
        }
    }
}

/// Total number of structures over `vocab` with domain sizes `1..=k`;
/// `None` when it does not fit in 128 bits or a relation needs more than
/// 63 tuple bits.
fn enumeration_size(vocab: &Vocabulary, k: usize, symmetry: Symmetry) -> Option<u128> {
    let mut total: u128 = 0;
    for n in 1..=k {
        let mut count = constant_assignments(vocab.constants.len(), n, symmetry);
        for &(_, arity) in &vocab.relations {
            let bits = (n as u128).checked_pow(arity as u32)?;
            if bits > 63 {
                return None;
            }
            count = count.checked_mul(1u128 << bits)?;
        }
        total = total.checked_add(count)?;
    }
    Some(total)
}

struct Search<'a> {
    vocab: &'a Vocabulary,
    theory: &'a [Compiled],
    target: &'a Compiled,
    symmetry: Symmetry,
    interp: Interp,
    env: Vec<usize>,
    /// theory indices grouped by the level after which they are checked
    by_level: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn checks_pass(&mut self, level: Option<usize>) -> bool {
        let ids: &[usize] = match level {
            None => &[],
            Some(l) => &self.by_level[l],
        };
        for &i in ids {
            if !self.interp.eval(&self.theory[i].code, &mut self.env) {
                return false;
            }
        }
        if self.target.ready == level && self.interp.eval(&self.target.code, &mut self.env) {
            return false;
        }
        true
    }

    /// Depth-first over symbol levels; `true` once a countermodel is fixed
    /// in `self.interp`.
    fn descend(&mut self, level: usize, max_used: Option<usize>) -> bool {
        if level == self.vocab.levels() {
            return true;
        }
        let n = self.interp.n;
        if level < self.vocab.constants.len() {
            let limit = match self.symmetry {
                Symmetry::Exhaustive => n,
                Symmetry::PinConstants => max_used.map_or(1, |m| (m + 2).min(n)),
            };
            for v in 0..limit {
                self.interp.consts[level] = v;
                if self.checks_pass(Some(level)) {
                    let used = Some(max_used.map_or(v, |m| m.max(v)));
                    if self.descend(level + 1, used) {
                        return true;
                    }
                }
            }
        } else {
            let r = level - self.vocab.constants.len();
            let bits = n.pow(self.vocab.relations[r].1 as u32);
            let end: u64 = 1u64 << bits;
            let mut mask: u64 = 0;
            loop {
                self.interp.rels[r] = mask;
                if self.checks_pass(Some(level)) && self.descend(level + 1, max_used) {
                    return true;
                }
                mask += 1;
                if mask == end {
                    break;
                }
            }
        }
        false
    }

    fn witness(&self) -> FiniteStructure {
        let n = self.interp.n;
        let elem = |i: usize| Element::new(format!("e{i}"));
        let mut sig = Signature::new();
        let mut constants = BTreeMap::new();
        for (i, c) in self.vocab.constants.iter().enumerate() {
            sig.insert(crate::syntax::Symbol::constant(c.clone()).expect("valid name"))
                .expect("no conflict");
            constants.insert(c.clone(), elem(self.interp.consts[i]));
        }
        let mut relations = BTreeMap::new();
        for (r, (name, arity)) in self.vocab.relations.iter().enumerate() {
            sig.insert(crate::syntax::Symbol::relation(name.clone(), *arity).expect("valid name"))
                .expect("no conflict");
            let mut tuples = BTreeSet::new();
            for idx in 0..n.pow(*arity as u32) {
                if (self.interp.rels[r] >> idx) & 1 == 1 {
                    let mut t = vec![0; *arity];
                    let mut rest = idx;
                    for slot in t.iter_mut().rev() {
                        *slot = rest % n;
                        rest /= n;
                    }
                    tuples.insert(t.into_iter().map(elem).collect());
                }
            }
            relations.insert(name.clone(), tuples);
        }
        FiniteStructure::new(sig, (0..n).map(elem).collect(), constants, relations)
            .expect("enumerated structure is well formed")
    }
}

fn require_sentence(f: &Formula) -> Result<(), EntailmentError> {
    if f.is_sentence() {
        Ok(())
    } else {
        Err(EntailmentError::NotSentence(f.to_string()))
    }
}

/// Checks `theory ⊨ target` over every structure of size `1..=max_domain`.
pub fn entails_bounded(
    theory: &[Formula],
    target: &Formula,
    bound: &EntailmentBound,
) -> Result<EntailmentVerdict, EntailmentError> {
    if bound.max_domain == 0 {
        return Err(EntailmentError::InvalidBound);
    }
    for f in theory.iter().chain(std::iter::once(target)) {
        require_sentence(f)?;
    }
    let sig = symbols_of_all(theory.iter().chain(std::iter::once(target)))?;
    let vocab = Vocabulary::new(&sig);
    let size = enumeration_size(&vocab, bound.max_domain, bound.symmetry);
    let size = match size {
        Some(s) if s <= bound.budget as u128 => s as u64,
        other => {
            return Err(EntailmentError::BudgetExceeded {
                required: other.map_or_else(|| "more than 2^128".to_string(), |s| s.to_string()),
                budget: bound.budget,
            })
        }
    };

    let compiled: Vec<Compiled> = theory.iter().map(|f| compile(f, &vocab)).collect();
    let target_c = compile(target, &vocab);
    let mut by_level = vec![Vec::new(); vocab.levels()];
    let mut unconditional = Vec::new();
    for (i, c) in compiled.iter().enumerate() {
        match c.ready {
            Some(l) => by_level[l].push(i),
            None => unconditional.push(i),
        }
    }
    let env_size = compiled
        .iter()
        .map(|c| c.depth)
        .chain(std::iter::once(target_c.depth))
        .max()
        .unwrap_or(0);

    for n in 1..=bound.max_domain {
        let mut search = Search {
            vocab: &vocab,
            theory: &compiled,
            target: &target_c,
            symmetry: bound.symmetry,
            interp: Interp {
                n,
                consts: vec![0; vocab.constants.len()],
                rels: vec![0; vocab.relations.len()],
            },
            env: vec![0; env_size],
            by_level: by_level.clone(),
        };
        // sentences without symbols depend on the domain size alone
        let pre_ok = unconditional
            .iter()
            .all(|&i| search.interp.eval(&compiled[i].code, &mut search.env));
        if !pre_ok {
            continue;
        }
        if target_c.ready.is_none() && search.interp.eval(&target_c.code, &mut search.env) {
            continue;
        }
        if search.descend(0, None) {
            return Ok(EntailmentVerdict {
                outcome: Outcome::CountermodelFound,
                witness: Some(search.witness()),
                bound: bound.max_domain,
                enumeration_size: size,
            });
        }
    }
    Ok(EntailmentVerdict {
        outcome: Outcome::EntailedUpToBound,
        witness: None,
        bound: bound.max_domain,
        enumeration_size: size,
    })
}

pub fn is_tautology_bounded(f: &Formula, bound: &EntailmentBound) -> Result<bool, EntailmentError> {
    Ok(entails_bounded(&[], f, bound)?.is_entailed())
}

pub fn is_contradiction_bounded(
    f: &Formula,
    bound: &EntailmentBound,
) -> Result<bool, EntailmentError> {
    is_tautology_bounded(&Formula::not(f.clone()), bound)
}

/// Consequence test used for relevance and newness.
///
/// A sentence that mentions a symbol outside `theory_sig` is never a
/// consequence; otherwise this is bounded entailment. Sentences that are
/// literally members of the theory are consequences without enumeration.
pub fn consequence_for_relevancy(
    theory: &[Formula],
    theory_sig: &Signature,
    f: &Formula,
    bound: &EntailmentBound,
) -> Result<bool, EntailmentError> {
    if bound.max_domain == 0 {
        return Err(EntailmentError::InvalidBound);
    }
    if !symbols_of(f).is_subset(theory_sig) {
        return Ok(false);
    }
    if theory.contains(f) {
        return Ok(true);
    }
    Ok(entails_bounded(theory, f, bound)?.is_entailed())
}
