//! Insertions, deletions, and update sequences.
//!
//! Every operation changes the interpretation of exactly one symbol. Domain
//! elements enter only through insertions and leave only through the
//! explicit `drop` set of a deletion, and a dropped element must not be
//! referenced by any remaining interpretation.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{first_violation, Database, Element, FailingSentence, FiniteStructure, Tuple};
use crate::syntax::{symbols_of, Formula, Signature, SignatureError, Symbol};

/// An element mentioned in an insertion payload. `fresh` elements must not
/// yet be in the domain; the others must be.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementRef {
    pub id: Element,
    pub fresh: bool,
}

impl ElementRef {
    pub fn existing(id: impl AsRef<str>) -> Self {
        ElementRef {
            id: Element::new(id),
            fresh: false,
        }
    }

    pub fn fresh(id: impl AsRef<str>) -> Self {
        ElementRef {
            id: Element::new(id),
            fresh: true,
        }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.id, if self.fresh { "*" } else { "" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InsertionSpec {
    pub symbol: Symbol,
    /// One element for a constant, otherwise the tuple to add.
    pub payload: Vec<ElementRef>,
}

impl InsertionSpec {
    pub fn constant(name: &str, e: ElementRef) -> Result<Self, SignatureError> {
        Ok(InsertionSpec {
            symbol: Symbol::constant(name)?,
            payload: vec![e],
        })
    }

    pub fn tuple(name: &str, payload: Vec<ElementRef>) -> Result<Self, SignatureError> {
        Ok(InsertionSpec {
            symbol: Symbol::relation(name, payload.len())?,
            payload,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeletionSpec {
    pub symbol: Symbol,
    /// The new referent for a constant, otherwise the tuple to remove.
    pub payload: Vec<Element>,
    /// Elements removed from the domain along with the change.
    pub drop: BTreeSet<Element>,
}

impl DeletionSpec {
    pub fn constant(name: &str, target: &str) -> Result<Self, SignatureError> {
        Ok(DeletionSpec {
            symbol: Symbol::constant(name)?,
            payload: vec![Element::new(target)],
            drop: BTreeSet::new(),
        })
    }

    pub fn tuple(name: &str, tuple: &[&str]) -> Result<Self, SignatureError> {
        Ok(DeletionSpec {
            symbol: Symbol::relation(name, tuple.len())?,
            payload: tuple.iter().map(Element::new).collect(),
            drop: BTreeSet::new(),
        })
    }

    pub fn dropping<'a>(mut self, elements: impl IntoIterator<Item = &'a str>) -> Self {
        self.drop.extend(elements.into_iter().map(Element::new));
        self
    }
}

/// Insertions order before deletions, then by symbol, then by payload.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operation {
    Insert(InsertionSpec),
    Delete(DeletionSpec),
}

impl Operation {
    pub fn symbol(&self) -> &Symbol {
        match self {
            Operation::Insert(i) => &i.symbol,
            Operation::Delete(d) => &d.symbol,
        }
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Script syntax: `insert b = e_a`, `insert E (e_b*)`, `delete s -> e_a`,
/// `delete C (e_s) drop e_s`.
impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::Insert(i) if i.symbol.is_constant() => {
                write!(f, "insert {} = {}", i.symbol.name(), i.payload[0])
            }
            Operation::Insert(i) => {
                write!(f, "insert {} ({})", i.symbol.name(), join(&i.payload))
            }
            Operation::Delete(d) => {
                if d.symbol.is_constant() {
                    write!(f, "delete {} -> {}", d.symbol.name(), d.payload[0])?;
                } else {
                    write!(f, "delete {} ({})", d.symbol.name(), join(&d.payload))?;
                }
                if !d.drop.is_empty() {
                    write!(f, " drop {}", join(&d.drop))?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for Operation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperationError {
    #[error("theory sentence `{}` is false after the operation", .0.sentence)]
    TheoryViolation(FailingSentence),
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error("symbol `{0}` is not in the signature")]
    UnknownSymbol(String),
    #[error("`{name}` has arity {declared}, operation uses {used}")]
    ArityMismatch {
        name: String,
        declared: usize,
        used: usize,
    },
    #[error("tuple ({}) is not in `{symbol}`", join(.tuple))]
    TupleNotPresent { symbol: String, tuple: Tuple },
    #[error("cannot drop `{element}`: still referenced by `{by}`")]
    DanglingElement { element: Element, by: String },
    #[error("cannot drop `{0}`: it is not released by this operation")]
    InvalidDrop(Element),
    #[error("operation would empty the domain")]
    EmptyDomain,
    #[error("operation leaves the interpretation of `{0}` unchanged")]
    Unchanged(String),
    #[error("new symbol `{0}` clashes with a variable bound in the theory")]
    NameClash(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step} (`{op}`): {source}")]
pub struct UpdateError {
    /// 1-based index of the failing operation.
    pub step: usize,
    pub op: String,
    #[source]
    pub source: OperationError,
}

/// Whether theory sentences are enforced after every step or only recorded.
///
/// `Record` exists for transcribing hand-written sequences that are not
/// valid updates; structural conditions stay enforced in both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryCheck {
    #[default]
    Enforce,
    Record,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepViolation {
    /// 1-based index of the operation whose result falsifies the theory.
    pub step: usize,
    pub failing: Vec<FailingSentence>,
}

fn check_payload_elements(s: &FiniteStructure, payload: &[ElementRef]) -> Result<(), OperationError> {
    for e in payload {
        if !Element::is_valid_id(e.id.id()) {
            return Err(OperationError::Malformed(format!("invalid element id `{}`", e.id)));
        }
        let present = s.domain().contains(&e.id);
        if e.fresh && present {
            return Err(OperationError::Malformed(format!(
                "`{}` is marked fresh but already in the domain",
                e.id
            )));
        }
        if !e.fresh && !present {
            return Err(OperationError::Malformed(format!(
                "`{}` is not in the domain (mark new elements with `*`)",
                e.id
            )));
        }
    }
    Ok(())
}

fn bound_in_theory(theory: &[Formula], name: &str) -> bool {
    theory.iter().any(|t| t.bound_variables().contains(name))
}

fn resolve_symbol(s: &FiniteStructure, sym: &Symbol) -> Result<(), OperationError> {
    match s.signature().arity(sym.name()) {
        None => Err(OperationError::UnknownSymbol(sym.name().to_string())),
        Some(a) if a != sym.arity() => Err(OperationError::ArityMismatch {
            name: sym.name().to_string(),
            declared: a,
            used: sym.arity(),
        }),
        Some(_) => Ok(()),
    }
}

fn insertion(
    s: &FiniteStructure,
    theory: &[Formula],
    spec: &InsertionSpec,
) -> Result<FiniteStructure, OperationError> {
    let sym = &spec.symbol;
    let expected = sym.arity().max(1);
    if spec.payload.len() != expected {
        return Err(OperationError::Malformed(format!(
            "`{}` needs {expected} element(s), got {}",
            sym.name(),
            spec.payload.len()
        )));
    }
    let known = s.signature().arity(sym.name());
    match known {
        Some(a) if a != sym.arity() => {
            return Err(OperationError::ArityMismatch {
                name: sym.name().to_string(),
                declared: a,
                used: sym.arity(),
            })
        }
        None if bound_in_theory(theory, sym.name()) => {
            return Err(OperationError::NameClash(sym.name().to_string()))
        }
        _ => {}
    }
    check_payload_elements(s, &spec.payload)?;

    let mut next = s.clone();
    let (sig, domain, constants, relations) = next.parts_mut();
    if known.is_none() {
        sig.insert(sym.clone())
            .map_err(|e| OperationError::Malformed(e.to_string()))?;
    }
    domain.extend(spec.payload.iter().filter(|e| e.fresh).map(|e| e.id.clone()));
    if sym.is_constant() {
        let target = spec.payload[0].id.clone();
        if constants.get(sym.name()) == Some(&target) {
            return Err(OperationError::Unchanged(sym.name().to_string()));
        }
        constants.insert(sym.name().to_string(), target);
    } else {
        let tuple: Tuple = spec.payload.iter().map(|e| e.id.clone()).collect();
        if !relations.entry(sym.name().to_string()).or_default().insert(tuple) {
            return Err(OperationError::Unchanged(sym.name().to_string()));
        }
    }
    debug_assert!(next.validate().is_ok());
    Ok(next)
}

fn deletion(s: &FiniteStructure, spec: &DeletionSpec) -> Result<FiniteStructure, OperationError> {
    let sym = &spec.symbol;
    resolve_symbol(s, sym)?;
    let expected = sym.arity().max(1);
    if spec.payload.len() != expected {
        return Err(OperationError::Malformed(format!(
            "`{}` needs {expected} element(s), got {}",
            sym.name(),
            spec.payload.len()
        )));
    }
    let mut next = s.clone();
    let (_, domain, constants, relations) = next.parts_mut();
    let released: BTreeSet<Element> = if sym.is_constant() {
        let target = &spec.payload[0];
        if !s.domain().contains(target) {
            return Err(OperationError::Malformed(format!("`{target}` is not in the domain")));
        }
        let old = constants
            .insert(sym.name().to_string(), target.clone())
            .expect("constant interpreted");
        if &old == target {
            return Err(OperationError::Unchanged(sym.name().to_string()));
        }
        if spec.drop.contains(target) {
            return Err(OperationError::InvalidDrop(target.clone()));
        }
        BTreeSet::from([old])
    } else {
        let tuple: Tuple = spec.payload.clone();
        let tuples = relations.get_mut(sym.name()).expect("relation interpreted");
        if !tuples.remove(&tuple) {
            return Err(OperationError::TupleNotPresent {
                symbol: sym.name().to_string(),
                tuple,
            });
        }
        tuple.into_iter().collect()
    };
    for e in &spec.drop {
        if !released.contains(e) {
            return Err(OperationError::InvalidDrop(e.clone()));
        }
    }
    for e in &spec.drop {
        domain.remove(e);
    }
    if domain.is_empty() {
        return Err(OperationError::EmptyDomain);
    }
    for e in &spec.drop {
        if let Some(by) = next.references(e, None) {
            return Err(OperationError::DanglingElement {
                element: e.clone(),
                by,
            });
        }
    }
    debug_assert!(next.validate().is_ok());
    Ok(next)
}

/// Applies `op` to `s` checking only structural conditions.
pub(crate) fn apply_structural(
    s: &FiniteStructure,
    theory: &[Formula],
    op: &Operation,
) -> Result<FiniteStructure, OperationError> {
    match op {
        Operation::Insert(i) => insertion(s, theory, i),
        Operation::Delete(d) => deletion(s, d),
    }
}

pub(crate) fn violation(s: &FiniteStructure, theory: &[Formula]) -> Option<FailingSentence> {
    first_violation(s, theory).expect("theory is in the language of every updated structure")
}

fn apply_checked(d: &Database, op: &Operation) -> Result<Database, OperationError> {
    let next = apply_structural(d.structure(), d.theory(), op)?;
    if let Some(f) = violation(&next, d.theory()) {
        return Err(OperationError::TheoryViolation(f));
    }
    Ok(Database::new_unchecked(next, d.theory().to_vec()))
}

pub fn apply_insertion(d: &Database, spec: &InsertionSpec) -> Result<Database, OperationError> {
    apply_checked(d, &Operation::Insert(spec.clone()))
}

pub fn apply_deletion(d: &Database, spec: &DeletionSpec) -> Result<Database, OperationError> {
    apply_checked(d, &Operation::Delete(spec.clone()))
}

/// A finite sequence of structures sharing one theory, each obtained from
/// its predecessor by one operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    theory: Vec<Formula>,
    structures: Vec<FiniteStructure>,
    ops: Vec<Operation>,
    violations: Vec<StepViolation>,
}

impl Update {
    /// The one-element update `(d)`.
    pub fn trivial(d: &Database) -> Self {
        Update {
            theory: d.theory().to_vec(),
            structures: vec![d.structure().clone()],
            ops: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn base(&self) -> &FiniteStructure {
        &self.structures[0]
    }

    /// The first database, which is always correct.
    pub fn base_database(&self) -> Database {
        Database::new_unchecked(self.base().clone(), self.theory.clone())
    }

    pub fn base_signature(&self) -> &Signature {
        self.base().signature()
    }

    pub fn structures(&self) -> &[FiniteStructure] {
        &self.structures
    }

    pub fn final_structure(&self) -> &FiniteStructure {
        self.structures.last().expect("updates are nonempty")
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn theory(&self) -> &[Formula] {
        &self.theory
    }

    /// Number of databases, i.e. one more than the number of operations.
    pub fn len(&self) -> usize {
        self.structures.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theory_violations(&self) -> &[StepViolation] {
        &self.violations
    }

    /// Whether every structure satisfies the theory.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn build_update(base: &Database, ops: &[Operation]) -> Result<Update, UpdateError> {
    build_update_with(base, ops, TheoryCheck::Enforce)
}

pub fn build_update_with(
    base: &Database,
    ops: &[Operation],
    check: TheoryCheck,
) -> Result<Update, UpdateError> {
    let mut u = Update::trivial(base);
    for (i, op) in ops.iter().enumerate() {
        let fail = |source| UpdateError {
            step: i + 1,
            op: op.to_string(),
            source,
        };
        let next = apply_structural(u.final_structure(), &u.theory, op).map_err(fail)?;
        match check {
            TheoryCheck::Enforce => {
                if let Some(f) = violation(&next, &u.theory) {
                    return Err(fail(OperationError::TheoryViolation(f)));
                }
            }
            TheoryCheck::Record => {
                let failing = crate::model::check_correctness(&next, &u.theory)
                    .expect("theory is in the language of every updated structure")
                    .failing;
                if !failing.is_empty() {
                    u.violations.push(StepViolation { step: i + 1, failing });
                }
            }
        }
        u.structures.push(next);
        u.ops.push(op.clone());
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{formula}` uses symbols the final structure does not interpret: {symbols}")]
pub struct OutOfLanguage {
    pub formula: String,
    pub symbols: String,
}

/// Whether the final structure of `u` satisfies `f`.
pub fn is_coherent_with(u: &Update, f: &Formula) -> Result<bool, OutOfLanguage> {
    let last = u.final_structure();
    let missing = symbols_of(f).difference(last.signature());
    if !missing.is_empty() {
        return Err(OutOfLanguage {
            formula: f.to_string(),
            symbols: missing.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
        });
    }
    Ok(crate::model::holds(last, f))
}

/// Symbols whose interpretation differs between `a` and `b`.
pub fn changed_symbols(a: &FiniteStructure, b: &FiniteStructure) -> Vec<String> {
    let names: BTreeSet<&str> = a
        .constants()
        .keys()
        .chain(a.relations().keys())
        .chain(b.constants().keys())
        .chain(b.relations().keys())
        .map(String::as_str)
        .collect();
    names
        .into_iter()
        .filter(|n| !a.same_interpretation(b, n))
        .map(str::to_string)
        .collect()
}
