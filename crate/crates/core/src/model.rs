//! Finite structures, databases, and satisfaction by direct recursion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{symbols_of, Formula, Signature, Term};

/// An opaque domain element id (`e_s`, `n1`, ...).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(Arc<str>);

impl Element {
    pub fn new(id: impl AsRef<str>) -> Self {
        Element(Arc::from(id.as_ref()))
    }

    pub fn id(&self) -> &str {
        &self.0
    }

    pub fn is_valid_id(id: &str) -> bool {
        !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl From<&str> for Element {
    fn from(s: &str) -> Self {
        Element::new(s)
    }
}

pub type Tuple = Vec<Element>;

pub(crate) type PartsMut<'a> = (
    &'a mut Signature,
    &'a mut BTreeSet<Element>,
    &'a mut BTreeMap<String, Element>,
    &'a mut BTreeMap<String, BTreeSet<Tuple>>,
);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("invalid element id `{0}`")]
    InvalidElement(String),
    #[error("symbol `{0}` is not interpreted")]
    Uninterpreted(String),
    #[error("`{0}` is interpreted but not in the signature")]
    UnknownSymbol(String),
    #[error("`{symbol}` is interpreted as the wrong kind of symbol")]
    KindMismatch { symbol: String },
    #[error("`{symbol}` refers to `{element}`, which is outside the domain")]
    OutOfDomain { symbol: String, element: Element },
    #[error("tuple of length {found} for `{symbol}` of arity {arity}")]
    TupleArity {
        symbol: String,
        arity: usize,
        found: usize,
    },
}

/// A finite first-order structure: nonempty domain plus a total
/// interpretation of every symbol in its signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteStructure {
    signature: Signature,
    domain: BTreeSet<Element>,
    constants: BTreeMap<String, Element>,
    relations: BTreeMap<String, BTreeSet<Tuple>>,
}

impl FiniteStructure {
    pub fn new(
        signature: Signature,
        domain: BTreeSet<Element>,
        constants: BTreeMap<String, Element>,
        relations: BTreeMap<String, BTreeSet<Tuple>>,
    ) -> Result<Self, StructureError> {
        let s = FiniteStructure {
            signature,
            domain,
            constants,
            relations,
        };
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn validate(&self) -> Result<(), StructureError> {
        if self.domain.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        if let Some(e) = self.domain.iter().find(|e| !Element::is_valid_id(e.id())) {
            return Err(StructureError::InvalidElement(e.to_string()));
        }
        for sym in self.signature.iter() {
            let name = sym.name();
            if sym.is_constant() {
                if self.relations.contains_key(name) {
                    return Err(StructureError::KindMismatch {
                        symbol: name.to_string(),
                    });
                }
                let e = self
                    .constants
                    .get(name)
                    .ok_or_else(|| StructureError::Uninterpreted(name.to_string()))?;
                if !self.domain.contains(e) {
                    return Err(StructureError::OutOfDomain {
                        symbol: name.to_string(),
                        element: e.clone(),
                    });
                }
            } else {
                if self.constants.contains_key(name) {
                    return Err(StructureError::KindMismatch {
                        symbol: name.to_string(),
                    });
                }
                let tuples = self
                    .relations
                    .get(name)
                    .ok_or_else(|| StructureError::Uninterpreted(name.to_string()))?;
                for t in tuples {
                    if t.len() != sym.arity() {
                        return Err(StructureError::TupleArity {
                            symbol: name.to_string(),
                            arity: sym.arity(),
                            found: t.len(),
                        });
                    }
                    if let Some(e) = t.iter().find(|e| !self.domain.contains(*e)) {
                        return Err(StructureError::OutOfDomain {
                            symbol: name.to_string(),
                            element: e.clone(),
                        });
                    }
                }
            }
        }
        let extra = self
            .constants
            .keys()
            .chain(self.relations.keys())
            .find(|n| !self.signature.contains_name(n));
        if let Some(n) = extra {
            return Err(StructureError::UnknownSymbol(n.clone()));
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn domain(&self) -> &BTreeSet<Element> {
        &self.domain
    }

    pub fn constant(&self, name: &str) -> Option<&Element> {
        self.constants.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Tuple>> {
        self.relations.get(name)
    }

    pub fn constants(&self) -> &BTreeMap<String, Element> {
        &self.constants
    }

    pub fn relations(&self) -> &BTreeMap<String, BTreeSet<Tuple>> {
        &self.relations
    }

    /// Symbols other than `except` whose interpretation mentions `e`.
    pub fn references(&self, e: &Element, except: Option<&str>) -> Option<String> {
        let skip = |n: &str| except == Some(n);
        for (n, v) in &self.constants {
            if !skip(n) && v == e {
                return Some(n.clone());
            }
        }
        for (n, ts) in &self.relations {
            if !skip(n) && ts.iter().any(|t| t.contains(e)) {
                return Some(n.clone());
            }
        }
        None
    }

    // Mutators used by structural operations; callers re-validate.
    pub(crate) fn parts_mut(&mut self) -> PartsMut<'_> {
        (
            &mut self.signature,
            &mut self.domain,
            &mut self.constants,
            &mut self.relations,
        )
    }

    /// Whether two structures interpret `name` identically (both missing counts).
    pub fn same_interpretation(&self, other: &FiniteStructure, name: &str) -> bool {
        self.constants.get(name) == other.constants.get(name)
            && self.relations.get(name) == other.relations.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol `{0}` is not interpreted by the structure")]
    UnknownSymbol(String),
    #[error("`{name}` used with {used} argument(s) but has arity {arity}")]
    ArityMismatch {
        name: String,
        arity: usize,
        used: usize,
    },
    #[error("free variable `{0}` has no assigned value")]
    Unassigned(String),
    #[error("assigned value `{0}` is outside the domain")]
    OutOfDomain(Element),
}

/// A partial map from variable names to domain elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, Element>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn with(mut self, var: impl Into<String>, e: Element) -> Self {
        self.0.insert(var.into(), e);
        self
    }

    pub fn get(&self, var: &str) -> Option<&Element> {
        self.0.get(var)
    }
}

struct Env<'a> {
    outer: &'a Assignment,
    stack: Vec<(&'a str, &'a Element)>,
}

impl<'a> Env<'a> {
    fn lookup(&self, v: &str) -> Option<&'a Element> {
        self.stack
            .iter()
            .rev()
            .find(|(n, _)| *n == v)
            .map(|(_, e)| *e)
            .or_else(|| self.outer.get(v))
    }
}

impl FiniteStructure {
    fn term<'a>(&'a self, t: &Term, env: &Env<'a>) -> Result<&'a Element, EvalError> {
        match t {
            Term::Var(v) => env
                .lookup(v)
                .ok_or_else(|| EvalError::Unassigned(v.clone())),
            Term::Const(c) => match self.constants.get(c) {
                Some(e) => Ok(e),
                None if self.relations.contains_key(c) => Err(EvalError::ArityMismatch {
                    name: c.clone(),
                    arity: self.signature.arity(c).unwrap_or(0),
                    used: 0,
                }),
                None => Err(EvalError::UnknownSymbol(c.clone())),
            },
        }
    }

    fn eval<'a>(&'a self, f: &'a Formula, env: &mut Env<'a>) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::Atom { relation, args } => {
                let tuples = self
                    .relations
                    .get(relation)
                    .ok_or_else(|| EvalError::UnknownSymbol(relation.clone()))?;
                let arity = self.signature.arity(relation).unwrap_or(0);
                if arity != args.len() {
                    return Err(EvalError::ArityMismatch {
                        name: relation.clone(),
                        arity,
                        used: args.len(),
                    });
                }
                let tuple = args
                    .iter()
                    .map(|t| self.term(t, env).cloned())
                    .collect::<Result<Tuple, _>>()?;
                tuples.contains(&tuple)
            }
            Formula::Eq(a, b) => self.term(a, env)? == self.term(b, env)?,
            Formula::Not(a) => !self.eval(a, env)?,
            Formula::And(a, b) => self.eval(a, env)? && self.eval(b, env)?,
            Formula::Or(a, b) => self.eval(a, env)? || self.eval(b, env)?,
            Formula::Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
            Formula::Iff(a, b) => self.eval(a, env)? == self.eval(b, env)?,
            Formula::Forall(v, body) => {
                for e in &self.domain {
                    env.stack.push((v, e));
                    let r = self.eval(body, env);
                    env.stack.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Exists(v, body) => {
                for e in &self.domain {
                    env.stack.push((v, e));
                    let r = self.eval(body, env);
                    env.stack.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

/// Tarskian satisfaction `s, a ⊨ f`, quantifiers ranging over the domain.
pub fn satisfies(s: &FiniteStructure, f: &Formula, a: &Assignment) -> Result<bool, EvalError> {
    if let Some(e) = a.0.values().find(|e| !s.domain.contains(*e)) {
        return Err(EvalError::OutOfDomain(e.clone()));
    }
    let mut env = Env {
        outer: a,
        stack: Vec::new(),
    };
    s.eval(f, &mut env)
}

/// Truth of a sentence, treating sentences that mention symbols the
/// structure does not interpret as false.
pub fn holds(s: &FiniteStructure, f: &Formula) -> bool {
    symbols_of(f).is_subset(&s.signature) && satisfies(s, f, &Assignment::new()).unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailingSentence {
    pub index: usize,
    pub sentence: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Correctness {
    pub failing: Vec<FailingSentence>,
}

impl Correctness {
    pub fn is_correct(&self) -> bool {
        self.failing.is_empty()
    }
}

/// Evaluates every theory sentence; failures are reported in theory order.
pub fn check_correctness(s: &FiniteStructure, theory: &[Formula]) -> Result<Correctness, EvalError> {
    let mut failing = Vec::new();
    for (index, sentence) in theory.iter().enumerate() {
        if !satisfies(s, sentence, &Assignment::new())? {
            failing.push(FailingSentence {
                index,
                sentence: sentence.clone(),
            });
        }
    }
    Ok(Correctness { failing })
}

/// First theory sentence false in `s`, if any.
pub(crate) fn first_violation(
    s: &FiniteStructure,
    theory: &[Formula],
) -> Result<Option<FailingSentence>, EvalError> {
    for (index, sentence) in theory.iter().enumerate() {
        if !satisfies(s, sentence, &Assignment::new())? {
            return Ok(Some(FailingSentence {
                index,
                sentence: sentence.clone(),
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatabaseError {
    #[error("theory sentence {index} has free variables: {}", .vars.join(", "))]
    NotSentence { index: usize, vars: Vec<String> },
    #[error("theory sentence {index} uses symbols outside the signature: {symbols}")]
    OutOfLanguage { index: usize, symbols: String },
    #[error("theory is not true in the structure; failing: {}", list_failing(.failing))]
    Incorrect { failing: Vec<FailingSentence> },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn list_failing(failing: &[FailingSentence]) -> String {
    failing
        .iter()
        .map(|f| f.sentence.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// A finite structure together with a theory that is true in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    structure: FiniteStructure,
    theory: Vec<Formula>,
}

impl Database {
    pub fn new(structure: FiniteStructure, theory: Vec<Formula>) -> Result<Self, DatabaseError> {
        check_theory_shape(&structure, &theory)?;
        let c = check_correctness(&structure, &theory)?;
        if !c.is_correct() {
            return Err(DatabaseError::Incorrect { failing: c.failing });
        }
        Ok(Database { structure, theory })
    }

    pub(crate) fn new_unchecked(structure: FiniteStructure, theory: Vec<Formula>) -> Self {
        Database { structure, theory }
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn theory(&self) -> &[Formula] {
        &self.theory
    }

    pub fn signature(&self) -> &Signature {
        self.structure.signature()
    }

    pub fn into_parts(self) -> (FiniteStructure, Vec<Formula>) {
        (self.structure, self.theory)
    }
}

pub(crate) fn check_theory_shape(
    structure: &FiniteStructure,
    theory: &[Formula],
) -> Result<(), DatabaseError> {
    for (index, t) in theory.iter().enumerate() {
        let free = t.free_variables();
        if !free.is_empty() {
            return Err(DatabaseError::NotSentence {
                index,
                vars: free.into_iter().collect(),
            });
        }
        let missing = symbols_of(t).difference(structure.signature());
        if !missing.is_empty() {
            return Err(DatabaseError::OutOfLanguage {
                index,
                symbols: missing
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            });
        }
    }
    Ok(())
}
