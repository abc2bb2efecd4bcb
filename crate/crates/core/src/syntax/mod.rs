//! First-order signatures, terms and formulas over constants and relations.
//!
//! Equality is logical vocabulary and never appears in a [`Signature`].
//! Function symbols of positive arity are not part of the language.

mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use parser::{parse_formula, parse_sentence, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol name must be nonempty")]
    EmptyName,
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("symbol `{name}` declared with arity {existing} and {requested}")]
    Conflict {
        name: String,
        existing: usize,
        requested: usize,
    },
    #[error("malformed symbol declaration `{0}` (expected NAME/ARITY)")]
    MalformedDecl(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Constant,
    Relation,
}

/// A non-logical symbol: a constant (arity 0) or a relation (arity ≥ 1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: String,
    arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Result<Self, SignatureError> {
        let name = name.into();
        if name.is_empty() {
            return Err(SignatureError::EmptyName);
        }
        if !is_identifier(&name) || is_keyword(&name) {
            return Err(SignatureError::InvalidName(name));
        }
        Ok(Symbol { name, arity })
    }

    pub fn constant(name: impl Into<String>) -> Result<Self, SignatureError> {
        Symbol::new(name, 0)
    }

    pub fn relation(name: impl Into<String>, arity: usize) -> Result<Self, SignatureError> {
        if arity == 0 {
            let name = name.into();
            return Err(SignatureError::MalformedDecl(format!("{name}/0 as relation")));
        }
        Symbol::new(name, arity)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> SymbolKind {
        if self.arity == 0 {
            SymbolKind::Constant
        } else {
            SymbolKind::Relation
        }
    }

    pub fn is_constant(&self) -> bool {
        self.arity == 0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A finite set of symbols with pairwise distinct names, kept in name order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    symbols: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_symbols<I>(symbols: I) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = Symbol>,
    {
        let mut sig = Signature::new();
        for s in symbols {
            sig.insert(s)?;
        }
        Ok(sig)
    }

    /// Parses whitespace-separated declarations such as `C/1 H/2 s/0`.
    pub fn parse_decls(text: &str) -> Result<Self, SignatureError> {
        let mut sig = Signature::new();
        for decl in text.split_whitespace() {
            let (name, arity) = decl
                .split_once('/')
                .ok_or_else(|| SignatureError::MalformedDecl(decl.to_string()))?;
            let arity: usize = arity
                .parse()
                .map_err(|_| SignatureError::MalformedDecl(decl.to_string()))?;
            sig.insert(Symbol::new(name, arity)?)?;
        }
        Ok(sig)
    }

    /// Adds a symbol; re-adding an identical symbol is a no-op.
    pub fn insert(&mut self, symbol: Symbol) -> Result<(), SignatureError> {
        match self.symbols.get(&symbol.name) {
            Some(&existing) if existing != symbol.arity => Err(SignatureError::Conflict {
                name: symbol.name,
                existing,
                requested: symbol.arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(symbol.name, symbol.arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.symbols.get(name).map(|&arity| Symbol {
            name: name.to_string(),
            arity,
        })
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.arity(&symbol.name) == Some(symbol.arity)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn is_subset(&self, other: &Signature) -> bool {
        self.symbols
            .iter()
            .all(|(name, &arity)| other.arity(name) == Some(arity))
    }

    pub fn union(&self, other: &Signature) -> Result<Signature, SignatureError> {
        let mut out = self.clone();
        for s in other.iter() {
            out.insert(s)?;
        }
        Ok(out)
    }

    /// Symbols of `self` that are missing from (or clash with) `other`.
    pub fn difference(&self, other: &Signature) -> Vec<Symbol> {
        self.iter().filter(|s| !other.contains(s)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().map(|(name, &arity)| Symbol {
            name: name.clone(),
            arity,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> + '_ {
        self.symbols
            .iter()
            .filter(|(_, &a)| a == 0)
            .map(|(n, _)| n.as_str())
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.symbols
            .iter()
            .filter(|(_, &a)| a > 0)
            .map(|(n, &a)| (n.as_str(), a))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for s in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom { relation: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom<I>(relation: impl Into<String>, args: I) -> Self
    where
        I: IntoIterator<Item = Term>,
    {
        Formula::Atom {
            relation: relation.into(),
            args: args.into_iter().collect(),
        }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Formula::Eq(lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjunction<I>(parts: I) -> Option<Formula>
    where
        I: IntoIterator<Item = Formula>,
    {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        free_variables(self)
    }

    pub fn symbols(&self) -> Signature {
        symbols_of(self)
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Number of nested connective/quantifier layers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Variables bound by some quantifier anywhere in the formula.
    pub fn bound_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Forall(v, _) | Formula::Exists(v, _) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.walk(visit),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }
}

pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    fn term(t: &Term, bound: &[&str], out: &mut BTreeSet<String>) {
        if let Term::Var(v) = t {
            if !bound.contains(&v.as_str()) {
                out.insert(v.clone());
            }
        }
    }
    fn go<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom { args, .. } => args.iter().for_each(|t| term(t, bound, out)),
            Formula::Eq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Not(a) => go(a, bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v);
                go(body, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// The non-logical symbols occurring in `f`.
///
/// Arities are read off the atoms. A formula built by hand that uses one
/// relation name with two different arities keeps the first arity seen;
/// the parser never produces such formulas.
pub fn symbols_of(f: &Formula) -> Signature {
    let mut map = BTreeMap::new();
    let mut add = |name: &str, arity: usize| {
        map.entry(name.to_string()).or_insert(arity);
    };
    f.walk(&mut |node| match node {
        Formula::Atom { relation, args } => {
            add(relation, args.len());
            for t in args {
                if let Term::Const(c) = t {
                    add(c, 0);
                }
            }
        }
        Formula::Eq(a, b) => {
            for t in [a, b] {
                if let Term::Const(c) = t {
                    add(c, 0);
                }
            }
        }
        _ => {}
    });
    Signature { symbols: map }
}

/// Union of the symbols of several formulas, failing on arity clashes.
pub fn symbols_of_all<'a, I>(formulas: I) -> Result<Signature, SignatureError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut sig = Signature::new();
    for f in formulas {
        for s in symbols_of(f).iter() {
            sig.insert(s)?;
        }
    }
    Ok(sig)
}

// Binding strength used by the printer; higher binds tighter.
const PREC_QUANT: u8 = 0;
const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;

fn write_formula(f: &Formula, ctx: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let binary = |out: &mut fmt::Formatter<'_>,
                  prec: u8,
                  op: &str,
                  lhs: (&Formula, u8),
                  rhs: (&Formula, u8)|
     -> fmt::Result {
        let paren = ctx > prec;
        if paren {
            out.write_str("(")?;
        }
        write_formula(lhs.0, lhs.1, out)?;
        write!(out, " {op} ")?;
        write_formula(rhs.0, rhs.1, out)?;
        if paren {
            out.write_str(")")?;
        }
        Ok(())
    };
    match f {
        Formula::Atom { relation, args } => {
            write!(out, "{relation}(")?;
            for (i, t) in args.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write!(out, "{t}")?;
            }
            out.write_str(")")
        }
        Formula::Eq(a, b) => write!(out, "{a} = {b}"),
        Formula::Not(a) => {
            out.write_str("~")?;
            write_formula(a, PREC_UNARY, out)
        }
        Formula::And(a, b) => binary(out, PREC_AND, "&", (a, PREC_AND), (b, PREC_UNARY)),
        Formula::Or(a, b) => binary(out, PREC_OR, "|", (a, PREC_OR), (b, PREC_AND)),
        Formula::Implies(a, b) => binary(
            out,
            PREC_IMPLIES,
            "->",
            (a, PREC_OR),
            (b, PREC_IMPLIES),
        ),
        Formula::Iff(a, b) => binary(out, PREC_IFF, "<->", (a, PREC_IFF), (b, PREC_IMPLIES)),
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            // A quantifier body extends as far right as possible, so any
            // quantifier that is an operand gets parenthesised.
            let paren = ctx > PREC_QUANT;
            if paren {
                out.write_str("(")?;
            }
            let q = if matches!(f, Formula::Forall(..)) {
                "forall"
            } else {
                "exists"
            };
            write!(out, "{q} {v}. ")?;
            write_formula(body, PREC_QUANT, out)?;
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, PREC_QUANT, f)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_keyword(s: &str) -> bool {
    matches!(s, "forall" | "exists")
}

/// Whether `name` has the shape of a variable: `[a-z][a-zA-Z0-9_]*`.
pub fn is_variable_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_lowercase()) && is_identifier(name) && !is_keyword(name)
}
