//! Line-oriented text formats: database files, update scripts, and
//! deduction lists.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::metrics::Deduction;
use crate::model::{Database, DatabaseError, Element, FiniteStructure, StructureError, Tuple};
use crate::syntax::{parse_sentence, Formula, ParseError, Signature, SignatureError};
use crate::updates::{DeletionSpec, ElementRef, InsertionSpec, Operation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: {source}")]
    Formula {
        line: usize,
        column: usize,
        source: ParseError,
    },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Database(#[from] DatabaseError),
}

/// Removes a trailing `#` comment.
fn strip_comment(line: &str) -> &str {
    line.find('#').map_or(line, |i| &line[..i])
}

/// Character cursor over one line; columns are 1-based.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize, offset: usize) -> Self {
        Cursor {
            text,
            pos: 0,
            line,
            offset,
        }
    }

    fn error(&self, message: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            line: self.line,
            column: self.offset + self.pos + 1,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), FormatError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn word(&mut self, what: &str) -> Result<&'a str, FormatError> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error(format!("expected {what}")));
        }
        let w = &self.rest()[..len];
        self.pos += len;
        Ok(w)
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

fn element_list<'a>(cur: &mut Cursor<'a>) -> Result<Vec<(&'a str, bool)>, FormatError> {
    let mut out = Vec::new();
    loop {
        let id = cur.word("an element id")?;
        let fresh = cur.eat("*");
        out.push((id, fresh));
        if !cur.eat(",") {
            return Ok(out);
        }
    }
}

fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.trim_start()
        .strip_prefix(key)
        .and_then(|r| r.trim_start().strip_prefix(':'))
}

fn signature_error(line: usize, e: SignatureError) -> FormatError {
    FormatError::Syntax {
        line,
        column: 1,
        message: e.to_string(),
    }
}

fn sentence_at(text: &str, sig: &Signature, line: usize, offset: usize) -> Result<Formula, FormatError> {
    parse_sentence(text, sig).map_err(|source| FormatError::Formula {
        line,
        column: offset + source.position().unwrap_or(0) + 1,
        source,
    })
}

/// Parses a database file into its structure and theory without checking
/// that the theory is true.
pub fn parse_database_parts(text: &str) -> Result<(FiniteStructure, Vec<Formula>), FormatError> {
    let mut sig: Option<Signature> = None;
    let mut domain: Option<BTreeSet<Element>> = None;
    let mut constants = BTreeMap::new();
    let mut relations: BTreeMap<String, BTreeSet<Tuple>> = BTreeMap::new();
    let mut theory = Vec::new();
    let mut in_theory = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let missing_sig = || FormatError::Syntax {
            line: line_no,
            column: 1,
            message: "`signature:` must come first".into(),
        };
        if in_theory {
            let s = sig.as_ref().ok_or_else(missing_sig)?;
            theory.push(sentence_at(line.trim(), s, line_no, indent)?);
            continue;
        }
        if let Some(rest) = header(line, "signature") {
            if sig.is_some() {
                return Err(Cursor::new(line, line_no, 0).error("duplicate `signature:`"));
            }
            sig = Some(Signature::parse_decls(rest).map_err(|e| signature_error(line_no, e))?);
            continue;
        }
        let s = sig.as_ref().ok_or_else(missing_sig)?;
        if let Some(rest) = header(line, "domain") {
            if domain.is_some() {
                return Err(Cursor::new(line, line_no, 0).error("duplicate `domain:`"));
            }
            let mut set = BTreeSet::new();
            for id in rest.split_whitespace() {
                if !Element::is_valid_id(id) || !set.insert(Element::new(id)) {
                    return Err(FormatError::Syntax {
                        line: line_no,
                        column: line.find(id).map_or(1, |c| c + 1),
                        message: format!("invalid or repeated element `{id}`"),
                    });
                }
            }
            domain = Some(set);
            continue;
        }
        if header(line, "theory").is_some() {
            if !header(line, "theory").unwrap().trim().is_empty() {
                return Err(Cursor::new(line, line_no, 0)
                    .error("theory sentences go on the lines after `theory:`"));
            }
            in_theory = true;
            continue;
        }
        let mut cur = Cursor::new(line, line_no, 0);
        let kw = cur.word("`const`, `rel`, or a section header")?;
        match kw {
            "const" => {
                let name = cur.word("a constant name")?;
                if s.arity(name) != Some(0) {
                    return Err(cur.error(format!("`{name}` is not a declared constant")));
                }
                cur.expect("=")?;
                let e = cur.word("an element id")?;
                cur.finish()?;
                if constants.insert(name.to_string(), Element::new(e)).is_some() {
                    return Err(cur.error(format!("`{name}` interpreted twice")));
                }
            }
            "rel" => {
                let name = cur.word("a relation name")?;
                let arity = match s.arity(name) {
                    Some(a) if a > 0 => a,
                    _ => return Err(cur.error(format!("`{name}` is not a declared relation"))),
                };
                cur.expect("=")?;
                cur.expect("{")?;
                let mut tuples = BTreeSet::new();
                if !cur.eat("}") {
                    loop {
                        let tuple: Vec<&str> = if cur.eat("(") {
                            let t = element_list(&mut cur)?;
                            cur.expect(")")?;
                            if let Some((id, _)) = t.iter().find(|(_, fresh)| *fresh) {
                                return Err(cur.error(format!("`*` is not allowed here ({id})")));
                            }
                            t.into_iter().map(|(id, _)| id).collect()
                        } else {
                            vec![cur.word("an element or tuple")?]
                        };
                        if tuple.len() != arity {
                            return Err(cur.error(format!(
                                "tuple of length {} for `{name}` of arity {arity}",
                                tuple.len()
                            )));
                        }
                        tuples.insert(tuple.into_iter().map(Element::new).collect());
                        if cur.eat("}") {
                            break;
                        }
                        cur.expect(",")?;
                    }
                }
                cur.finish()?;
                if relations.insert(name.to_string(), tuples).is_some() {
                    return Err(cur.error(format!("`{name}` interpreted twice")));
                }
            }
            other => return Err(Cursor::new(line, line_no, indent).error(format!("unknown directive `{other}`"))),
        }
    }
    let sig = sig.ok_or(FormatError::Syntax {
        line: 1,
        column: 1,
        message: "missing `signature:`".into(),
    })?;
    let domain = domain.ok_or(FormatError::Syntax {
        line: 1,
        column: 1,
        message: "missing `domain:`".into(),
    })?;
    let s = FiniteStructure::new(sig, domain, constants, relations)?;
    Ok((s, theory))
}

/// Parses a database file and checks that its theory is true.
pub fn parse_database(text: &str) -> Result<Database, FormatError> {
    let (s, theory) = parse_database_parts(text)?;
    Ok(Database::new(s, theory)?)
}

fn write_tuple(out: &mut String, t: &Tuple) {
    if t.len() == 1 {
        out.push_str(t[0].id());
    } else {
        out.push('(');
        out.push_str(&t.iter().map(Element::id).collect::<Vec<_>>().join(", "));
        out.push(')');
    }
}

/// Renders a structure and theory in the database file format.
pub fn write_database(s: &FiniteStructure, theory: &[Formula]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "signature: {}", s.signature());
    let dom: Vec<&str> = s.domain().iter().map(Element::id).collect();
    let _ = writeln!(out, "domain: {}", dom.join(" "));
    for (c, e) in s.constants() {
        let _ = writeln!(out, "const {c} = {e}");
    }
    for (r, tuples) in s.relations() {
        let _ = write!(out, "rel {r} = {{");
        for (i, t) in tuples.iter().enumerate() {
            out.push_str(if i == 0 { " " } else { ", " });
            write_tuple(&mut out, t);
        }
        out.push_str(if tuples.is_empty() { "}\n" } else { " }\n" });
    }
    out.push_str("theory:\n");
    for t in theory {
        let _ = writeln!(out, "  {t}");
    }
    out
}

fn parse_operation(cur: &mut Cursor<'_>) -> Result<Operation, FormatError> {
    let kw = cur.word("`insert` or `delete`")?;
    if kw != "insert" && kw != "delete" {
        return Err(Cursor::new(cur.text, cur.line, 0).error(format!("unknown operation `{kw}`")));
    }
    let name = cur.word("a symbol name")?;
    let sym_err = |cur: &Cursor<'_>, e: SignatureError| cur.error(e.to_string());
    let op = match kw {
        "insert" => {
            if cur.eat("=") {
                let id = cur.word("an element id")?;
                let fresh = cur.eat("*");
                let e = ElementRef {
                    id: Element::new(id),
                    fresh,
                };
                Operation::Insert(InsertionSpec::constant(name, e).map_err(|e| sym_err(cur, e))?)
            } else {
                cur.expect("(")?;
                let payload = element_list(cur)?
                    .into_iter()
                    .map(|(id, fresh)| ElementRef {
                        id: Element::new(id),
                        fresh,
                    })
                    .collect();
                cur.expect(")")?;
                Operation::Insert(InsertionSpec::tuple(name, payload).map_err(|e| sym_err(cur, e))?)
            }
        }
        "delete" => {
            let mut spec = if cur.eat("->") {
                let id = cur.word("an element id")?;
                DeletionSpec::constant(name, id).map_err(|e| sym_err(cur, e))?
            } else {
                cur.expect("(")?;
                let list = element_list(cur)?;
                cur.expect(")")?;
                if list.iter().any(|(_, fresh)| *fresh) {
                    return Err(cur.error("`*` is only meaningful in insertions"));
                }
                let ids: Vec<&str> = list.into_iter().map(|(id, _)| id).collect();
                DeletionSpec::tuple(name, &ids).map_err(|e| sym_err(cur, e))?
            };
            if cur.eat("drop") {
                let list = element_list(cur)?;
                if list.iter().any(|(_, fresh)| *fresh) {
                    return Err(cur.error("`*` is only meaningful in insertions"));
                }
                spec = spec.dropping(list.into_iter().map(|(id, _)| id));
            }
            Operation::Delete(spec)
        }
        _ => unreachable!("checked above"),
    };
    cur.finish()?;
    Ok(op)
}

/// Parses an update script, one operation per line.
pub fn parse_script(text: &str) -> Result<Vec<Operation>, FormatError> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        ops.push(parse_operation(&mut Cursor::new(line, i + 1, 0))?);
    }
    Ok(ops)
}

pub fn write_script(ops: &[Operation]) -> String {
    ops.iter().map(|o| format!("{o}\n")).collect()
}

/// Parses `p1; p2` against `sig`; an empty string is the empty premise set.
pub fn parse_premises(text: &str, sig: &Signature) -> Result<Vec<Formula>, FormatError> {
    premises_at(text, sig, 1, 0)
}

fn premises_at(text: &str, sig: &Signature, line: usize, offset: usize) -> Result<Vec<Formula>, FormatError> {
    let mut out = Vec::new();
    let mut start = 0;
    for part in text.split(';') {
        let lead = part.len() - part.trim_start().len();
        if !part.trim().is_empty() {
            out.push(sentence_at(part.trim(), sig, line, offset + start + lead)?);
        } else if text.contains(';') {
            return Err(FormatError::Syntax {
                line,
                column: offset + start + 1,
                message: "empty premise".into(),
            });
        }
        start += part.len() + 1;
    }
    Ok(out)
}

/// Parses a deductions file: `p1; p2 |- c` per line, plus `declare:` lines
/// that add symbols to the language used for later lines.
pub fn parse_deductions(text: &str, base: &Signature) -> Result<Vec<Deduction>, FormatError> {
    let mut sig = base.clone();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = header(line, "declare") {
            let decls = Signature::parse_decls(rest).map_err(|e| signature_error(line_no, e))?;
            sig = sig.union(&decls).map_err(|e| signature_error(line_no, e))?;
            continue;
        }
        let Some(turnstile) = line.find("|-") else {
            return Err(FormatError::Syntax {
                line: line_no,
                column: line.len() + 1,
                message: "expected `|-`".into(),
            });
        };
        let premises = premises_at(&line[..turnstile], &sig, line_no, 0)?;
        let rhs = &line[turnstile + 2..];
        let lead = rhs.len() - rhs.trim_start().len();
        let conclusion = sentence_at(rhs.trim(), &sig, line_no, turnstile + 2 + lead)?;
        out.push(Deduction::new(premises, conclusion));
    }
    Ok(out)
}

/// Declarations accepted on the command line, e.g. `b/0`.
pub fn parse_declarations<'a>(decls: impl IntoIterator<Item = &'a str>) -> Result<Signature, SignatureError> {
    decls
        .into_iter()
        .try_fold(Signature::new(), |acc, d| acc.union(&Signature::parse_decls(d)?))
}
