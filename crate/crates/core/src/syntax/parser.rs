use thiserror::Error;

use super::{is_keyword, is_variable_name, Formula, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown symbol `{name}` at offset {position}")]
    UnknownSymbol { name: String, position: usize },
    #[error("arity mismatch for `{name}` at offset {position}: declared {declared}, used with {used}")]
    ArityMismatch {
        name: String,
        position: usize,
        declared: usize,
        used: usize,
    },
    #[error("not a sentence: free variable(s) {}", .names.join(", "))]
    FreeVariables { names: Vec<String> },
}

impl ParseError {
    /// Byte offset of the error inside the parsed text, when it has one.
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownSymbol { position, .. }
            | ParseError::ArityMismatch { position, .. } => Some(*position),
            ParseError::FreeVariables { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'=' => Tok::Equals,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::DoubleArrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let found = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    position: start,
                    expected: "a formula token".into(),
                    found: format!("`{found}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let mut vars = vec![self.variable()?];
                while matches!(self.peek(), Tok::Ident(_)) {
                    vars.push(self.variable()?);
                }
                self.expect(Tok::Dot)?;
                let mut body = self.iff()?;
                for v in vars.into_iter().rev() {
                    body = if kw == "forall" {
                        Formula::forall(v, body)
                    } else {
                        Formula::exists(v, body)
                    };
                }
                Ok(body)
            }
            _ => self.primary(),
        }
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if is_variable_name(&name) && !self.sig.contains_name(&name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error("a variable name")),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if !is_keyword(&name) => {
                let at = self.offset();
                if self.toks[self.pos + 1].0 == Tok::LParen {
                    self.bump();
                    self.bump();
                    let mut args = vec![self.term()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                    match self.sig.arity(&name) {
                        None => Err(ParseError::UnknownSymbol { name, position: at }),
                        Some(declared) if declared != args.len() => {
                            Err(ParseError::ArityMismatch {
                                name,
                                position: at,
                                declared,
                                used: args.len(),
                            })
                        }
                        Some(_) => Ok(Formula::Atom {
                            relation: name,
                            args,
                        }),
                    }
                } else {
                    let lhs = self.term()?;
                    self.expect(Tok::Equals)?;
                    let rhs = self.term()?;
                    Ok(Formula::Eq(lhs, rhs))
                }
            }
            _ => Err(self.error("a formula")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_keyword(&name) => {
                let at = self.offset();
                let term = match self.sig.arity(&name) {
                    Some(0) => Term::Const(name),
                    Some(declared) => {
                        return Err(ParseError::ArityMismatch {
                            name,
                            position: at,
                            declared,
                            used: 0,
                        })
                    }
                    None if is_variable_name(&name) => Term::Var(name),
                    None => return Err(ParseError::UnknownSymbol { name, position: at }),
                };
                self.bump();
                Ok(term)
            }
            _ => Err(self.error("a term")),
        }
    }
}

/// Parses `text` against `sig`. Free variables are allowed.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

/// Parses `text` and requires the result to have no free variables.
pub fn parse_sentence(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let f = parse_formula(text, sig)?;
    let free = f.free_variables();
    if !free.is_empty() {
        return Err(ParseError::FreeVariables {
            names: free.into_iter().collect(),
        });
    }
    Ok(f)
}
