//! Recursive-descent parser and printer for the formula syntax.
//!
//! Grammar:
//! ```text
//! formula := impl
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "[]" unary | "<>" unary | ident | "(" formula ")"
//! ```

use std::sync::Arc;

use thiserror::Error;

use super::{Alphabet, ModalFormula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("atom `{0}` is not in the declared alphabet")]
    UndeclaredAtom(String),
    #[error("duplicate atom `{0}` in alphabet")]
    DuplicateAtom(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    BoxOp,
    DiamondOp,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, FormulaParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '~' => {
                tokens.push((i, Token::Tilde));
                i += 1;
            }
            '&' => {
                tokens.push((i, Token::Amp));
                i += 1;
            }
            '|' => {
                tokens.push((i, Token::Pipe));
                i += 1;
            }
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((i, Token::Arrow));
                    i += 2;
                } else {
                    return Err(FormulaParseError::Syntax {
                        position: i,
                        message: "expected `->`".to_string(),
                    });
                }
            }
            '[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    tokens.push((i, Token::BoxOp));
                    i += 2;
                } else {
                    return Err(FormulaParseError::Syntax {
                        position: i,
                        message: "expected `[]`".to_string(),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((i, Token::DiamondOp));
                    i += 2;
                } else {
                    return Err(FormulaParseError::Syntax {
                        position: i,
                        message: "expected `<>`".to_string(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(FormulaParseError::Syntax {
                    position: i,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    /// Declared alphabet, or an inferred one collecting atoms in first-use
    /// order.
    declared: Option<&'a [String]>,
    inferred: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> FormulaParseError {
        FormulaParseError::Syntax { position: self.here(), message: message.into() }
    }

    fn atom_index(&mut self, name: &str) -> Result<usize, FormulaParseError> {
        if let Some(declared) = self.declared {
            return declared
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| FormulaParseError::UndeclaredAtom(name.to_string()));
        }
        if let Some(i) = self.inferred.iter().position(|a| a == name) {
            return Ok(i);
        }
        self.inferred.push(name.to_string());
        Ok(self.inferred.len() - 1)
    }

    fn implication(&mut self) -> Result<ModalFormula, FormulaParseError> {
        let left = self.disjunction()?;
        if self.peek() == Some(&Token::Arrow) {
            self.next();
            let right = self.implication()?; // right-associative
            return Ok(ModalFormula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<ModalFormula, FormulaParseError> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Token::Pipe) {
            self.next();
            f = ModalFormula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<ModalFormula, FormulaParseError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Token::Amp) {
            self.next();
            f = ModalFormula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<ModalFormula, FormulaParseError> {
        match self.next() {
            Some((_, Token::Tilde)) => Ok(ModalFormula::negated(self.unary()?)),
            Some((_, Token::BoxOp)) => Ok(ModalFormula::boxed(self.unary()?)),
            Some((_, Token::DiamondOp)) => Ok(ModalFormula::diamond(self.unary()?)),
            Some((_, Token::Ident(name))) => Ok(ModalFormula::Atom(self.atom_index(&name)?)),
            Some((_, Token::LParen)) => {
                let f = self.implication()?;
                match self.next() {
                    Some((_, Token::RParen)) => Ok(f),
                    _ => Err(self.error("expected `)`")),
                }
            }
            _ => Err(self.error("expected a formula")),
        }
    }
}

/// Parses a formula. With a declared alphabet, unknown identifiers are
/// errors; without one, the alphabet is inferred in first-occurrence order.
pub fn parse_formula(
    text: &str,
    alphabet: Option<&Arc<Alphabet>>,
) -> Result<(ModalFormula, Arc<Alphabet>), FormulaParseError> {
    let tokens = lex(text)?;
    let declared: Option<Vec<String>> =
        alphabet.map(|a| a.atoms().map(str::to_string).collect());
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        declared: declared.as_deref(),
        inferred: Vec::new(),
    };
    let f = parser.implication()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("trailing input after formula"));
    }
    let alphabet = match alphabet {
        Some(a) => Arc::clone(a),
        None => Alphabet::new(parser.inferred)?,
    };
    Ok((f, alphabet))
}

/// Renders a formula with minimal parentheses; reparsing yields an identical
/// tree.
pub fn print_formula(f: &ModalFormula, alphabet: &Alphabet) -> String {
    // Precedence levels: -> is 1, | is 2, & is 3, unary/atoms are 4.
    fn go(f: &ModalFormula, alphabet: &Alphabet, parent: u8, out: &mut String) {
        let level = match f {
            ModalFormula::Implies(..) => 1,
            ModalFormula::Or(..) => 2,
            ModalFormula::And(..) => 3,
            _ => 4,
        };
        let parens = level < parent;
        if parens {
            out.push('(');
        }
        match f {
            ModalFormula::Atom(i) => out.push_str(alphabet.atom(*i)),
            ModalFormula::Not(g) => {
                out.push('~');
                go(g, alphabet, 4, out);
            }
            ModalFormula::Box(g) => {
                out.push_str("[]");
                go(g, alphabet, 4, out);
            }
            ModalFormula::Diamond(g) => {
                out.push_str("<>");
                go(g, alphabet, 4, out);
            }
            ModalFormula::And(a, b) => {
                go(a, alphabet, 3, out);
                out.push_str(" & ");
                go(b, alphabet, 3, out);
            }
            ModalFormula::Or(a, b) => {
                go(a, alphabet, 2, out);
                out.push_str(" | ");
                go(b, alphabet, 2, out);
            }
            ModalFormula::Implies(a, b) => {
                // Right-associative: the left operand needs strictly higher
                // binding.
                go(a, alphabet, 2, out);
                out.push_str(" -> ");
                go(b, alphabet, 1, out);
            }
        }
        if parens {
            out.push(')');
        }
    }
    let mut out = String::new();
    go(f, alphabet, 0, &mut out);
    out
}
