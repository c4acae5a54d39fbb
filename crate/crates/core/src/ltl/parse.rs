//! Recursive-descent reader for LTL text.
//!
//! Precedence, tightest first: `! G F X`, `&`, `|`, `xor`, `->` (right
//! associative). Spacing is free, so formulas echoed by external tools with
//! extra blanks and parentheses read back to the same tree.

use thiserror::Error;

use super::LtlFormula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct LtlParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Xor,
    Implies,
    G,
    F,
    X,
    True,
    False,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LtlParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Implies
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                let word: String = chars[start..=i].iter().collect();
                match word.as_str() {
                    "G" => Tok::G,
                    "F" => Tok::F,
                    "X" => Tok::X,
                    "xor" => Tok::Xor,
                    "TRUE" => Tok::True,
                    "FALSE" => Tok::False,
                    _ => Tok::Ident(word),
                }
            }
            c => {
                return Err(LtlParseError {
                    column: col,
                    message: format!("unexpected character '{c}'"),
                })
            }
        };
        out.push((tok, col));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LtlParseError> {
        Err(LtlParseError {
            column: self.toks[self.at].1,
            message: message.into(),
        })
    }

    fn implies(&mut self) -> Result<LtlFormula, LtlParseError> {
        let lhs = self.xor()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(LtlFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn binary_level(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<LtlFormula, LtlParseError>,
        build: fn(LtlFormula, LtlFormula) -> LtlFormula,
    ) -> Result<LtlFormula, LtlParseError> {
        let mut lhs = next(self)?;
        while *self.peek() == op {
            self.bump();
            let rhs = next(self)?;
            lhs = build(lhs, rhs);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<LtlFormula, LtlParseError> {
        self.binary_level(Tok::Xor, Self::or, LtlFormula::xor)
    }

    fn or(&mut self) -> Result<LtlFormula, LtlParseError> {
        self.binary_level(Tok::Or, Self::and, LtlFormula::or)
    }

    fn and(&mut self) -> Result<LtlFormula, LtlParseError> {
        self.binary_level(Tok::And, Self::unary, LtlFormula::and)
    }

    fn unary(&mut self) -> Result<LtlFormula, LtlParseError> {
        let build: fn(LtlFormula) -> LtlFormula = match self.peek() {
            Tok::Not => LtlFormula::not,
            Tok::G => LtlFormula::globally,
            Tok::F => LtlFormula::finally,
            Tok::X => LtlFormula::next,
            _ => return self.primary(),
        };
        self.bump();
        Ok(build(self.unary()?))
    }

    fn primary(&mut self) -> Result<LtlFormula, LtlParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(LtlFormula::Atom(name))
            }
            Tok::True => {
                self.bump();
                Ok(LtlFormula::True)
            }
            Tok::False => {
                self.bump();
                Ok(LtlFormula::False)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implies()?;
                if *self.peek() != Tok::RParen {
                    return self.error("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => self.error("unexpected end of formula"),
            other => self.error(format!("unexpected {other:?}, expected an operand")),
        }
    }
}

/// Parses one formula; trailing input is an error.
pub fn parse_ltl(text: &str) -> Result<LtlFormula, LtlParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(f)
}
