//! Reader for the SMV subset produced by [`render_smv`](super::render_smv).

use thiserror::Error;

use super::{Assign, CaseArm, Cond, SmvModule, Sort, Value, VarDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SmvReadError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Sym(&'static str),
}

const SYMBOLS: [&str; 12] = [":=", "!=", ":", ";", "(", ")", "{", "}", ",", "&", "|", "="];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SmvReadError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.split("--").next().unwrap_or("");
        let mut rest = line.trim_start();
        while !rest.is_empty() {
            if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                out.push((Tok::Sym(sym), line_no));
                rest = &rest[sym.len()..];
            } else if rest.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
                let end = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(rest.len());
                out.push((Tok::Word(rest[..end].to_string()), line_no));
                rest = &rest[end..];
            } else {
                return Err(SmvReadError {
                    line: line_no,
                    message: format!("unexpected character '{}'", rest.chars().next().unwrap()),
                });
            }
            rest = rest.trim_start();
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: Vec<String>,
}

impl Reader {
    fn line(&self) -> usize {
        self.toks
            .get(self.at)
            .or(self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SmvReadError> {
        Err(SmvReadError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn peek_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn sym(&mut self, s: &str) -> Result<(), SmvReadError> {
        if self.peek_sym(s) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected '{s}'"))
        }
    }

    fn keyword(&mut self, w: &str) -> Result<(), SmvReadError> {
        if self.peek_word(w) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected '{w}'"))
        }
    }

    fn word(&mut self) -> Result<String, SmvReadError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.at += 1;
                Ok(w)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn word_list(&mut self) -> Result<Vec<String>, SmvReadError> {
        self.sym("{")?;
        let mut items = vec![self.word()?];
        while self.peek_sym(",") {
            self.at += 1;
            items.push(self.word()?);
        }
        self.sym("}")?;
        Ok(items)
    }

    fn value(&mut self) -> Result<Value, SmvReadError> {
        if self.peek_sym("{") {
            return Ok(Value::Choice(self.word_list()?));
        }
        let w = self.word()?;
        Ok(match w.as_str() {
            "TRUE" => Value::Bool(true),
            "FALSE" => Value::Bool(false),
            _ if self.vars.contains(&w) => Value::Var(w),
            _ => Value::Symbol(w),
        })
    }

    fn cond(&mut self) -> Result<Cond, SmvReadError> {
        let mut items = vec![self.conj()?];
        while self.peek_sym("|") {
            self.at += 1;
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Cond::Or(items) })
    }

    fn conj(&mut self) -> Result<Cond, SmvReadError> {
        let mut items = vec![self.primary()?];
        while self.peek_sym("&") {
            self.at += 1;
            items.push(self.primary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Cond::And(items) })
    }

    fn primary(&mut self) -> Result<Cond, SmvReadError> {
        if self.peek_sym("(") {
            self.at += 1;
            let inner = self.cond()?;
            self.sym(")")?;
            return Ok(inner);
        }
        let w = self.word()?;
        if w == "TRUE" {
            return Ok(Cond::True);
        }
        if self.peek_sym("=") {
            self.at += 1;
            return Ok(Cond::Eq(w, self.word()?));
        }
        if self.peek_sym("!=") {
            self.at += 1;
            return Ok(Cond::Neq(w, self.word()?));
        }
        Ok(Cond::Var(w))
    }

    fn assign(&mut self) -> Result<Assign, SmvReadError> {
        self.keyword("init")?;
        self.sym("(")?;
        let var = self.word()?;
        self.sym(")")?;
        self.sym(":=")?;
        let init = self.value()?;
        self.sym(";")?;
        self.keyword("next")?;
        self.sym("(")?;
        if self.word()? != var {
            return self.err(format!("next() does not follow init({var})"));
        }
        self.sym(")")?;
        self.sym(":=")?;
        self.keyword("case")?;
        let mut next = Vec::new();
        while !self.peek_word("esac") {
            let cond = self.cond()?;
            self.sym(":")?;
            let value = self.value()?;
            self.sym(";")?;
            next.push(CaseArm::new(cond, value));
        }
        self.keyword("esac")?;
        self.sym(";")?;
        Ok(Assign { var, init, next })
    }
}

/// Reads text produced by `render_smv`. `LTLSPEC` lines are kept verbatim.
pub fn read_smv(text: &str) -> Result<SmvModule, SmvReadError> {
    let mut body = String::new();
    let mut specs = Vec::new();
    for line in text.lines() {
        match line.trim_start().strip_prefix("LTLSPEC") {
            Some(spec) => {
                specs.push(spec.trim().to_string());
                body.push('\n');
            }
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let mut r = Reader {
        toks: lex(&body)?,
        at: 0,
        vars: Vec::new(),
    };
    r.keyword("MODULE")?;
    r.keyword("main")?;
    r.keyword("VAR")?;
    let mut vars = Vec::new();
    while !r.peek_word("ASSIGN") {
        let name = r.word()?;
        r.sym(":")?;
        let sort = if r.peek_sym("{") {
            Sort::Scalar(r.word_list()?)
        } else {
            r.keyword("boolean")?;
            Sort::Boolean
        };
        r.sym(";")?;
        r.vars.push(name.clone());
        vars.push(VarDecl { name, sort });
    }
    r.keyword("ASSIGN")?;
    let mut assigns = Vec::new();
    while r.peek().is_some() {
        assigns.push(r.assign()?);
    }
    Ok(SmvModule {
        vars,
        assigns,
        specs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smv::render_smv;

    const TEXT: &str = "MODULE main
VAR
    I : boolean;
    D : {undetermined, guard_D_I};
ASSIGN
init(I) := TRUE;
next(I) := case
        (D = guard_D_I) | I & D != undetermined : FALSE;
        TRUE : I;
    esac;
init(D) := undetermined;
next(D) := case
        I : {guard_D_I};
        TRUE : D;
    esac;
LTLSPEC G (I -> F I)
";

    #[test]
    fn reads_and_rerenders() {
        let m = read_smv(TEXT).unwrap();
        assert_eq!(m.vars[1].sort, Sort::Scalar(vec!["undetermined".into(), "guard_D_I".into()]));
        assert_eq!(
            m.assigns[0].next[0].cond,
            Cond::Or(vec![
                Cond::Eq("D".into(), "guard_D_I".into()),
                Cond::And(vec![Cond::Var("I".into()), Cond::Neq("D".into(), "undetermined".into())]),
            ])
        );
        assert_eq!(m.assigns[1].init, Value::Symbol("undetermined".into()));
        assert_eq!(m.assigns[1].next[1].value, Value::Var("D".into()));
        assert_eq!(m.specs, vec!["G (I -> F I)".to_string()]);
        assert_eq!(read_smv(&render_smv(&m)).unwrap(), m);
    }

    #[test]
    fn reports_line_of_error() {
        let e = read_smv("MODULE main\nVAR\n    I : integer;\n").unwrap_err();
        assert_eq!(e.line, 3);
    }
}
