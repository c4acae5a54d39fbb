//! Structured SMV descriptions and their canonical text.

mod generate;
mod reader;

use std::fmt::{self, Write as _};

pub use generate::{bundle_check_file, generate_smv, SmvGenError};
pub use reader::{read_smv, SmvReadError};

/// Symbolic value every decision variable starts from.
pub const UNDETERMINED: &str = "undetermined";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sort {
    Boolean,
    /// Enumerated symbolic values, in declaration order.
    Scalar(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: Sort,
}

/// Case-arm condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    True,
    /// Boolean variable.
    Var(String),
    /// `(var = value)`
    Eq(String, String),
    /// `var != value`
    Neq(String, String),
    And(Vec<Cond>),
    Or(Vec<Cond>),
}

/// Right-hand side of an `init` or a case arm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Symbol(String),
    /// Current value of a variable.
    Var(String),
    /// Nondeterministic choice among symbolic values.
    Choice(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseArm {
    pub cond: Cond,
    pub value: Value,
}

impl CaseArm {
    pub fn new(cond: Cond, value: Value) -> CaseArm {
        CaseArm { cond, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assign {
    pub var: String,
    pub init: Value,
    /// First matching arm wins; the last arm is the `TRUE : var` default.
    pub next: Vec<CaseArm>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SmvModule {
    pub vars: Vec<VarDecl>,
    pub assigns: Vec<Assign>,
    /// Formula text of each `LTLSPEC`, without the keyword.
    pub specs: Vec<String>,
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::True => f.write_str("TRUE"),
            Cond::Var(v) => f.write_str(v),
            Cond::Eq(v, x) => write!(f, "({v} = {x})"),
            Cond::Neq(v, x) => write!(f, "{v} != {x}"),
            Cond::And(items) => join(f, items, " & ", |c| matches!(c, Cond::Or(_) | Cond::Neq(..))),
            Cond::Or(items) => join(f, items, " | ", |c| matches!(c, Cond::And(_) | Cond::Neq(..))),
        }
    }
}

fn join(
    f: &mut fmt::Formatter<'_>,
    items: &[Cond],
    sep: &str,
    needs_parens: impl Fn(&Cond) -> bool,
) -> fmt::Result {
    for (i, c) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        if needs_parens(c) {
            write!(f, "({c})")?;
        } else {
            write!(f, "{c}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
            Value::Symbol(s) | Value::Var(s) => f.write_str(s),
            Value::Choice(values) => write!(f, "{{{}}}", values.join(", ")),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Boolean => f.write_str("boolean"),
            Sort::Scalar(values) => write!(f, "{{{}}}", values.join(", ")),
        }
    }
}

/// Canonical text: `MODULE main`, `VAR`, `ASSIGN`, then `LTLSPEC` lines if
/// any. Case arms are indented four spaces deeper than `esac`.
pub fn render_smv(module: &SmvModule) -> String {
    let mut out = String::new();
    out.push_str("MODULE main\nVAR\n");
    for v in &module.vars {
        let _ = writeln!(out, "    {} : {};", v.name, v.sort);
    }
    out.push_str("ASSIGN\n");
    for a in &module.assigns {
        let _ = writeln!(out, "init({}) := {};", a.var, a.init);
        let _ = writeln!(out, "next({}) := case", a.var);
        for arm in &a.next {
            let _ = writeln!(out, "        {} : {};", arm.cond, arm.value);
        }
        out.push_str("    esac;\n");
    }
    for spec in &module.specs {
        let _ = writeln!(out, "LTLSPEC {spec}");
    }
    out
}

impl fmt::Display for SmvModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_smv(self))
    }
}
