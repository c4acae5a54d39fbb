use std::fmt;

/// LTL formula over node-name atoms.
///
/// Binary connectives are strictly binary; n-ary chains are built
/// left-associated by [`LtlFormula::and_all`] and friends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
    Finally(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Xor(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
}

use LtlFormula::*;

impl LtlFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Not(Box::new(f))
    }

    pub fn next(f: Self) -> Self {
        Next(Box::new(f))
    }

    pub fn globally(f: Self) -> Self {
        Globally(Box::new(f))
    }

    pub fn finally(f: Self) -> Self {
        Finally(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Or(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Self, b: Self) -> Self {
        Xor(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        Implies(Box::new(a), Box::new(b))
    }

    fn chain(items: impl IntoIterator<Item = Self>, op: fn(Self, Self) -> Self) -> Option<Self> {
        items.into_iter().reduce(op)
    }

    /// Left-associated conjunction; `None` for an empty input.
    pub fn and_all(items: impl IntoIterator<Item = Self>) -> Option<Self> {
        Self::chain(items, Self::and)
    }

    pub fn or_all(items: impl IntoIterator<Item = Self>) -> Option<Self> {
        Self::chain(items, Self::or)
    }

    pub fn xor_all(items: impl IntoIterator<Item = Self>) -> Option<Self> {
        Self::chain(items, Self::xor)
    }

    /// Atoms in order of first occurrence (left to right).
    pub fn atoms(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.visit(&mut |f| {
            if let Atom(a) = f {
                if !out.contains(&a.as_str()) {
                    out.push(a);
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a LtlFormula)) {
        f(self);
        match self {
            True | False | Atom(_) => {}
            Not(a) | Next(a) | Globally(a) | Finally(a) => a.visit(f),
            And(a, b) | Or(a, b) | Xor(a, b) | Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Number of nested temporal operators on the deepest path.
    pub fn temporal_depth(&self) -> usize {
        match self {
            True | False | Atom(_) => 0,
            Not(a) => a.temporal_depth(),
            Next(a) | Globally(a) | Finally(a) => 1 + a.temporal_depth(),
            And(a, b) | Or(a, b) | Xor(a, b) | Implies(a, b) => {
                a.temporal_depth().max(b.temporal_depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Implies(..) => 1,
            Xor(..) => 2,
            Or(..) => 3,
            And(..) => 4,
            Not(_) | Next(_) | Globally(_) | Finally(_) => 5,
            True | False | Atom(_) => 6,
        }
    }

    fn is_binary(&self) -> bool {
        self.precedence() <= 4
    }

    fn write_child(&self, child: &LtlFormula, left: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, c) = (self.precedence(), child.precedence());
        // `|` and `xor` share a level in SMV, so they are never mixed bare.
        let mixed = matches!((self, child), (Or(..), Xor(..)) | (Xor(..), Or(..)));
        let same_level_wrong_side = p == c
            && match self {
                Implies(..) => left,
                _ => !left,
            };
        if child.is_binary() && (c < p || mixed || same_level_wrong_side) {
            write!(f, "(")?;
            child.write_bare(f)?;
            write!(f, ")")
        } else {
            child.write_bare(f)
        }
    }

    fn write_unary(op: &str, operand: &LtlFormula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if op == "!" { "" } else { " " };
        if operand.is_binary() {
            write!(f, "{op}{sep}(")?;
            operand.write_bare(f)?;
            write!(f, ")")
        } else {
            write!(f, "{op}{sep}")?;
            operand.write_bare(f)
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => f.write_str("TRUE"),
            False => f.write_str("FALSE"),
            Atom(a) => f.write_str(a),
            Not(a) => Self::write_unary("!", a, f),
            Next(a) => Self::write_unary("X", a, f),
            Globally(a) => Self::write_unary("G", a, f),
            Finally(a) => Self::write_unary("F", a, f),
            And(a, b) | Or(a, b) | Xor(a, b) | Implies(a, b) => {
                let op = match self {
                    And(..) => "&",
                    Or(..) => "|",
                    Xor(..) => "xor",
                    _ => "->",
                };
                self.write_child(a, true, f)?;
                write!(f, " {op} ")?;
                self.write_child(b, false, f)
            }
        }
    }
}

/// Renders in the `LTLSPEC` surface syntax with minimal parentheses; a
/// top-level binary connective is wrapped in one pair of parentheses.
impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_binary() {
            write!(f, "(")?;
            self.write_bare(f)?;
            write!(f, ")")
        } else {
            self.write_bare(f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> LtlFormula {
        LtlFormula::atom(s)
    }

    #[test]
    fn renders_table_shapes() {
        let seq = LtlFormula::globally(LtlFormula::implies(a("A1"), LtlFormula::finally(a("A2"))));
        assert_eq!(seq.to_string(), "G (A1 -> F A2)");

        let join = LtlFormula::implies(
            LtlFormula::globally(LtlFormula::and(a("A1"), a("A2"))),
            LtlFormula::finally(a("B")),
        );
        assert_eq!(join.to_string(), "(G (A1 & A2) -> F B)");

        let merge = LtlFormula::globally(LtlFormula::implies(
            LtlFormula::or_all([a("A1"), a("A2"), a("A3")]).unwrap(),
            LtlFormula::finally(a("B")),
        ));
        assert_eq!(merge.to_string(), "G (A1 | A2 | A3 -> F B)");
    }

    #[test]
    fn parenthesizes_against_associativity_and_mixing() {
        let right_nested = LtlFormula::xor(a("p"), LtlFormula::xor(a("q"), a("r")));
        assert_eq!(right_nested.to_string(), "(p xor (q xor r))");
        let left_impl = LtlFormula::implies(LtlFormula::implies(a("p"), a("q")), a("r"));
        assert_eq!(left_impl.to_string(), "((p -> q) -> r)");
        let mixed = LtlFormula::or(LtlFormula::xor(a("p"), a("q")), a("r"));
        assert_eq!(mixed.to_string(), "((p xor q) | r)");
        let neg = LtlFormula::not(LtlFormula::and(a("p"), LtlFormula::not(a("q"))));
        assert_eq!(neg.to_string(), "!(p & !q)");
        assert_eq!(LtlFormula::globally(LtlFormula::finally(a("p"))).to_string(), "G F p");
    }

    #[test]
    fn atoms_in_first_occurrence_order() {
        let f = LtlFormula::and(a("b"), LtlFormula::or(a("a"), a("b")));
        assert_eq!(f.atoms(), vec!["b", "a"]);
        assert_eq!(f.temporal_depth(), 0);
    }
}
