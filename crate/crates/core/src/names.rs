//! Identifiers that cannot be used as node ids in generated SMV or LTL text.

/// Keywords of the SMV input language and its LTL operators, plus the
/// `undetermined` constant used by decision variables.
const RESERVED: &[&str] = &[
    "A", "ABF", "ABG", "AF", "AG", "ASSIGN", "AU", "AX", "BU", "COMPASSION", "COMPUTE",
    "CONSTANTS", "CONSTRAINT", "CTLSPEC", "CTLWFF", "DEFINE", "E", "EBF", "EBG", "EF", "EG",
    "EU", "EX", "F", "FAIRNESS", "FALSE", "FROZENVAR", "G", "H", "IN", "INIT", "INVAR",
    "INVARSPEC", "ISA", "IVAR", "JUSTICE", "LTLSPEC", "LTLWFF", "MAX", "MDEFINE", "MIN",
    "MIRROR", "MODULE", "NAME", "O", "PRED", "PREDICATES", "PSLSPEC", "PSLWFF", "S",
    "SIMPWFF", "SPEC", "T", "TRANS", "TRUE", "U", "V", "VAR", "X", "Y", "Z", "abs", "array",
    "bool", "boolean", "case", "count", "esac", "extend", "floor", "in", "init", "integer",
    "max", "min", "mod", "next", "of", "process", "real", "resize", "self", "signed",
    "sizeof", "swconst", "toint", "undetermined", "union", "unsigned", "uwconst", "word",
    "word1", "xnor", "xor",
];

/// True for ids that would clash with keywords or with generated decision
/// constants (`guard_...`).
pub fn is_reserved(id: &str) -> bool {
    RESERVED.contains(&id) || id.starts_with("guard_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keywords_and_guard_prefix() {
        assert!(is_reserved("F"));
        assert!(is_reserved("xor"));
        assert!(is_reserved("undetermined"));
        assert!(is_reserved("guard_D_A"));
        assert!(!is_reserved("ShipOrder"));
        assert!(!is_reserved("Final"));
    }
}
