//! LTL formulas: syntax tree, text form, and generation from models.

mod formula;
mod generate;
mod parse;

pub use formula::LtlFormula;
pub use generate::{
    generate_properties, generate_properties_with, render_ltlspec, JoinMode, LtlGenError,
    Primitive, Property, PropertySet,
};
pub use parse::{parse_ltl, LtlParseError};
