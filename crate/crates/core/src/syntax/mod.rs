//! Formulas: the AST, the ASCII grammar and the rewrites used by the
//! checker and the satisfiability machinery.

mod ast;
mod parse;
mod print;
mod transform;

pub use ast::{AgentId, Formula, Fragment, TOP_ATOM};
pub use parse::{parse, ParseError};
pub use transform::{f_transform, simplify, translate_edpal};
