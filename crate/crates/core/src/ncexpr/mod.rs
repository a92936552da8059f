//! Free nc expressions: grammar, parser, evaluator and domain guards.

mod ast;
mod eval;
mod guard;
mod parser;

pub use ast::{serialize, NcExpr, VarKind};
pub use eval::{eval_expr, ClosureMap, NcFunction, NcMap, Space};
pub use guard::{DomainGuard, DomainVerdict};
pub use parser::parse;
