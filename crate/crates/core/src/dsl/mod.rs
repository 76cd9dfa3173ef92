//! Text syntax for maps S and implicit relations f.
//!
//! ```text
//! map      := piece (";" piece)* | exprlist
//! piece    := "piece" guard ":" exprlist
//! guard    := var "in" "[" num "," num "]" ("and" guard)?
//! exprlist := expr ("," expr)* | "(" expr ("," expr)+ ")"
//! expr     := term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := num | var | "(" expr ")" | "-" factor | func "(" expr ("," expr)* ")"
//! func     := "max" | "min" | "sqrt" | "abs"
//! ```
//!
//! Maps use variables `x`, `y`; relations use `r`, `s`, `t`.

mod expr;
mod lexer;
mod map;
mod parser;
mod relation;

use thiserror::Error;

use crate::point::Point;

pub use expr::{BinOp, Expr, Func, Var};
pub use map::{eval_map, parse_map, Guard, MappingSpec, Piece};
pub use relation::{parse_relation, RelationClass, RelationExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("unknown variable `{name}` at {position}")]
    UnknownVariable { name: String, position: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no piece guard matches {point}")]
    GuardMiss { point: Point },
    #[error("numeric error: {0}")]
    Numeric(String),
}
