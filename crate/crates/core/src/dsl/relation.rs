use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::parser::{Parser, Scope};
use super::{EvalError, ParseError};

/// Target implicit-relation class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationClass {
    A,
    Aprime,
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationClass::A => "A",
            RelationClass::Aprime => "Aprime",
        })
    }
}

/// f: ℝ₊³ → ℝ over variables `r`, `s`, `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationExpr {
    pub body: Expr,
    pub declared_class: RelationClass,
    /// Named constants the expression was built from (catalog entries).
    pub params: BTreeMap<String, f64>,
}

impl RelationExpr {
    pub fn with_class(mut self, class: RelationClass) -> Self {
        self.declared_class = class;
        self
    }

    pub fn eval(&self, r: f64, s: f64, t: f64) -> Result<f64, EvalError> {
        let v = self.body.eval(&[r, s, t])?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Numeric(format!("f({r}, {s}, {t}) is not finite")))
        }
    }
}

impl fmt::Display for RelationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.body.fmt(f)
    }
}

/// Parse `text` as a relation; the declared class defaults to 𝒜.
pub fn parse_relation(text: &str) -> Result<RelationExpr, ParseError> {
    let mut parser = Parser::new(text, Scope::Relation)?;
    let body = parser.expr()?;
    parser.expect_end()?;
    Ok(RelationExpr {
        body,
        declared_class: RelationClass::A,
        params: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_relations_parse() {
        let f = parse_relation("0.75*max(r,s,t)").unwrap();
        assert_eq!(f.eval(1.0, 4.0, 2.0).unwrap(), 3.0);
        let f = parse_relation("(1/3)*(s+t)").unwrap();
        assert!((f.eval(9.0, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let f = parse_relation("0.9*sqrt(s*t)").unwrap();
        assert!((f.eval(0.0, 4.0, 1.0).unwrap() - 1.8).abs() < 1e-15);
    }

    #[test]
    fn map_variables_are_unknown() {
        assert!(matches!(
            parse_relation("x + r"),
            Err(ParseError::UnknownVariable { position: 0, .. })
        ));
    }

    #[test]
    fn trailing_garbage() {
        assert!(matches!(
            parse_relation("r s"),
            Err(ParseError::Syntax { position: 2, .. })
        ));
    }
}
