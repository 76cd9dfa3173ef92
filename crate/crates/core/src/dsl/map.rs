use std::fmt;

use super::expr::{Expr, Var};
use super::parser::{Parser, Scope};
use super::{EvalError, ParseError};
use crate::point::Point;

/// `var in [lo, hi]`, closed on both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub var: Var,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    /// Conjunction; empty means always true.
    pub guards: Vec<Guard>,
    pub body: Vec<Expr>,
}

impl Piece {
    fn matches(&self, p: &[f64]) -> bool {
        self.guards.iter().all(|g| {
            let v = p[g.var.slot()];
            g.lo <= v && v <= g.hi
        })
    }
}

/// A piecewise map S: ℝⁿ → ℝᵐ. The first piece whose guard holds wins.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingSpec {
    arity: usize,
    pieces: Vec<Piece>,
    piecewise: bool,
}

impl MappingSpec {
    /// Number of input coordinates the map reads (1 for `x`, 2 once `y` appears).
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn output_dim(&self) -> usize {
        self.pieces[0].body.len()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Declare a wider input space (e.g. a constant map on ℝ²).
    pub fn with_arity(mut self, arity: usize) -> Result<Self, ParseError> {
        if arity < self.arity {
            return Err(ParseError::Arity(format!(
                "map reads {} coordinates but arity {arity} was declared",
                self.arity
            )));
        }
        if arity > 2 {
            return Err(ParseError::Arity(format!(
                "maps have at most 2 input coordinates, got {arity}"
            )));
        }
        self.arity = arity;
        Ok(self)
    }

    /// Evaluate at `p`. Points must carry at least `arity` coordinates.
    pub fn eval(&self, p: &Point) -> Result<Point, EvalError> {
        let coords = p.coords();
        if coords.len() < self.arity {
            return Err(EvalError::Numeric(format!(
                "map expects {} coordinates, got {}",
                self.arity,
                coords.len()
            )));
        }
        let mut args = [0.0f64; 2];
        for (a, c) in args.iter_mut().zip(coords) {
            *a = *c;
        }
        let piece = self
            .pieces
            .iter()
            .find(|piece| piece.matches(&args))
            .ok_or_else(|| EvalError::GuardMiss { point: p.clone() })?;
        let out = piece
            .body
            .iter()
            .map(|e| e.eval(&args))
            .collect::<Result<Vec<f64>, _>>()?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(EvalError::Numeric(format!("non-finite map value at {p}")));
        }
        Ok(Point::new(out))
    }
}

/// Evaluate `spec` at `p`.
pub fn eval_map(spec: &MappingSpec, p: &Point) -> Result<Point, EvalError> {
    spec.eval(p)
}

pub fn parse_map(text: &str) -> Result<MappingSpec, ParseError> {
    let mut parser = Parser::new(text, Scope::Map)?;
    let mut pieces = Vec::new();
    let piecewise = parser.at_keyword("piece");
    if piecewise {
        loop {
            parser.expect_keyword("piece")?;
            let mut guards = Vec::new();
            loop {
                let var = parser.variable()?;
                parser.expect_keyword("in")?;
                parser.expect_sym('[')?;
                let at = parser.offset();
                let lo = parser.number()?;
                parser.expect_sym(',')?;
                let hi = parser.number()?;
                parser.expect_sym(']')?;
                if lo > hi {
                    return Err(ParseError::Syntax {
                        position: at,
                        expected: "lower bound not above upper bound".into(),
                        found: format!("[{lo}, {hi}]"),
                    });
                }
                guards.push(Guard { var, lo, hi });
                if parser.at_keyword("and") {
                    parser.expect_keyword("and")?;
                } else {
                    break;
                }
            }
            parser.expect_sym(':')?;
            let body = parser.expr_list()?;
            pieces.push(Piece { guards, body });
            if !parser.eat_sym(';') {
                break;
            }
        }
    } else {
        pieces.push(Piece {
            guards: Vec::new(),
            body: parser.expr_list()?,
        });
    }
    parser.expect_end()?;

    let outputs = pieces[0].body.len();
    if let Some((i, p)) = pieces.iter().enumerate().find(|(_, p)| p.body.len() != outputs) {
        return Err(ParseError::Arity(format!(
            "piece {} has {} outputs but piece 1 has {outputs}",
            i + 1,
            p.body.len()
        )));
    }
    let mut arity = 1;
    for piece in &pieces {
        for g in &piece.guards {
            arity = arity.max(g.var.slot() + 1);
        }
        for e in &piece.body {
            e.for_each_var(&mut |v| arity = arity.max(v.slot() + 1));
        }
    }
    Ok(MappingSpec {
        arity,
        pieces,
        piecewise,
    })
}

fn fmt_body(f: &mut fmt::Formatter<'_>, body: &[Expr]) -> fmt::Result {
    if body.len() == 1 {
        return write!(f, "{}", body[0]);
    }
    f.write_str("(")?;
    for (i, e) in body.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{e}")?;
    }
    f.write_str(")")
}

impl fmt::Display for MappingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.piecewise {
            return fmt_body(f, &self.pieces[0].body);
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            f.write_str("piece ")?;
            for (j, g) in piece.guards.iter().enumerate() {
                if j > 0 {
                    f.write_str(" and ")?;
                }
                write!(f, "{} in [{}, {}]", g.var.name(), g.lo, g.hi)?;
            }
            f.write_str(": ")?;
            fmt_body(f, &piece.body)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_map() {
        let s = parse_map("(2-3*x)/4").unwrap();
        assert_eq!(s.pieces().len(), 1);
        assert_eq!((s.arity(), s.output_dim()), (1, 1));
        assert_eq!(s.eval(&2.0.into()).unwrap(), (-1.0).into());
    }

    #[test]
    fn piecewise_map_prefers_first_piece() {
        let s = parse_map("piece x in [3,4]: 1; piece x in [4,5]: 5-x").unwrap();
        assert_eq!(s.pieces().len(), 2);
        assert_eq!(s.eval(&4.0.into()).unwrap(), 1.0.into());
        assert_eq!(s.eval(&4.5.into()).unwrap(), 0.5.into());
        assert_eq!(
            s.eval(&6.0.into()).unwrap_err(),
            EvalError::GuardMiss { point: 6.0.into() }
        );
    }

    #[test]
    fn vector_map() {
        let s = parse_map("(1, y/2)").unwrap();
        assert_eq!((s.arity(), s.output_dim()), (2, 2));
        assert_eq!(s.eval(&[4.0, 1.0].into()).unwrap(), [1.0, 0.5].into());
        let bare = parse_map("x/2, 0").unwrap();
        assert_eq!(bare.eval(&[2.0, 7.0].into()).unwrap(), [1.0, 0.0].into());
    }

    #[test]
    fn syntax_error_at_end() {
        match parse_map("(2-3*x").unwrap_err() {
            ParseError::Syntax { position, .. } => assert_eq!(position, 6),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            parse_map("piece x in [0,1]: (x, 1); piece x in [1,2]: x"),
            Err(ParseError::Arity(_))
        ));
        assert!(matches!(
            parse_map("(1, y)").unwrap().with_arity(1),
            Err(ParseError::Arity(_))
        ));
    }

    #[test]
    fn relation_variables_are_rejected() {
        assert!(matches!(parse_map("r + 1"), Err(ParseError::UnknownVariable { .. })));
        assert!(matches!(
            parse_map("z"),
            Err(ParseError::UnknownVariable { position: 0, .. })
        ));
    }

    #[test]
    fn numeric_errors() {
        let s = parse_map("1/(x-1)").unwrap();
        assert!(matches!(s.eval(&1.0.into()), Err(EvalError::Numeric(_))));
        let s = parse_map("sqrt(x)").unwrap();
        assert!(matches!(s.eval(&(-1.0).into()), Err(EvalError::Numeric(_))));
    }

    #[test]
    fn function_arity_is_checked() {
        assert!(parse_map("max(x)").is_err());
        assert!(parse_map("sqrt(x, 1)").is_err());
        assert_eq!(
            parse_map("max(x, 1, 2)").unwrap().eval(&0.0.into()).unwrap(),
            2.0.into()
        );
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "(2-3*x)/4",
            "piece x in [3,4]: 1; piece x in [4,5]: 5-x",
            "(1, y/2)",
            "(x/2, 0)",
            "piece x in [-1,-0.5] and y in [0, 2]: (-x, y - (1 - x)); piece x in [0,1]: (x, 2)",
            "6-x",
            "9-x",
        ] {
            let spec = parse_map(text).unwrap();
            let again = parse_map(&spec.to_string()).unwrap();
            assert_eq!(spec, again, "{text} -> {spec}");
        }
    }
}
