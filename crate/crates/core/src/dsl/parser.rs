//! Recursive descent over the token stream.

use super::expr::{BinOp, Expr, Func, Var};
use super::lexer::{lex, Tok};
use super::ParseError;

/// Which variables an expression may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Scope {
    Map,
    Relation,
}

impl Scope {
    fn admits(self, v: Var) -> bool {
        match self {
            Scope::Map => v.is_map_var(),
            Scope::Relation => !v.is_map_var(),
        }
    }
}

pub(super) struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    scope: Scope,
}

impl Parser {
    pub(super) fn new(src: &str, scope: Scope) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            scope,
        })
    }

    pub(super) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    pub(super) fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(super) fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    pub(super) fn at_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    pub(super) fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(super) fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(super) fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    pub(super) fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    pub(super) fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    /// Signed numeric literal (guards only).
    pub(super) fn number(&mut self) -> Result<f64, ParseError> {
        let neg = self.eat_sym('-');
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.error("number")),
        }
    }

    pub(super) fn variable(&mut self) -> Result<Var, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) => match Var::from_name(&name) {
                Some(v) if self.scope.admits(v) => {
                    self.bump();
                    Ok(v)
                }
                _ if Func::from_name(&name).is_some() || name == "piece" => Err(self.error("variable")),
                _ => Err(ParseError::UnknownVariable { name, position: at }),
            },
            _ => Err(self.error("variable")),
        }
    }

    /// `exprlist`, accepting an optional tuple parenthesization.
    pub(super) fn expr_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        if self.at_sym('(') {
            let save = self.pos;
            self.bump();
            let first = self.expr()?;
            if self.at_sym(',') {
                let mut out = vec![first];
                while self.eat_sym(',') {
                    out.push(self.expr()?);
                }
                self.expect_sym(')')?;
                return Ok(out);
            }
            self.pos = save;
        }
        let mut out = vec![self.expr()?];
        while self.eat_sym(',') {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    pub(super) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.at_sym('+') {
                BinOp::Add
            } else if self.at_sym('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.at_sym('*') {
                BinOp::Mul
            } else if self.at_sym('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek_at(1) != Tok::Sym('(') {
                        self.bump();
                        return Err(self.error("`(`"));
                    }
                    let at = self.offset();
                    self.bump();
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.eat_sym(',') {
                        args.push(self.expr()?);
                    }
                    self.expect_sym(')')?;
                    if !func.accepts(args.len()) {
                        return Err(ParseError::Syntax {
                            position: at,
                            expected: match func {
                                Func::Max | Func::Min => format!("at least 2 arguments to {}", func.name()),
                                _ => format!("exactly 1 argument to {}", func.name()),
                            },
                            found: format!("{} arguments", args.len()),
                        });
                    }
                    Ok(Expr::Call(func, args))
                } else {
                    Ok(Expr::Var(self.variable()?))
                }
            }
            _ => Err(self.error("expression")),
        }
    }
}
