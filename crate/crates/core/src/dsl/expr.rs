use std::fmt;

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    R,
    S,
    T,
}

impl Var {
    pub fn from_name(name: &str) -> Option<Var> {
        Some(match name {
            "x" => Var::X,
            "y" => Var::Y,
            "r" => Var::R,
            "s" => Var::S,
            "t" => Var::T,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::R => "r",
            Var::S => "s",
            Var::T => "t",
        }
    }

    /// Position in the argument vector: (x, y) for maps, (r, s, t) for relations.
    pub fn slot(self) -> usize {
        match self {
            Var::X | Var::R => 0,
            Var::Y | Var::S => 1,
            Var::T => 2,
        }
    }

    pub fn is_map_var(self) -> bool {
        matches!(self, Var::X | Var::Y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Max,
    Min,
    Sqrt,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "max" => Func::Max,
            "min" => Func::Min,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Max => "max",
            Func::Min => "min",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    /// Whether `n` arguments are accepted.
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Func::Max | Func::Min => n >= 2,
            Func::Sqrt | Func::Abs => n == 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// Expression tree. Evaluation is a plain post-order walk, so the same tree
/// always performs the same floating-point operations in the same order.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn eval(&self, args: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(v) => Ok(args[v.slot()]),
            Expr::Neg(e) => Ok(-e.eval(args)?),
            Expr::Bin(op, a, b) => {
                let a = a.eval(args)?;
                let b = b.eval(args)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(EvalError::Numeric(format!("division by zero ({a} / 0)")))
                        } else {
                            Ok(a / b)
                        }
                    }
                }
            }
            Expr::Call(f, xs) => match f {
                Func::Max | Func::Min => {
                    let mut acc = xs[0].eval(args)?;
                    for e in &xs[1..] {
                        let v = e.eval(args)?;
                        acc = if *f == Func::Max { acc.max(v) } else { acc.min(v) };
                    }
                    Ok(acc)
                }
                Func::Sqrt => {
                    let v = xs[0].eval(args)?;
                    if v < 0.0 {
                        Err(EvalError::Numeric(format!("sqrt of negative value {v}")))
                    } else {
                        Ok(v.sqrt())
                    }
                }
                Func::Abs => Ok(xs[0].eval(args)?.abs()),
            },
        }
    }

    /// Visit every variable occurrence.
    pub fn for_each_var(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Neg(e) => e.for_each_var(f),
            Expr::Bin(_, a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            Expr::Call(_, xs) => xs.iter().for_each(|e| e.for_each_var(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(v) => write!(f, "{v}")?,
            Expr::Var(v) => f.write_str(v.name())?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                a.fmt_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // operators are left-associative: a same-precedence right child needs parens
                b.fmt_prec(f, p + 1)?;
            }
            Expr::Call(func, xs) => {
                write!(f, "{}(", func.name())?;
                for (i, e) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    e.fmt_prec(f, 0)?;
                }
                f.write_str(")")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
