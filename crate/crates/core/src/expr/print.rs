use std::fmt;

use super::Expr;

// Binding strength of each node; a child is parenthesized when it binds
// more loosely than its position requires.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Num(c) if c.is_sign_negative() => UNARY,
        Expr::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Const(name) => f.write_str(name),
            Expr::Var(var) => f.write_str(var.name()),
            Expr::Neg(u) => {
                f.write_str("-")?;
                child(f, u, UNARY)
            }
            Expr::Add(l, r) => {
                child(f, l, SUM)?;
                f.write_str(" + ")?;
                child(f, r, PRODUCT)
            }
            Expr::Sub(l, r) => {
                child(f, l, SUM)?;
                f.write_str(" - ")?;
                child(f, r, PRODUCT)
            }
            Expr::Mul(l, r) => {
                child(f, l, PRODUCT)?;
                f.write_str("*")?;
                child(f, r, UNARY)
            }
            Expr::Div(l, r) => {
                child(f, l, PRODUCT)?;
                f.write_str("/")?;
                child(f, r, UNARY)
            }
            Expr::Pow(base, n) => {
                child(f, base, ATOM)?;
                write!(f, "^{n}")
            }
            Expr::Sin(u) => write!(f, "sin({u})"),
            Expr::Cos(u) => write!(f, "cos({u})"),
            Expr::Exp(u) => write!(f, "exp({u})"),
        }
    }
}
