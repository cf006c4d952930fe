//! Symbolic expressions in time `t`, position `x`, velocity `v` (ẋ) and
//! acceleration `a` (ẍ), with named constants.
//!
//! Every Lagrangian, gauge function, force and Euler–Lagrange residual in the
//! crate is an [`Expr`]. Trees are immutable values; all operations return new
//! trees and are safe to call from several threads at once.
//!
//! The textual grammar is
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! with `sin`, `cos` and `exp` as the only functions and `pi` as a built-in
//! constant. A leading `-` is accepted on the exponent (`x^-2`) so that every
//! tree prints to text that parses back to the same tree.

mod diff;
mod parse;
mod print;
mod simplify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use parse::{parse, parse_with};

/// Errors raised by parsing, evaluation and differentiation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("expression already depends on the acceleration `a`; its time derivative needs the jerk")]
    HigherOrder,
}

/// The four kinematic variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    X,
    V,
    A,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::T, Var::X, Var::V, Var::A];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::V => "v",
            Var::A => "a",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "t" => Some(Var::T),
            "x" => Some(Var::X),
            "v" => Some(Var::V),
            "a" => Some(Var::A),
            _ => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Name of the built-in constant π.
pub const PI_NAME: &str = "pi";

pub(crate) const RESERVED: [&str; 8] = ["t", "x", "v", "a", "sin", "cos", "exp", PI_NAME];

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(String),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn num(value: f64) -> Expr {
        Expr::Num(value)
    }

    pub fn constant(name: impl Into<String>) -> Expr {
        Expr::Const(name.into())
    }

    pub fn var(var: Var) -> Expr {
        Expr::Var(var)
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn v() -> Expr {
        Expr::Var(Var::V)
    }

    pub fn a() -> Expr {
        Expr::Var(Var::A)
    }

    pub fn zero() -> Expr {
        Expr::Num(0.0)
    }

    pub fn one() -> Expr {
        Expr::Num(1.0)
    }

    pub fn powi(self, exponent: i32) -> Expr {
        Expr::Pow(Box::new(self), exponent)
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    /// True for the literal `0`, the only form `simplify` gives an
    /// identically vanishing polynomial.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(c) if *c == 0.0)
    }

    /// Numeric value if the tree is a literal, possibly negated.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Expr::Num(c) => Some(*c),
            Expr::Neg(inner) => inner.as_number().map(|c| -c),
            _ => None,
        }
    }

    /// Structural dependence on `var`. Use on simplified trees when the
    /// question is semantic (`x - x` mentions `x`).
    pub fn depends_on(&self, var: Var) -> bool {
        self.any_node(&|e| matches!(e, Expr::Var(w) if *w == var))
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Var(w) = e {
                out.insert(*w);
            }
        });
        out
    }

    /// Named constants appearing in the tree, excluding `pi`.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Const(name) = e {
                if name != PI_NAME {
                    out.insert(name.clone());
                }
            }
        });
        out
    }

    /// Replaces every constant bound in `bindings` by its numeric value.
    /// Variables are left untouched.
    pub fn substitute_constants(&self, bindings: &Bindings) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Const(name) => bindings.constant(name).map(Expr::Num),
            _ => None,
        })
    }

    /// Replaces a variable by an expression.
    pub fn substitute_var(&self, var: Var, with: &Expr) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Var(w) if *w == var => Some(with.clone()),
            _ => None,
        })
    }

    /// Evaluates in IEEE double arithmetic. Division by zero, `0^-n` and
    /// non-finite results are reported as [`ExprError::Domain`].
    pub fn eval(&self, bindings: &Bindings) -> Result<f64, ExprError> {
        let value = match self {
            Expr::Num(c) => *c,
            Expr::Const(name) => match bindings.constant(name) {
                Some(value) => value,
                None if name == PI_NAME => std::f64::consts::PI,
                None => return Err(ExprError::UnboundSymbol(name.clone())),
            },
            Expr::Var(var) => bindings
                .var(*var)
                .ok_or_else(|| ExprError::UnboundSymbol(var.name().to_string()))?,
            Expr::Neg(u) => -u.eval(bindings)?,
            Expr::Add(l, r) => l.eval(bindings)? + r.eval(bindings)?,
            Expr::Sub(l, r) => l.eval(bindings)? - r.eval(bindings)?,
            Expr::Mul(l, r) => l.eval(bindings)? * r.eval(bindings)?,
            Expr::Div(l, r) => {
                let num = l.eval(bindings)?;
                let den = r.eval(bindings)?;
                if den == 0.0 {
                    return Err(ExprError::Domain(format!("division by zero in `{self}`")));
                }
                num / den
            }
            Expr::Pow(base, n) => {
                let b = base.eval(bindings)?;
                if b == 0.0 && *n < 0 {
                    return Err(ExprError::Domain(format!("zero raised to {n} in `{self}`")));
                }
                b.powi(*n)
            }
            Expr::Sin(u) => u.eval(bindings)?.sin(),
            Expr::Cos(u) => u.eval(bindings)?.cos(),
            Expr::Exp(u) => u.eval(bindings)?.exp(),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ExprError::Domain(format!("non-finite value in `{self}`")))
        }
    }

    /// Partial derivative with respect to `var`, the other variables held
    /// fixed. The result is simplified.
    pub fn diff(&self, var: Var) -> Expr {
        diff::derivative(self, var).simplify()
    }

    /// Total time derivative `∂/∂t + v ∂/∂x + a ∂/∂v` of an expression in
    /// `(t, x, v)`.
    pub fn total_time_derivative(&self) -> Result<Expr, ExprError> {
        if self.depends_on(Var::A) {
            return Err(ExprError::HigherOrder);
        }
        let dt = diff::derivative(self, Var::T);
        let dx = diff::derivative(self, Var::X);
        let dv = diff::derivative(self, Var::V);
        let total = dt + Expr::v() * dx + Expr::a() * dv;
        Ok(total.simplify())
    }

    /// Normal form: constants folded, like terms collected, sums and
    /// products flattened. Idempotent.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    fn any_node(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => false,
            Expr::Neg(u) | Expr::Pow(u, _) | Expr::Sin(u) | Expr::Cos(u) | Expr::Exp(u) => u.any_node(pred),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.any_node(pred) || r.any_node(pred)
            }
        }
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => {}
            Expr::Neg(u) | Expr::Pow(u, _) | Expr::Sin(u) | Expr::Cos(u) | Expr::Exp(u) => u.visit(f),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    fn map_leaves(&self, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        let un = |u: &Expr| Box::new(u.map_leaves(f));
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => f(self).unwrap_or_else(|| self.clone()),
            Expr::Neg(u) => Expr::Neg(un(u)),
            Expr::Pow(u, n) => Expr::Pow(un(u), *n),
            Expr::Sin(u) => Expr::Sin(un(u)),
            Expr::Cos(u) => Expr::Cos(un(u)),
            Expr::Exp(u) => Expr::Exp(un(u)),
            Expr::Add(l, r) => Expr::Add(un(l), un(r)),
            Expr::Sub(l, r) => Expr::Sub(un(l), un(r)),
            Expr::Mul(l, r) => Expr::Mul(un(l), un(r)),
            Expr::Div(l, r) => Expr::Div(un(l), un(r)),
        }
    }
}

impl FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        Expr::Num(value)
    }
}

impl From<Var> for Expr {
    fn from(var: Var) -> Self {
        Expr::Var(var)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }

        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$variant(Box::new(self), Box::new(Expr::Num(rhs)))
            }
        }

        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(Expr::Num(self)), Box::new(rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Values for variables and named constants. Extra entries are allowed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    vars: [Option<f64>; 4],
    constants: BTreeMap<String, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds a variable (`t`, `x`, `v`, `a`) or a constant by name.
    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        match Var::from_name(name) {
            Some(var) => self.vars[var.index()] = Some(value),
            None => {
                self.constants.insert(name.to_string(), value);
            }
        }
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set_var(&mut self, var: Var, value: f64) -> &mut Self {
        self.vars[var.index()] = Some(value);
        self
    }

    pub fn with_var(mut self, var: Var, value: f64) -> Self {
        self.set_var(var, value);
        self
    }

    pub fn var(&self, var: Var) -> Option<f64> {
        self.vars[var.index()]
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        match Var::from_name(name) {
            Some(var) => self.var(var),
            None => self.constant(name),
        }
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, f64)> {
        self.constants.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Variables first (in `t, x, v, a` order), then constants by name.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        Var::ALL
            .iter()
            .filter_map(|var| self.var(*var).map(|value| (var.name(), value)))
            .chain(self.constants())
    }

    pub fn extend(&mut self, other: &Bindings) {
        for (name, value) in other.iter() {
            self.set(name, value);
        }
    }
}

impl Serialize for Bindings {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<_> = self.iter().collect();
        let mut map = serializer.serialize_map(Some(entries.len()))?;
        for (name, value) in entries {
            map.serialize_entry(name, &value)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn eval_power() {
        assert_eq!(p("t^2").eval(&Bindings::new().with("t", 3.0)).unwrap(), 9.0);
    }

    #[test]
    fn eval_primary_standard_lagrangian_vanishes() {
        let b = Bindings::new().with("v", 2.0).with("x", 1.0).with("c", 4.0);
        assert_eq!(p("0.5*(v^2 - c*x^2)").eval(&b).unwrap(), 0.0);
    }

    #[test]
    fn eval_pole_is_domain_error() {
        let b = Bindings::new().with("x", 1.0).with("t", 0.0);
        assert!(matches!(p("x/t").eval(&b), Err(ExprError::Domain(_))));
        assert!(matches!(p("t^-1").eval(&b), Err(ExprError::Domain(_))));
    }

    #[test]
    fn eval_unbound() {
        assert_eq!(
            p("x + C1").eval(&Bindings::new().with("x", 1.0)),
            Err(ExprError::UnboundSymbol("C1".into()))
        );
    }

    #[test]
    fn pi_defaults_to_constant() {
        let value = p("cos(pi)").eval(&Bindings::new()).unwrap();
        assert!((value + 1.0).abs() < 1e-15);
        assert!(p("pi*x").constants().is_empty());
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            p("exp(1000)").eval(&Bindings::new()),
            Err(ExprError::Domain(_))
        ));
    }

    #[test]
    fn substitute_constants_only_touches_bound_names() {
        let e = p("C1*x + C2").substitute_constants(&Bindings::new().with("C1", 2.0));
        assert_eq!(e.to_string(), "2*x + C2");
    }

    #[test]
    fn bindings_serialize_vars_first() {
        let b = Bindings::new().with("C1", 1.5).with("x", 2.0).with("t", 0.5);
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"t":0.5,"x":2.0,"C1":1.5}"#);
    }
}
