//! Normal form for expressions.
//!
//! An expression is expanded into a sum of terms `coeff * Π atom^k`, where an
//! atom is a constant, a variable, `sin`/`cos`/`exp` of a normalized
//! argument, or a normalized multi-term sum that could not be expanded (a
//! denominator, or a power above [`MAX_EXPANDED_POWER`]). Like terms are
//! merged and zero terms dropped; the result is rebuilt into a tree in a
//! fixed order. Rebuilding then re-normalizing reproduces the same tree,
//! which makes `simplify` idempotent and lets structural equality stand in
//! for polynomial identity over the atoms.

use std::cmp::Ordering;

use super::Expr;

const MAX_EXPANDED_POWER: i32 = 16;

type Factor = (Expr, i32);

#[derive(Debug, Clone)]
struct Term {
    coeff: f64,
    factors: Vec<Factor>,
}

#[derive(Debug, Clone, Default)]
struct Poly {
    terms: Vec<Term>,
}

pub(super) fn simplify(e: &Expr) -> Expr {
    rebuild(&to_poly(e))
}

fn rank(e: &Expr) -> u8 {
    match e {
        Expr::Num(_) => 0,
        Expr::Const(_) => 1,
        Expr::Var(_) => 2,
        Expr::Sin(_) => 3,
        Expr::Cos(_) => 4,
        Expr::Exp(_) => 5,
        Expr::Pow(..) => 6,
        Expr::Neg(_) => 7,
        Expr::Mul(..) => 8,
        Expr::Div(..) => 9,
        Expr::Add(..) => 10,
        Expr::Sub(..) => 11,
    }
}

/// Total order on trees used to sort factors and terms.
pub(crate) fn expr_cmp(a: &Expr, b: &Expr) -> Ordering {
    rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => x.total_cmp(y),
        (Expr::Const(x), Expr::Const(y)) => x.cmp(y),
        (Expr::Var(x), Expr::Var(y)) => x.cmp(y),
        (Expr::Sin(x), Expr::Sin(y))
        | (Expr::Cos(x), Expr::Cos(y))
        | (Expr::Exp(x), Expr::Exp(y))
        | (Expr::Neg(x), Expr::Neg(y)) => expr_cmp(x, y),
        (Expr::Pow(x, m), Expr::Pow(y, n)) => expr_cmp(x, y).then(m.cmp(n)),
        (Expr::Mul(l1, r1), Expr::Mul(l2, r2))
        | (Expr::Div(l1, r1), Expr::Div(l2, r2))
        | (Expr::Add(l1, r1), Expr::Add(l2, r2))
        | (Expr::Sub(l1, r1), Expr::Sub(l2, r2)) => expr_cmp(l1, l2).then_with(|| expr_cmp(r1, r2)),
        _ => Ordering::Equal,
    })
}

fn factors_cmp(a: &[Factor], b: &[Factor]) -> Ordering {
    for ((ea, ka), (eb, kb)) in a.iter().zip(b) {
        let ord = expr_cmp(ea, eb).then(ka.cmp(kb));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

// Numeric terms go last.
fn term_cmp(a: &Term, b: &Term) -> Ordering {
    match (a.factors.is_empty(), b.factors.is_empty()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => factors_cmp(&a.factors, &b.factors),
    }
}

fn is_zero_atom(e: &Expr) -> bool {
    matches!(e, Expr::Num(c) if *c == 0.0)
}

/// Merges two sorted factor lists. `None` when the product vanishes
/// (a literal zero raised to a positive power).
fn merge_factors(a: &[Factor], b: &[Factor]) -> Option<Vec<Factor>> {
    let mut out: Vec<Factor> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j == b.len() {
            i += 1;
            a[i - 1].clone()
        } else if i == a.len() {
            j += 1;
            b[j - 1].clone()
        } else {
            match expr_cmp(&a[i].0, &b[j].0) {
                Ordering::Less => {
                    i += 1;
                    a[i - 1].clone()
                }
                Ordering::Greater => {
                    j += 1;
                    b[j - 1].clone()
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0.clone(), a[i - 1].1.saturating_add(b[j - 1].1))
                }
            }
        };
        if next.1 != 0 {
            out.push(next);
        }
    }
    if out.iter().any(|(atom, k)| *k > 0 && is_zero_atom(atom)) {
        None
    } else {
        Some(out)
    }
}

impl Poly {
    fn zero() -> Poly {
        Poly::default()
    }

    fn constant(c: f64) -> Poly {
        Poly::from_terms(vec![Term {
            coeff: c,
            factors: Vec::new(),
        }])
    }

    fn atom(e: Expr) -> Poly {
        Poly::from_terms(vec![Term {
            coeff: 1.0,
            factors: vec![(e, 1)],
        }])
    }

    fn from_terms(mut terms: Vec<Term>) -> Poly {
        // Every negative power of a literal zero is the same undefined value.
        for (atom, k) in terms.iter_mut().flat_map(|t| t.factors.iter_mut()) {
            if *k < 0 && is_zero_atom(atom) {
                *k = -1;
            }
        }
        terms.sort_by(term_cmp);
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.factors == term.factors => last.coeff += term.coeff,
                _ => merged.push(term),
            }
        }
        merged.retain(|t| t.coeff != 0.0 && !t.factors.iter().any(|(atom, k)| *k > 0 && is_zero_atom(atom)));
        Poly { terms: merged }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(mut self, other: Poly) -> Poly {
        self.terms.extend(other.terms);
        Poly::from_terms(self.terms)
    }

    fn neg(mut self) -> Poly {
        for term in &mut self.terms {
            term.coeff = -term.coeff;
        }
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                if let Some(factors) = merge_factors(&a.factors, &b.factors) {
                    terms.push(Term {
                        coeff: a.coeff * b.coeff,
                        factors,
                    });
                }
            }
        }
        Poly::from_terms(terms)
    }

    fn pow(&self, n: i32) -> Poly {
        if n == 0 {
            return Poly::constant(1.0);
        }
        if self.is_zero() {
            return if n > 0 {
                Poly::zero()
            } else {
                Poly::unexpanded(Expr::zero(), 1.0, n)
            };
        }
        if let [term] = self.terms.as_slice() {
            let mut out = Poly::constant(term.coeff.powi(n));
            for (atom, k) in &term.factors {
                let k = k.saturating_mul(n);
                let sum = matches!(atom, Expr::Add(..) | Expr::Sub(..));
                // An inverted sum that comes back to a small positive power is
                // expanded like any other.
                let factor = if sum && k > 0 && k <= MAX_EXPANDED_POWER {
                    to_poly(atom).pow(k)
                } else {
                    Poly::from_terms(vec![Term {
                        coeff: 1.0,
                        factors: vec![(atom.clone(), k)],
                    }])
                };
                out = out.mul(&factor);
            }
            return out;
        }
        if n > 0 && n <= MAX_EXPANDED_POWER {
            let mut out = self.clone();
            for _ in 1..n {
                out = out.mul(self);
            }
            return out;
        }
        // Factor out the leading coefficient so the stored base is unique.
        let lead = self.terms[0].coeff;
        let base = Poly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff / lead,
                    factors: t.factors.clone(),
                })
                .collect(),
        };
        Poly::unexpanded(rebuild(&base), lead.powi(n), n)
    }

    fn unexpanded(base: Expr, coeff: f64, n: i32) -> Poly {
        Poly::from_terms(vec![Term {
            coeff,
            factors: vec![(base, n)],
        }])
    }
}

fn fold_or_atom(arg: &Expr, f: fn(f64) -> f64, wrap: fn(Expr) -> Expr) -> Poly {
    let arg = simplify(arg);
    if let Some(value) = arg.as_number().map(f) {
        if value.is_finite() {
            return Poly::constant(value);
        }
    }
    Poly::atom(wrap(arg))
}

fn to_poly(e: &Expr) -> Poly {
    match e {
        Expr::Num(c) if *c == 0.0 => Poly::zero(),
        Expr::Num(c) => Poly::constant(*c),
        Expr::Const(_) | Expr::Var(_) => Poly::atom(e.clone()),
        Expr::Neg(u) => to_poly(u).neg(),
        Expr::Add(l, r) => to_poly(l).add(to_poly(r)),
        Expr::Sub(l, r) => to_poly(l).add(to_poly(r).neg()),
        Expr::Mul(l, r) => to_poly(l).mul(&to_poly(r)),
        Expr::Div(l, r) => to_poly(l).mul(&reciprocal(r)),
        Expr::Pow(base, n) if *n < 0 => reciprocal(base).pow(n.saturating_neg()),
        Expr::Pow(base, n) => to_poly(base).pow(*n),
        Expr::Sin(u) => fold_or_atom(u, f64::sin, Expr::sin),
        Expr::Cos(u) => fold_or_atom(u, f64::cos, Expr::cos),
        Expr::Exp(u) => fold_or_atom(u, f64::exp, Expr::exp),
    }
}

/// `1/e`, without expanding powers of sums that would only be inverted again.
fn reciprocal(e: &Expr) -> Poly {
    match e {
        Expr::Pow(base, n) if *n > 0 => reciprocal(base).pow(*n),
        Expr::Mul(l, r) => reciprocal(l).mul(&reciprocal(r)),
        Expr::Div(l, r) => reciprocal(l).mul(&to_poly(r)),
        Expr::Neg(u) => reciprocal(u).neg(),
        _ => to_poly(e).pow(-1),
    }
}

fn power(atom: &Expr, k: i32) -> Expr {
    if k == 1 {
        atom.clone()
    } else {
        atom.clone().powi(k)
    }
}

fn build_term(magnitude: f64, factors: &[Factor]) -> Expr {
    let in_numerator = |(_, k): &&Factor| *k > 0;
    let mut numerator = if magnitude != 1.0 || !factors.iter().any(|f| in_numerator(&f)) {
        Some(Expr::Num(magnitude))
    } else {
        None
    };
    for (atom, k) in factors.iter().filter(in_numerator) {
        let f = power(atom, *k);
        numerator = Some(match numerator {
            None => f,
            Some(n) => n * f,
        });
    }
    // One division per denominator factor: a product of denominators would
    // re-expand into a new sum when normalized again.
    factors
        .iter()
        .filter(|f| !in_numerator(f))
        .fold(numerator.unwrap_or_else(Expr::one), |acc, (atom, k)| {
            acc / power(atom, -k)
        })
}

// `-` binds tighter than `*` and `/`, so the sign goes on the leftmost factor.
fn negate_leftmost(e: Expr) -> Expr {
    match e {
        Expr::Mul(l, r) => Expr::Mul(Box::new(negate_leftmost(*l)), r),
        Expr::Div(l, r) => Expr::Div(Box::new(negate_leftmost(*l)), r),
        other => -other,
    }
}

fn rebuild(p: &Poly) -> Expr {
    let mut out: Option<Expr> = None;
    for term in &p.terms {
        let negative = term.coeff < 0.0;
        let body = build_term(term.coeff.abs(), &term.factors);
        out = Some(match (out, negative) {
            (None, false) => body,
            (None, true) => negate_leftmost(body),
            (Some(acc), false) => acc + body,
            (Some(acc), true) => acc - body,
        });
    }
    out.unwrap_or_else(Expr::zero)
}
