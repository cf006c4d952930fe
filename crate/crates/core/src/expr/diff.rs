use super::{Expr, Var};

fn is_num(e: &Expr, value: f64) -> bool {
    matches!(e, Expr::Num(c) if *c == value)
}

fn add(l: Expr, r: Expr) -> Expr {
    match (is_num(&l, 0.0), is_num(&r, 0.0)) {
        (true, _) => r,
        (_, true) => l,
        _ => l + r,
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (is_num(&l, 0.0), is_num(&r, 0.0)) {
        (_, true) => l,
        (true, _) => -r,
        _ => l - r,
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    if is_num(&l, 0.0) || is_num(&r, 0.0) {
        Expr::zero()
    } else if is_num(&l, 1.0) {
        r
    } else if is_num(&r, 1.0) {
        l
    } else {
        l * r
    }
}

/// Raw partial derivative; callers simplify.
pub(super) fn derivative(e: &Expr, var: Var) -> Expr {
    match e {
        Expr::Num(_) | Expr::Const(_) => Expr::zero(),
        Expr::Var(w) => Expr::Num(if *w == var { 1.0 } else { 0.0 }),
        Expr::Neg(u) => {
            let du = derivative(u, var);
            if is_num(&du, 0.0) {
                du
            } else {
                -du
            }
        }
        Expr::Add(l, r) => add(derivative(l, var), derivative(r, var)),
        Expr::Sub(l, r) => sub(derivative(l, var), derivative(r, var)),
        Expr::Mul(l, r) => add(
            mul(derivative(l, var), (**r).clone()),
            mul((**l).clone(), derivative(r, var)),
        ),
        Expr::Div(l, r) => {
            // A power in the denominator is kept as a negative power, so the
            // base is never expanded just to be inverted again.
            if let Expr::Pow(base, n) = &**r {
                return derivative(&mul((**l).clone(), (**base).clone().powi(n.saturating_neg())), var);
            }
            let dl = derivative(l, var);
            let dr = derivative(r, var);
            if is_num(&dr, 0.0) {
                if is_num(&dl, 0.0) {
                    return Expr::zero();
                }
                return dl / (**r).clone();
            }
            sub(mul(dl, (**r).clone()), mul((**l).clone(), dr)) / (**r).clone().powi(2)
        }
        Expr::Pow(base, n) => {
            let db = derivative(base, var);
            if is_num(&db, 0.0) || *n == 0 {
                return Expr::zero();
            }
            mul(mul(Expr::Num(f64::from(*n)), (**base).clone().powi(n - 1)), db)
        }
        Expr::Sin(u) => mul((**u).clone().cos(), derivative(u, var)),
        Expr::Cos(u) => {
            let du = derivative(u, var);
            if is_num(&du, 0.0) {
                return du;
            }
            mul(-(**u).clone().sin(), du)
        }
        Expr::Exp(u) => mul(e.clone(), derivative(u, var)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn same(actual: Expr, expected: &str) {
        assert_eq!(actual, parse(expected).unwrap().simplify(), "got {actual}");
    }

    #[test]
    fn gauge_partial_in_x() {
        same(parse("0.5*C1*x^2").unwrap().diff(Var::X), "C1*x");
    }

    #[test]
    fn gauge_partial_in_t() {
        same(parse("C6*t").unwrap().diff(Var::T), "C6");
    }

    #[test]
    fn product_and_chain_rule() {
        same(parse("sin(t)*x").unwrap().diff(Var::T), "cos(t)*x");
        same(parse("exp(2*t)").unwrap().diff(Var::T), "2*exp(2*t)");
        same(parse("cos(x^2)").unwrap().diff(Var::X), "-2*x*sin(x^2)");
        same(parse("1/t").unwrap().diff(Var::T), "-1/t^2");
        assert_eq!(
            parse("0.25/(t + x)^3").unwrap().diff(Var::T).to_string(),
            "-0.75/(t + x)^4"
        );
    }

    #[test]
    fn constant_derivative_is_zero() {
        assert!(parse("C1*C2 + pi").unwrap().diff(Var::X).is_zero());
    }

    #[test]
    fn total_derivatives_of_primary_gauge_partials() {
        same(parse("0.5*C1*x^2").unwrap().total_time_derivative().unwrap(), "C1*x*v");
        same(
            parse("C2*x*t").unwrap().total_time_derivative().unwrap(),
            "C2*(v*t + x)",
        );
        same(
            parse("t*x*t").unwrap().total_time_derivative().unwrap(),
            "2*t*x + t^2*v",
        );
    }

    #[test]
    fn total_derivative_of_velocity_brings_acceleration() {
        same(parse("v^2").unwrap().total_time_derivative().unwrap(), "2*v*a");
        assert_eq!(
            parse("a*x").unwrap().total_time_derivative(),
            Err(super::super::ExprError::HigherOrder)
        );
    }
}
