//! Antiderivatives of low-degree rational functions of one variable.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::symkernel::normal::Poly;
use crate::symkernel::{collect_powers, Expr, Node, Q};

/// `rational + Σ weight·ln(arg)`.
#[derive(Clone, Debug)]
pub(crate) struct Antiderivative {
    pub rational: Expr,
    pub logs: Vec<(Expr, Expr)>,
}

impl Antiderivative {
    pub fn to_expr(&self) -> Expr {
        let logs: Expr = self.logs.iter().map(|(w, a)| w * &a.ln()).sum();
        &self.rational + &logs
    }

    /// `exp` of the antiderivative, with the logarithms folded into powers.
    pub fn exponential(&self) -> Expr {
        let mut out = if self.rational.is_zero() {
            Expr::one()
        } else {
            self.rational.exp()
        };
        for (w, a) in &self.logs {
            out = out * a.pow_expr(w);
        }
        out
    }
}

fn coefficients(e: &Expr, var: &str) -> Option<Vec<Expr>> {
    let powers = collect_powers(e, var).ok()?;
    let top = powers.keys().next_back().copied().unwrap_or(0);
    let mut out = vec![Expr::zero(); usize::try_from(top).ok()? + 1];
    for (k, c) in powers {
        out[usize::try_from(k).ok()?] = c;
    }
    Some(out)
}

/// Numerator and denominator coefficient lists of a rational function of `var`.
pub(crate) fn as_ratio(e: &Expr, var: &str) -> Option<(Vec<Expr>, Vec<Expr>)> {
    let y = Expr::sym(var);
    let poly = Poly::of(e);
    let mut clear: BTreeMap<Expr, Q> = BTreeMap::new();
    for m in poly.terms.keys() {
        for (a, q) in m {
            if q.is_negative() && (matches!(a.node(), Node::Add(_)) || *a == y) {
                if !q.is_integer() {
                    return None;
                }
                let slot = clear.entry(a.clone()).or_insert_with(Q::zero);
                if -q > *slot {
                    *slot = -q;
                }
            }
        }
    }
    let den: Expr = clear.iter().fold(Expr::one(), |acc, (a, q)| acc * a.pow_q(q));
    let num = e * &den;
    Some((coefficients(&num, var)?, coefficients(&den, var)?))
}

fn get(v: &[Expr], k: usize) -> Expr {
    v.get(k).cloned().unwrap_or_else(Expr::zero)
}

/// `∫ e d(var)` for `e = (n0 + n1·y + …)/(d0 + d1·y + d2·y²)` in the cases a
/// characteristic system of a projected operator produces.
pub(crate) fn integrate(e: &Expr, var: &str) -> Option<Antiderivative> {
    if e.is_zero() {
        return Some(Antiderivative {
            rational: Expr::zero(),
            logs: Vec::new(),
        });
    }
    let y = Expr::sym(var);
    if !e.depends_on(var) {
        return Some(Antiderivative {
            rational: e * &y,
            logs: Vec::new(),
        });
    }
    let (num, den) = as_ratio(e, var)?;
    if den.iter().any(|c| c.depends_on(var)) || num.iter().any(|c| c.depends_on(var)) {
        return None;
    }
    let (d0, d1, d2) = (get(&den, 0), get(&den, 1), get(&den, 2));
    match den.len() {
        1 => {
            let mut rational = Expr::zero();
            for (k, c) in num.iter().enumerate() {
                let k = k as i64 + 1;
                rational = rational + c * &y.powi(k) / Expr::int(k) / &d0;
            }
            Some(Antiderivative {
                rational,
                logs: Vec::new(),
            })
        }
        2 if num.len() <= 2 => {
            let (n0, n1) = (get(&num, 0), get(&num, 1));
            let rational = &n1 / &d1 * &y;
            let rest = (&n0 - &n1 * &d0 / &d1) / &d1;
            let arg = if d0.is_zero() { y.clone() } else { &d0 + &d1 * &y };
            let weight = if d0.is_zero() { &n0 / &d1 } else { rest };
            Some(Antiderivative {
                rational,
                logs: vec![(weight, arg)],
            })
        }
        3 if num.len() <= 2 => {
            let (n0, n1) = (get(&num, 0), get(&num, 1));
            if d0.is_zero() && d1.is_zero() {
                return Some(Antiderivative {
                    rational: -(&n0 / &(&d2 * &y)),
                    logs: vec![(&n1 / &d2, y.clone())],
                });
            }
            if d0.is_zero() {
                let a = &n0 / &d1;
                let b = &n1 - &n0 * &d2 / &d1;
                return Some(Antiderivative {
                    rational: Expr::zero(),
                    logs: vec![(a, y.clone()), (&b / &d2, &d1 + &d2 * &y)],
                });
            }
            if (&d1 * &d1 - Expr::int(4) * &d0 * &d2).is_zero() {
                let r = &d1 / &(Expr::int(2) * &d2);
                let shifted = &y + &r;
                let rational = -((&n0 - &n1 * &r) / &(&d2 * &shifted));
                let logs = if n1.is_zero() {
                    Vec::new()
                } else {
                    vec![(&n1 / &d2, shifted)]
                };
                return Some(Antiderivative { rational, logs });
            }
            None
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{differentiate, zero_test, Context, ZeroTest};

    fn check(text: &str) {
        let ctx = Context::fiber();
        let e = ctx.parse(text).unwrap();
        let a = integrate(&e, "f").unwrap_or_else(|| panic!("no antiderivative for {text}"));
        let back = differentiate(&a.to_expr(), "f").unwrap();
        assert_eq!(zero_test(&(back - e)), ZeroTest::Zero, "{text}");
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        for t in [
            "3*f^2 + gamma1",
            "1/f",
            "1/(f - gamma1*f^2)",
            "(1 - gamma3*f)/(-gamma3*f^2)",
            "1/(2 + 3*f)",
            "eta5/(1 - gamma6*f)^2",
            "(1 + f)/(1 - gamma6*f)^2",
            "-1/(gamma4*f^2)",
        ] {
            check(t);
        }
    }

    #[test]
    fn exponential_folds_logs() {
        let ctx = Context::fiber();
        let a = integrate(&ctx.parse("1/(f - gamma1*f^2)").unwrap(), "f").unwrap();
        let e = a.exponential();
        assert!(!e.contains_builtin(crate::symkernel::Builtin::Ln), "{e}");
    }
}
