use std::collections::BTreeMap;

use num_traits::One;

use super::expr::{Apply, Builtin, DerivRule, Expr, Node};
use super::subst::substitute;
use super::SymError;

/// Partial derivative with respect to the symbol `var`.
///
/// Every other symbol, jet coordinates included, is treated as independent.
pub fn differentiate(e: &Expr, var: &str) -> Result<Expr, SymError> {
    if !e.contains_symbol(var) {
        return Ok(Expr::zero());
    }
    Ok(match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => {
            if &**s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Apply(a) => {
            let mut acc = Vec::new();
            for (i, arg) in a.args.iter().enumerate() {
                let inner = differentiate(arg, var)?;
                if inner.is_zero() {
                    continue;
                }
                acc.push(partial(a, i)? * inner);
            }
            acc.into_iter().sum()
        }
        Node::Builtin(kind, arg) => {
            let inner = differentiate(arg, var)?;
            match kind {
                Builtin::Exp => e * inner,
                Builtin::Ln => inner / arg,
                Builtin::LambertW => return Err(SymError::UnsupportedDerivative("lambertw".into())),
            }
        }
        Node::Pow(base, q) => {
            let inner = differentiate(base, var)?;
            let lowered = base.pow_q(&(q - super::expr::Q::one()));
            Expr::num(q.clone()) * lowered * inner
        }
        Node::Mul(factors) => {
            let mut acc = Vec::new();
            for i in 0..factors.len() {
                let d = differentiate(&factors[i], var)?;
                if d.is_zero() {
                    continue;
                }
                let mut term = d;
                for (j, f) in factors.iter().enumerate() {
                    if j != i {
                        term = term * f;
                    }
                }
                acc.push(term);
            }
            acc.into_iter().sum()
        }
        Node::Add(terms) => {
            let mut acc = Vec::with_capacity(terms.len());
            for t in terms {
                acc.push(differentiate(t, var)?);
            }
            acc.into_iter().sum()
        }
    })
}

/// Derivative of an application with respect to its `i`-th argument slot.
fn partial(a: &Apply, i: usize) -> Result<Expr, SymError> {
    let underived = a.derivs.iter().all(|&d| d == 0);
    match &a.func.rules[i] {
        DerivRule::Explicit(rule) if underived => {
            let bindings: BTreeMap<Expr, Expr> = a
                .func
                .params
                .iter()
                .zip(&a.args)
                .map(|(p, x)| (Expr::sym(p), x.clone()))
                .collect();
            Ok(substitute(rule, &bindings))
        }
        DerivRule::Unknown => Err(SymError::UnsupportedDerivative(format!(
            "{} with respect to {}",
            a.func.name, a.func.params[i]
        ))),
        _ => {
            let mut derivs = a.derivs.clone();
            derivs[i] += 1;
            Ok(Expr::apply(&a.func, derivs, a.args.clone()))
        }
    }
}
