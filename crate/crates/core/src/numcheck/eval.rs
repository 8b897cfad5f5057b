use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive};

use super::quad::integrate;
use super::lambert::lambert_w0;
use super::NumError;
use crate::symkernel::{differentiate, Builtin, Expr, Node, Q};

/// A polynomial stand-in for an opaque function, differentiable exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyInst {
    pub arity: usize,
    pub terms: Vec<(Vec<u16>, f64)>,
}

impl PolyInst {
    /// Value of the derivative with multiplicities `derivs` at `point`.
    pub fn eval(&self, derivs: &[u16], point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut term = *c;
            for i in 0..self.arity {
                let (e, d) = (exps[i], derivs[i]);
                if d > e {
                    term = 0.0;
                    break;
                }
                for k in 0..d {
                    term *= f64::from(e - k);
                }
                term *= point[i].powi(i32::from(e - d));
            }
            acc += term;
        }
        acc
    }
}

/// How an opaque function is evaluated numerically.
#[derive(Clone, Debug)]
pub enum Instantiation {
    Poly(PolyInst),
    /// `∫_{lower}^{arg[var]} integrand ds` with the integrand written in the
    /// function's parameter symbols.
    Quadrature { integrand: Expr, var: usize, lower: f64 },
}

/// Numeric values for symbols and instantiations for function symbols.
#[derive(Clone, Debug, Default)]
pub struct Binding {
    pub values: BTreeMap<String, f64>,
    pub functions: BTreeMap<String, Instantiation>,
    pub seed: u64,
}

impl Binding {
    pub fn with_value(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn set(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

/// Evaluates `e` under `b`.
pub fn eval(e: &Expr, b: &Binding) -> Result<f64, NumError> {
    eval_scoped(e, b, &[])
}

/// Evaluates with `locals` shadowing the binding's symbol values.
pub fn eval_scoped(e: &Expr, b: &Binding, locals: &[(&str, f64)]) -> Result<f64, NumError> {
    let v = match e.node() {
        Node::Num(q) => q_to_f64(q),
        Node::Sym(s) => match locals.iter().rev().find(|(n, _)| *n == &**s) {
            Some((_, v)) => *v,
            None => b.get(s).ok_or_else(|| NumError::Unbound(s.to_string()))?,
        },
        Node::Apply(a) => {
            let args = a
                .args
                .iter()
                .map(|x| eval_scoped(x, b, locals))
                .collect::<Result<Vec<_>, _>>()?;
            let name = &*a.func.name;
            match b.functions.get(name) {
                Some(Instantiation::Poly(p)) => p.eval(&a.derivs, &args),
                Some(Instantiation::Quadrature { integrand, var, lower }) => {
                    eval_quadrature(a, integrand, *var, *lower, &args, b)?
                }
                None => return Err(NumError::Unbound(name.to_string())),
            }
        }
        Node::Builtin(kind, x) => {
            let x = eval_scoped(x, b, locals)?;
            match kind {
                Builtin::Exp => x.exp(),
                Builtin::Ln => {
                    if x <= 0.0 {
                        return Err(NumError::Domain(format!("ln of {x}")));
                    }
                    x.ln()
                }
                Builtin::LambertW => lambert_w0(x)?,
            }
        }
        Node::Pow(base, q) => {
            let x = eval_scoped(base, b, locals)?;
            pow_f64(x, q)?
        }
        Node::Mul(v) => {
            let mut acc = 1.0;
            for f in v {
                acc *= eval_scoped(f, b, locals)?;
            }
            acc
        }
        Node::Add(v) => {
            let mut acc = 0.0;
            for t in v {
                acc += eval_scoped(t, b, locals)?;
            }
            acc
        }
    };
    if v.is_nan() {
        return Err(NumError::Domain(format!("not a number in {e}")));
    }
    Ok(v)
}

fn pow_f64(x: f64, q: &Q) -> Result<f64, NumError> {
    if x == 0.0 && q.is_negative() {
        return Err(NumError::Domain("division by zero".into()));
    }
    if q.is_integer() {
        let n = q.to_integer().to_i32().ok_or_else(|| NumError::Domain("exponent overflow".into()))?;
        return Ok(x.powi(n));
    }
    let qf = q_to_f64(q);
    if x >= 0.0 {
        return Ok(x.powf(qf));
    }
    let odd = |n: &num_bigint::BigInt| n % 2 != num_bigint::BigInt::from(0);
    if odd(q.denom()) {
        let mag = (-x).powf(qf);
        Ok(if odd(q.numer()) { -mag } else { mag })
    } else {
        Err(NumError::Domain(format!("fractional power of negative {x}")))
    }
}

fn eval_quadrature(
    a: &crate::symkernel::Apply,
    integrand: &Expr,
    var: usize,
    lower: f64,
    args: &[f64],
    b: &Binding,
) -> Result<f64, NumError> {
    let params: Vec<&str> = a.func.params.iter().map(|p| &**p).collect();
    let mut body = integrand.clone();
    let along = a.derivs[var];
    for (i, &d) in a.derivs.iter().enumerate() {
        let times = if i == var { d.saturating_sub(1) } else { d };
        for _ in 0..times {
            body = differentiate(&body, params[i]).map_err(|e| NumError::Unsupported(e.to_string()))?;
        }
    }
    let mut locals: Vec<(&str, f64)> = params.iter().copied().zip(args.iter().copied()).collect();
    if along > 0 {
        return eval_scoped(&body, b, &locals);
    }
    let mut failure = None;
    let value = integrate(
        |s| {
            locals[var].1 = s;
            match eval_scoped(&body, b, &locals) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        lower,
        args[var],
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}
