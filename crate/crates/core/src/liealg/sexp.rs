use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::symkernel::normal::Poly;
use crate::symkernel::{q_int, render_compact, Builtin, Expr, Node, Q};

/// Finite sum of `c · s^k · exp(m·s)` with rational `c`, `m`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SExp {
    terms: BTreeMap<(u32, Q), Q>,
}

impl SExp {
    pub fn zero() -> Self {
        SExp::default()
    }

    pub fn constant(c: Q) -> Self {
        SExp::term(c, 0, Q::zero())
    }

    pub fn one() -> Self {
        SExp::constant(Q::one())
    }

    /// `c · s^k · exp(m·s)`.
    pub fn term(c: Q, k: u32, m: Q) -> Self {
        let mut out = SExp::zero();
        out.add_term(c, k, m);
        out
    }

    fn add_term(&mut self, c: Q, k: u32, m: Q) {
        if c.is_zero() {
            return;
        }
        let key = (k, m);
        let v = self.terms.remove(&key).unwrap_or_else(Q::zero) + c;
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Q, &Q)> {
        self.terms.iter().map(|((k, m), c)| (*k, m, c))
    }

    pub fn add(&self, other: &SExp) -> SExp {
        let mut out = self.clone();
        for ((k, m), c) in &other.terms {
            out.add_term(c.clone(), *k, m.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> SExp {
        let mut out = SExp::zero();
        for ((k, m), v) in &self.terms {
            out.add_term(v * c, *k, m.clone());
        }
        out
    }

    pub fn mul(&self, other: &SExp) -> SExp {
        let mut out = SExp::zero();
        for ((k1, m1), c1) in &self.terms {
            for ((k2, m2), c2) in &other.terms {
                out.add_term(c1 * c2, k1 + k2, m1 + m2);
            }
        }
        out
    }

    /// The entry with `s ↦ −s`.
    pub fn negate_s(&self) -> SExp {
        let mut out = SExp::zero();
        for ((k, m), c) in &self.terms {
            let c = if k % 2 == 1 { -c } else { c.clone() };
            out.add_term(c, *k, -m);
        }
        out
    }

    pub fn derivative(&self) -> SExp {
        let mut out = SExp::zero();
        for ((k, m), c) in &self.terms {
            out.add_term(c * m, *k, m.clone());
            if *k > 0 {
                out.add_term(c * q_int(i64::from(*k)), k - 1, m.clone());
            }
        }
        out
    }

    pub fn at_zero(&self) -> Q {
        self.terms
            .iter()
            .filter(|((k, _), _)| *k == 0)
            .fold(Q::zero(), |acc, (_, c)| acc + c)
    }

    pub fn eval(&self, s: f64) -> f64 {
        use crate::numcheck::q_to_f64;
        self.terms
            .iter()
            .map(|((k, m), c)| q_to_f64(c) * s.powi(*k as i32) * (q_to_f64(m) * s).exp())
            .sum()
    }

    /// As an expression in the symbol `s`.
    pub fn to_expr(&self) -> Expr {
        let s = Expr::sym("s");
        self.terms
            .iter()
            .map(|((k, m), c)| {
                let mut t = Expr::num(c.clone()) * s.powi(i64::from(*k));
                if !m.is_zero() {
                    t = t * (Expr::num(m.clone()) * &s).exp();
                }
                t
            })
            .sum()
    }

    /// Reads an expression built from rationals, `s` and `exp(c·s)`.
    pub fn from_expr(e: &Expr) -> Option<SExp> {
        let s = Expr::sym("s");
        let mut out = SExp::zero();
        for (mono, c) in Poly::of(e).terms {
            let mut k = 0u32;
            let mut m = Q::zero();
            for (atom, q) in mono {
                match atom.node() {
                    Node::Sym(name) if &**name == "s" && q.is_integer() && !q.is_negative() => {
                        k += u32::try_from(q.to_integer()).ok()?;
                    }
                    Node::Builtin(Builtin::Exp, arg) => m += arg.rational_multiple_of(&s)? * q,
                    _ => return None,
                }
            }
            out.add_term(c, k, m);
        }
        Some(out)
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_compact(&self.to_expr()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{q_frac, Context};

    #[test]
    fn roundtrip_through_expr() {
        let mut ctx = Context::point();
        ctx.declare_symbol("s");
        let e = ctx.parse("exp(-s) + s - 1 + s^2/2*exp(2*s)").unwrap();
        let v = SExp::from_expr(&e).unwrap();
        assert_eq!(v.to_expr(), e);
        assert_eq!(v.at_zero(), q_int(0));
        assert_eq!(v.derivative().at_zero(), q_int(0));
        assert_eq!(v.negate_s().negate_s(), v);
        assert_eq!(SExp::term(q_frac(1, 2), 0, q_int(1)).mul(&SExp::term(q_int(2), 0, q_int(-1))), SExp::one());
    }

    #[test]
    fn rejects_foreign_atoms() {
        let ctx = Context::point();
        assert!(SExp::from_expr(&ctx.parse("x*s").unwrap()).is_none());
    }
}
