//! First integrals of projected operators on (x, u, f, g).

use serde_json::{json, Value};

use super::integrate::{integrate, Antiderivative};
use super::ClassifyError;
use crate::jetfield::VectorField;
use crate::symkernel::{differentiate, render_compact, substitute, zero_test, Bindings, Builtin, Expr, Node, ZeroTest};

/// Invariants split into those on the base (x, u) and those involving f or g.
#[derive(Clone, Debug)]
pub struct InvariantSet {
    pub base: Vec<Expr>,
    pub fiber: Vec<Expr>,
    /// Notes on characteristic equations the solver could not integrate.
    pub gaps: Vec<String>,
}

impl InvariantSet {
    pub fn all(&self) -> Vec<Expr> {
        self.base.iter().chain(&self.fiber).cloned().collect()
    }

    /// Three functionally independent invariants were found.
    pub fn complete(&self) -> bool {
        self.base.len() + self.fiber.len() >= 3
    }

    /// The base invariant when it is unique.
    pub fn lambda(&self) -> Option<&Expr> {
        match self.base.as_slice() {
            [l] => Some(l),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.iter().map(render_compact).collect::<Vec<_>>(),
            "fiber": self.fiber.iter().map(render_compact).collect::<Vec<_>>(),
            "complete": self.complete(),
            "gaps": self.gaps,
        })
    }
}

/// True iff `Z(I)` normalizes to zero.
pub fn verify_invariant(z: &VectorField, invariant: &Expr) -> Result<bool, ClassifyError> {
    Ok(zero_test(&z.apply(invariant)?) == ZeroTest::Zero)
}

/// Flags operators whose invariants contain both x and u, so that f and g
/// cannot be written as functions of a single base invariant.
pub fn non_solvable(z: &VectorField) -> bool {
    !z.is_zero() && z.coeff("x").is_zero() && z.coeff("u").is_zero()
}

fn ratio_integral(e: &Expr, var: &str) -> Option<Antiderivative> {
    integrate(e, var)
}

/// A base invariant of `a∂x + b∂u` and a flow parameter σ with `Z(σ) = 1`.
fn base_part(a: &Expr, b: &Expr, gaps: &mut Vec<String>) -> (Vec<Expr>, Option<Expr>) {
    let (x, u) = (Expr::sym("x"), Expr::sym("u"));
    match (a.is_zero(), b.is_zero()) {
        (true, true) => (vec![x, u], None),
        (true, false) => (vec![x], ratio_integral(&b.recip(), "u").map(|i| i.to_expr())),
        (false, true) => (vec![u], ratio_integral(&a.recip(), "x").map(|i| i.to_expr())),
        (false, false) => {
            let r = b / a;
            let lambda = if !r.depends_on("u") {
                ratio_integral(&r, "x").map(|i| &u - &i.to_expr())
            } else if !r.depends_on("x") {
                ratio_integral(&r.recip(), "u").map(|i| &i.to_expr() - &x)
            } else if !a.depends_on("x") && !b.depends_on("u") {
                match (ratio_integral(b, "x"), ratio_integral(a, "u")) {
                    (Some(p), Some(q)) => Some(&p.to_expr() - &q.to_expr()),
                    _ => None,
                }
            } else {
                None
            };
            let sigma = if !a.depends_on("u") {
                ratio_integral(&a.recip(), "x").map(|i| i.to_expr())
            } else if !b.depends_on("x") {
                ratio_integral(&b.recip(), "u").map(|i| i.to_expr())
            } else {
                None
            };
            if lambda.is_none() {
                gaps.push(format!(
                    "dx/({}) = du/({}) is outside the quadrature rules",
                    render_compact(a),
                    render_compact(b)
                ));
            }
            (lambda.into_iter().collect(), sigma)
        }
    }
}

/// First integral of the first fiber variable, whose component depends on it alone.
fn leading(y: &str, cy: &Expr, sigma: Option<&Expr>) -> Option<Expr> {
    if cy.is_zero() {
        return Some(Expr::sym(y));
    }
    let sigma = sigma?;
    let a = integrate(&cy.recip(), y)?;
    Some(if a.logs.is_empty() {
        &a.rational - sigma
    } else {
        a.exponential() * (-sigma).exp()
    })
}

/// First integral of the second fiber variable given the first.
fn trailing(y: &str, cy: &Expr, z: &str, cz: &Expr, sigma: Option<&Expr>) -> Option<Expr> {
    let zs = Expr::sym(z);
    let p = differentiate(cz, z).ok()?;
    if p.depends_on(z) {
        let k = cz / &zs.powi(2);
        if cy.is_zero() && !k.depends_on(z) {
            return Some(&zs.recip() + &(&k * sigma?));
        }
        return None;
    }
    let q = cz - &(&p * &zs);
    if cy.is_zero() {
        let sigma = sigma?;
        return Some(if p.is_zero() {
            &zs - &(&q * sigma)
        } else {
            (&zs + &(&q / &p)) * (-(&p * sigma)).exp()
        });
    }
    let mu = if p.is_zero() {
        Expr::one()
    } else {
        integrate(&(-(&p / cy)), y)?.exponential()
    };
    let shift = if q.is_zero() {
        Expr::zero()
    } else {
        integrate(&(&q * &mu / cy), y)?.to_expr()
    };
    Some(&zs * &mu - &shift)
}

/// Quadratic first integral of a trace-free linear system `(f, g)' = M (f, g)`.
fn linear_pair(c: &Expr, d: &Expr) -> Option<Expr> {
    let m = |e: &Expr, v: &str| differentiate(e, v).ok();
    let (m11, m12, m21, m22) = (m(c, "f")?, m(c, "g")?, m(d, "f")?, m(d, "g")?);
    let constant = |e: &Expr| !e.depends_on("f") && !e.depends_on("g");
    if ![&m11, &m12, &m21, &m22].into_iter().all(constant) || !(&m11 + &m22).is_zero() {
        return None;
    }
    let (f, g) = (Expr::sym("f"), Expr::sym("g"));
    let rebuilt = (&m11 * &f + &m12 * &g - c, &m21 * &f + &m22 * &g - d);
    if !rebuilt.0.is_zero() || !rebuilt.1.is_zero() {
        return None;
    }
    Some(&m21 * &f.powi(2) - Expr::int(2) * &m11 * &f * &g - &m12 * &g.powi(2))
}

/// Invariants of a projected operator by quadrature along its triangular
/// characteristic system; every returned invariant is verified.
pub fn invariants(z: &VectorField) -> Result<InvariantSet, ClassifyError> {
    let (a, b, c, d) = (z.coeff("x"), z.coeff("u"), z.coeff("f"), z.coeff("g"));
    for (name, e) in [("x", &a), ("u", &b)] {
        if e.depends_on("f") || e.depends_on("g") {
            return Err(ClassifyError::Unsupported(format!("the {name}-component depends on f or g")));
        }
    }
    let mut gaps = Vec::new();
    let (base, sigma) = base_part(&a, &b, &mut gaps);
    let mut fiber = Vec::new();
    let on_base = |e: &Expr| e.depends_on("x") || e.depends_on("u");
    if on_base(&c) || on_base(&d) {
        gaps.push("fiber components depend on x or u".into());
    } else {
        let order = if !c.depends_on("g") {
            Some(("f", &c, "g", &d))
        } else if !d.depends_on("f") {
            Some(("g", &d, "f", &c))
        } else {
            None
        };
        match order {
            Some((y, cy, w, cw)) => {
                match leading(y, cy, sigma.as_ref()) {
                    Some(j) => fiber.push(j),
                    None => gaps.push(format!("d{y}/({}) needs a flow parameter", render_compact(cy))),
                }
                match trailing(y, cy, w, cw, sigma.as_ref()) {
                    Some(j) => fiber.push(j),
                    None => gaps.push(format!("d{w}/({}) is outside the quadrature rules", render_compact(cw))),
                }
            }
            None => match linear_pair(&c, &d) {
                Some(j) => {
                    fiber.push(j);
                    gaps.push("coupled fiber system: one quadratic first integral only".into());
                }
                None => gaps.push("coupled nonlinear fiber system".into()),
            },
        }
    }
    let mut keep = |list: Vec<Expr>| -> Result<Vec<Expr>, ClassifyError> {
        let mut out = Vec::new();
        for j in list {
            if verify_invariant(z, &j)? {
                out.push(j);
            } else {
                gaps.push(format!("candidate {} failed verification", render_compact(&j)));
            }
        }
        Ok(out)
    };
    let base = keep(base)?;
    let fiber = keep(fiber)?;
    Ok(InvariantSet { base, fiber, gaps })
}

/// Solves `J(var) = target` when J is affine in var or 1/var (possibly after
/// inverting both sides), or a power of var times a var-free factor.
pub fn solve_for(j: &Expr, var: &str, target: &Expr) -> Option<Expr> {
    if let Node::Builtin(Builtin::Exp, arg) = j.node() {
        if let Some(v) = solve_direct(arg, var, target) {
            return Some(v);
        }
    }
    solve_direct(j, var, target).or_else(|| {
        let log = j.ln();
        if j.contains_builtin(Builtin::Exp) && !log.contains_builtin(Builtin::Exp) {
            solve_direct(&log, var, target)
        } else {
            None
        }
    })
}

fn solve_direct(j: &Expr, var: &str, target: &Expr) -> Option<Expr> {
    let w = Expr::sym("w");
    let y = Expr::sym(var);
    for (lhs, rhs) in [(j.clone(), target.clone()), (j.recip(), target.recip())] {
        for inverted in [false, true] {
            let mut b = Bindings::new();
            b.insert(y.clone(), if inverted { w.recip() } else { w.clone() });
            let sub = substitute(&lhs, &b);
            let k = differentiate(&sub, "w").ok()?;
            if k.is_zero() || k.depends_on("w") {
                continue;
            }
            let rest = &sub - &(&k * &w);
            if rest.depends_on("w") {
                continue;
            }
            let value = (&rhs - &rest) / &k;
            return Some(if inverted { value.recip() } else { value });
        }
    }
    let k = &y * &differentiate(j, var).ok()? / j;
    if k.is_zero() || k.depends_on(var) {
        return None;
    }
    let factor = j / &y.pow_expr(&k);
    if factor.depends_on(var) {
        return None;
    }
    Some((target / &factor).pow_expr(&k.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetfield::Chart;
    use crate::symkernel::Context;

    fn z(pairs: &[(&str, &str)]) -> VectorField {
        let ctx = Context::fiber();
        VectorField::from_pairs(Chart::fiber(), pairs.iter().map(|(c, e)| (*c, ctx.parse(e).unwrap())))
    }

    #[test]
    fn scaling_operator() {
        let set = invariants(&z(&[("u", "u"), ("g", "-g")])).unwrap();
        assert_eq!(set.base, vec![Expr::sym("x")]);
        assert!(set.complete(), "{set:?}");
    }

    #[test]
    fn logistic_fiber() {
        let set = invariants(&z(&[("u", "u"), ("f", "f - gamma1*f^2"), ("g", "-gamma1*f*g")])).unwrap();
        assert!(set.complete(), "{set:?}");
    }

    #[test]
    fn solves_affine_and_reciprocal_forms() {
        let ctx = Context::fiber();
        let t = Expr::sym("T");
        let j = ctx.parse("1/(gamma3*f) - ln(x)").unwrap();
        let f = solve_for(&j, "f", &t).unwrap();
        let mut b = Bindings::new();
        b.insert(Expr::sym("f"), f);
        assert_eq!(zero_test(&(substitute(&j, &b) - &t)), ZeroTest::Zero);
    }
}
