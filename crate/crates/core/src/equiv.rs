//! Equivalence generators on the extended chart (t, x, u, f, g).

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::jetfield::{prolong1, Chart, JetError, VectorField};
use crate::liealg::{LieBasis, LieError};
use crate::symkernel::{
    collect_monomials, collect_powers, differentiate, render, render_compact, substitute, Bindings, Context, Expr,
    FunctionSymbol, SymError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquivError {
    #[error("{role} must not depend on {var}")]
    RoleViolation { role: &'static str, var: String },
    #[error("field is not on the (t, x, u, f, g) chart")]
    WrongChart,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// `ξ∂t + τ∂x + φ∂u + χ∂f + η∂g` with ξ, τ, φ independent of f and g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivField(VectorField);

const DERIVED_JETS: [&str; 6] = ["f_t", "f_x", "f_u", "g_t", "g_x", "g_u"];

impl EquivField {
    pub fn new(v: VectorField) -> Result<Self, EquivError> {
        if v.chart.coords != Chart::equivalence().coords {
            return Err(EquivError::WrongChart);
        }
        for (role, coord) in [("ξ", "t"), ("τ", "x"), ("φ", "u")] {
            let c = v.coeff(coord);
            for var in ["f", "g"].iter().chain(DERIVED_JETS.iter()).chain(crate::jetfield::JETS.iter()) {
                if c.contains_symbol(var) {
                    return Err(EquivError::RoleViolation { role, var: var.to_string() });
                }
            }
        }
        for (role, coord) in [("χ", "f"), ("η", "g")] {
            let c = v.coeff(coord);
            for var in DERIVED_JETS.iter().chain(crate::jetfield::JETS.iter()) {
                if c.contains_symbol(var) {
                    return Err(EquivError::RoleViolation { role, var: var.to_string() });
                }
            }
        }
        Ok(EquivField(v))
    }

    pub fn field(&self) -> &VectorField {
        &self.0
    }

    pub fn xi(&self) -> Expr {
        self.0.coeff("t")
    }

    pub fn tau(&self) -> Expr {
        self.0.coeff("x")
    }

    pub fn phi(&self) -> Expr {
        self.0.coeff("u")
    }

    pub fn chi(&self) -> Expr {
        self.0.coeff("f")
    }

    pub fn eta(&self) -> Expr {
        self.0.coeff("g")
    }

    /// Opaque ξ, τ, φ of (t,x,u) and χ, η of (t,x,u,f,g).
    pub fn generic() -> Self {
        let ctx = Context::equivalence();
        EquivField::from_roles(&ctx.call("xi"), &ctx.call("tau"), &ctx.call("phi"), &ctx.call("chi"), &ctx.call("eta"))
    }

    fn from_roles(xi: &Expr, tau: &Expr, phi: &Expr, chi: &Expr, eta: &Expr) -> Self {
        EquivField(VectorField::from_pairs(
            Chart::equivalence(),
            [("t", xi.clone()), ("x", tau.clone()), ("u", phi.clone()), ("f", chi.clone()), ("g", eta.clone())],
        ))
    }

    /// The general form after time-independence: τ, φ of (x,u), χ, η of (x,u,f,g).
    pub fn time_independent() -> Self {
        let ctx = time_independent_context();
        EquivField::from_roles(&ctx.call("xi"), &ctx.call("tau"), &ctx.call("phi"), &ctx.call("chi"), &ctx.call("eta"))
    }

    /// ξ(t,x,u), τ(x,u), φ(x,u) with χ and η given by the printed general solution.
    pub fn general_solution() -> Self {
        let ctx = time_independent_context();
        let (xi, tau, phi) = (ctx.call("xi"), ctx.call("tau"), ctx.call("phi"));
        let p = |s: &str| ctx.parse(s).expect("solution formula parses");
        let chi = p("g*phi_x - f*g*xi_x - f*xi_t + f*phi_u - f^2*xi_u");
        let eta = p("f*tau_u + g*tau_x - g*xi_t - g^2*xi_x - f*g*xi_u");
        EquivField::from_roles(&xi, &tau, &phi, &chi, &eta)
    }
}

/// Context with τ(x,u), φ(x,u), χ(x,u,f,g), η(x,u,f,g).
pub fn time_independent_context() -> Context {
    let mut ctx = Context::equivalence();
    ctx.declare_function(FunctionSymbol::opaque("tau", &["x", "u"]));
    ctx.declare_function(FunctionSymbol::opaque("phi", &["x", "u"]));
    ctx.declare_function(FunctionSymbol::opaque("chi", &["x", "u", "f", "g"]));
    ctx.declare_function(FunctionSymbol::opaque("eta", &["x", "u", "f", "g"]));
    ctx
}

#[derive(Clone, Debug)]
pub struct EquivProlongation {
    pub field: EquivField,
    pub phi_t: Expr,
    pub phi_x: Expr,
    /// Coefficient of ∂/∂f_t.
    pub chi_t: Expr,
    /// Coefficient of ∂/∂g_t.
    pub eta_t: Expr,
}

/// First prolongation where f and g are differential variables on (t,x,u) with `f_t = g_t = 0`,
/// so the total t-derivative acting on χ, η reduces to ∂/∂t.
pub fn equiv_prolong(y: &EquivField) -> Result<EquivProlongation, EquivError> {
    let (point, _) = y.0.restrict(&Chart::point());
    let pr = prolong1(&point)?;
    let dt = |e: &Expr| differentiate(e, "t");
    let (fx, fu, gx, gu) = (Expr::sym("f_x"), Expr::sym("f_u"), Expr::sym("g_x"), Expr::sym("g_u"));
    let chi_t = dt(&y.chi())? - &fx * dt(&y.tau())? - &fu * dt(&y.phi())?;
    let eta_t = dt(&y.eta())? - &gx * dt(&y.tau())? - &gu * dt(&y.phi())?;
    Ok(EquivProlongation {
        field: y.clone(),
        phi_t: pr.phi_t,
        phi_x: pr.phi_x,
        chi_t,
        eta_t,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub label: String,
    pub expr: Expr,
}

/// Split invariance conditions of the equation together with `f_t = g_t = 0`.
#[derive(Clone, Debug)]
pub struct EquivSystem {
    /// On-shell residual of the prolonged field applied to `u_t + g u_x - f`.
    pub residual: Expr,
    pub conditions: Vec<Condition>,
}

impl EquivSystem {
    pub fn is_satisfied(&self) -> bool {
        self.conditions.iter().all(|c| c.expr.is_zero())
    }

    /// The condition with this label; zero when the split produced none.
    pub fn get(&self, label: &str) -> Expr {
        self.conditions
            .iter()
            .find(|c| c.label == label)
            .map_or_else(Expr::zero, |c| c.expr.clone())
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.expr.is_zero())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "residual": render(&self.residual),
            "conditions": self.conditions.iter().map(|c| json!({"multiplies": c.label, "expr": render(&c.expr)})).collect::<Vec<_>>(),
            "satisfied": self.is_satisfied(),
        })
    }
}

fn split_into(out: &mut Vec<Condition>, prefix: &str, e: &Expr, atoms: &[&str]) -> Result<(), EquivError> {
    let atom_exprs: Vec<Expr> = atoms.iter().map(|a| Expr::sym(a)).collect();
    let parts: BTreeMap<Vec<u32>, Expr> = collect_monomials(e, &atom_exprs)?;
    for (k, c) in parts {
        let mono: Vec<String> = atoms
            .iter()
            .zip(&k)
            .filter(|(_, p)| **p > 0)
            .map(|(a, p)| if *p == 1 { a.to_string() } else { format!("{a}^{p}") })
            .collect();
        let label = if mono.is_empty() { format!("{prefix}: 1") } else { format!("{prefix}: {}", mono.join("*")) };
        out.push(Condition { label, expr: c });
    }
    Ok(())
}

/// Conditions from `Ỹ[u_t + g u_x - f] = 0` on shell, split by powers of u_x,
/// and from `Ỹ[f_t] = Ỹ[g_t] = 0`, split by the free first derivatives of f and g.
pub fn equiv_conditions(y: &EquivField) -> Result<EquivSystem, EquivError> {
    let pr = equiv_prolong(y)?;
    let (ux, ut) = (Expr::sym("u_x"), Expr::sym("u_t"));
    let raw = &pr.phi_t + &y.eta() * &ux + Expr::sym("g") * &pr.phi_x - y.chi();
    let mut onshell = Bindings::new();
    onshell.insert(ut, Expr::sym("f") - Expr::sym("g") * &ux);
    let residual = substitute(&raw, &onshell);
    let mut conditions = Vec::new();
    for (k, c) in collect_powers(&residual, "u_x")?.into_iter().rev() {
        conditions.push(Condition {
            label: format!("equation: u_x^{k}"),
            expr: c,
        });
    }
    split_into(&mut conditions, "f_t", &pr.chi_t, &["f_x", "f_u"])?;
    split_into(&mut conditions, "g_t", &pr.eta_t, &["g_x", "g_u"])?;
    Ok(EquivSystem { residual, conditions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YKind {
    Y1,
    Y2,
    Y3,
}

impl YKind {
    fn index(self) -> usize {
        match self {
            YKind::Y1 => 0,
            YKind::Y2 => 1,
            YKind::Y3 => 2,
        }
    }
}

/// `Y¹_ξ`, `Y²_τ` or `Y³_φ` for the given coefficient function.
pub fn build_y(kind: YKind, coefficient: &Expr) -> Result<EquivField, EquivError> {
    EquivField::new(LieBasis::equiv().member(kind.index(), coefficient))
}

pub fn l10_basis() -> LieBasis {
    LieBasis::l10()
}

/// Coefficients (ξ, τ, φ) when `v` is `Y¹_ξ + Y²_τ + Y³_φ`.
pub fn as_y_combination(v: &VectorField) -> Result<Option<Vec<Expr>>, EquivError> {
    let cell = LieBasis::equiv().decompose(v)?;
    Ok(cell.closed().then_some(cell.coeffs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionTarget {
    /// (x, u, f, g).
    Fiber,
    /// (t, x, u).
    Point,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub field: VectorField,
    /// Non-zero coefficients dropped by the projection.
    pub dropped: BTreeMap<String, Expr>,
}

impl Projection {
    pub fn to_json(&self) -> Value {
        json!({
            "field": render_field(&self.field),
            "dropped": self.dropped.iter().map(|(k, v)| (k.clone(), Value::String(render_compact(v)))).collect::<serde_json::Map<_, _>>(),
        })
    }
}

fn render_field(v: &VectorField) -> String {
    if v.is_zero() {
        "0".into()
    } else {
        v.to_string()
    }
}

pub fn project(v: &VectorField, target: ProjectionTarget) -> Projection {
    let chart = match target {
        ProjectionTarget::Fiber => Chart::fiber(),
        ProjectionTarget::Point => Chart::point(),
    };
    let (field, dropped) = v.restrict(&chart);
    Projection { field, dropped }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn role_constraints() {
        let bad = VectorField::from_pairs(Chart::equivalence(), [("t", Expr::sym("f"))]);
        assert!(matches!(EquivField::new(bad), Err(EquivError::RoleViolation { role: "ξ", .. })));
        let ok = VectorField::from_pairs(Chart::equivalence(), [("g", Expr::sym("f"))]);
        assert!(EquivField::new(ok).is_ok());
    }

    #[test]
    fn time_translation_prolongs_to_zero() {
        let y = EquivField::new(VectorField::partial(Chart::equivalence(), "t")).unwrap();
        let pr = equiv_prolong(&y).unwrap();
        assert!(pr.phi_t.is_zero() && pr.phi_x.is_zero() && pr.chi_t.is_zero() && pr.eta_t.is_zero());
        assert!(equiv_conditions(&y).unwrap().is_satisfied());
    }

    #[test]
    fn generic_chi_t() {
        let pr = equiv_prolong(&EquivField::generic()).unwrap();
        let ctx = Context::equivalence();
        assert_eq!(pr.chi_t, ctx.parse("chi_t - f_x*tau_t - f_u*phi_t").unwrap());
    }

    #[test]
    fn projection_records_dropped() {
        let b = l10_basis();
        let p = project(&b.fields[4], ProjectionTarget::Fiber);
        assert_eq!(p.dropped.get("t"), Some(&Expr::sym("x")));
        assert!(project(&b.fields[0], ProjectionTarget::Fiber).field.is_zero());
    }
}
