use super::eval::{eval, eval_scoped, Binding};
use super::NumError;
use crate::symkernel::{differentiate, Expr};

/// `∂e/∂var` at `b`: symbolic when available, else a Richardson central difference.
pub fn partial_value(e: &Expr, var: &str, b: &Binding) -> Result<f64, NumError> {
    if !e.contains_symbol(var) {
        return Ok(0.0);
    }
    if let Ok(d) = differentiate(e, var) {
        return eval(&d, b);
    }
    let x0 = b.get(var).ok_or_else(|| NumError::Unbound(var.to_string()))?;
    let at = |x: f64| eval_scoped(e, b, &[(var, x)]);
    let central = |h: f64| -> Result<f64, NumError> { Ok((at(x0 + h)? - at(x0 - h)?) / (2.0 * h)) };
    let h = 1e-4;
    Ok((4.0 * central(h / 2.0)? - central(h)?) / 3.0)
}

/// Invariance residual of `xi ∂t + tau ∂x + phi ∂u` for `u_t + g u_x = f`,
/// evaluated directly from the first-prolongation formulas at an on-shell binding.
pub fn numeric_residual(f: &Expr, g: &Expr, xi: &Expr, tau: &Expr, phi: &Expr, b: &Binding) -> Result<f64, NumError> {
    let d = |e: &Expr, v: &str| partial_value(e, v, b);
    let (ut, ux) = (
        b.get("u_t").ok_or_else(|| NumError::Unbound("u_t".into()))?,
        b.get("u_x").ok_or_else(|| NumError::Unbound("u_x".into()))?,
    );
    let (xv, tv, pv) = (eval(xi, b)?, eval(tau, b)?, eval(phi, b)?);
    let gv = eval(g, b)?;
    let phi_t = d(phi, "t")? + d(phi, "u")? * ut - ux * (d(tau, "t")? + d(tau, "u")? * ut) - ut * (d(xi, "t")? + d(xi, "u")? * ut);
    let phi_x = d(phi, "x")? + d(phi, "u")? * ux - ut * (d(xi, "x")? + d(xi, "u")? * ux) - ux * (d(tau, "x")? + d(tau, "u")? * ux);
    let eq_x = d(g, "x")? * ux - d(f, "x")?;
    let eq_u = d(g, "u")? * ux - d(f, "u")?;
    let eq_t = d(g, "t")? * ux - d(f, "t")?;
    Ok(xv * eq_t + tv * eq_x + pv * eq_u + phi_t + gv * phi_x)
}
