//! Finite-difference validation of symbolic derivatives over a fixed corpus.

use serde::Serialize;
use serde_json::{json, Value};

use super::{fd_check, random_binding};
use crate::symkernel::{Context, SymError};

/// Expressions on the point chart exercising every differentiation rule.
pub const DERIVATIVE_CORPUS: [&str; 8] = [
    "u^2*x - 3*u_x*g(x,u)",
    "f(x,u)*g(x,u)",
    "exp(x*u)/(1 + u^2)",
    "g_xu(x,u)^2 - ln(2 + x^2)",
    "(3 + x^2 + u^2)^(1/2)*f(x,u)",
    "Phi(x*u) + Psi(u - x)^2",
    "1/(4 - f(x,u)^2/10)",
    "t*f(x,u) - x*exp(-u)*g(x,u)",
];

#[derive(Clone, Debug, Serialize)]
pub struct FdEntry {
    pub expr: String,
    pub var: String,
    pub checked: usize,
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdReport {
    pub tol: f64,
    pub entries: Vec<FdEntry>,
}

impl FdReport {
    pub fn max_error(&self) -> f64 {
        self.entries.iter().map(|e| e.max_error).fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.checked > 0 && e.max_error < self.tol)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tol": self.tol,
            "pass": self.pass(),
            "max_error": self.max_error(),
            "entries": self.entries,
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| expression | d/d | points | max relative error |\n|---|---|---|---|\n");
        for e in &self.entries {
            s.push_str(&format!("| `{}` | {} | {} | {:.2e} |\n", e.expr, e.var, e.checked, e.max_error));
        }
        s
    }
}

/// Checks d/dx, d/du and d/du_x of each expression at `points` seeded bindings,
/// skipping bindings that land on a singularity.
pub fn fd_corpus(exprs: &[&str], points: usize, seed: u64, tol: f64) -> Result<FdReport, SymError> {
    let ctx = Context::point();
    let mut entries = Vec::new();
    for text in exprs {
        let e = ctx.parse(text)?;
        for var in ["x", "u", "u_x"] {
            let mut checked = 0;
            let mut max_error = 0.0f64;
            for k in 0..(2 * points as u64) {
                if checked == points {
                    break;
                }
                let b = random_binding(&[&e], seed.wrapping_add(k));
                if let Ok(err) = fd_check(&e, var, &b) {
                    max_error = max_error.max(err);
                    checked += 1;
                }
            }
            entries.push(FdEntry {
                expr: (*text).to_string(),
                var: var.to_string(),
                checked,
                max_error,
            });
        }
    }
    Ok(FdReport { tol, entries })
}
