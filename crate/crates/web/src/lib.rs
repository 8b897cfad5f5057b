//! Browser bindings: symmetry checks, adjoint entries and classification rows.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use nib_symmetry::classify::{classification_rows, verify_row};
use nib_symmetry::detsys::{verify_candidate, EquationSpec};
use nib_symmetry::jetfield::VectorField;
use nib_symmetry::liealg::{adjoint_table, commutator_table, LieBasis};
use nib_symmetry::symkernel::{render_compact, Context};

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("{0}")]
    Input(String),
    #[error("no basis element named {0}")]
    UnknownGenerator(String),
    #[error("no classification row {0}")]
    UnknownRow(u32),
}

fn input(e: impl ToString) -> DemoError {
    DemoError::Input(e.to_string())
}

/// Checks `vf` (vector field JSON) against u_t + g u_x = f.
pub fn check_generator(f: &str, g: &str, vf: &str) -> Result<Value, DemoError> {
    let ctx = Context::point();
    let spec = EquationSpec::new(ctx.parse(f).map_err(input)?, ctx.parse(g).map_err(input)?).map_err(input)?;
    let v: Value = serde_json::from_str(vf).map_err(input)?;
    let field = VectorField::from_json(&v, &ctx).map_err(input)?;
    let result = verify_candidate(&spec, &field);
    Ok(json!({
        "field": field.to_string(),
        "verdict": result.verdict.as_str(),
        "residual": result.residual.as_ref().map(render_compact),
        "numeric_max": result.numeric_max,
    }))
}

/// `Ad(exp(s X_acting)) X_target` in the ten-dimensional algebra.
pub fn adjoint_cell(acting: &str, target: &str) -> Result<Value, DemoError> {
    let basis = LieBasis::l10();
    let find = |name: &str| basis.index(name).ok_or_else(|| DemoError::UnknownGenerator(name.to_string()));
    let (i, j) = (find(acting)?, find(target)?);
    let table = adjoint_table(&commutator_table(&basis).map_err(input)?).map_err(input)?;
    let checks = table.checks(i, j);
    Ok(json!({
        "acting": acting,
        "target": target,
        "value": table.render_cell(i, j),
        "checks_pass": checks.all(),
    }))
}

pub fn classification_row(n: u32) -> Result<Value, DemoError> {
    let row = classification_rows()
        .into_iter()
        .find(|r| r.row == n)
        .ok_or(DemoError::UnknownRow(n))?;
    Ok(verify_row(&row).map_err(input)?.to_json())
}

fn to_js(r: Result<Value, DemoError>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn verify_generator(f: &str, g: &str, vf_json: &str) -> Result<String, JsError> {
    to_js(check_generator(f, g, vf_json))
}

#[wasm_bindgen]
pub fn adjoint_entry(acting: &str, target: &str) -> Result<String, JsError> {
    to_js(adjoint_cell(acting, target))
}

#[wasm_bindgen]
pub fn table5_row(n: u32) -> Result<String, JsError> {
    to_js(classification_row(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_in_x() {
        let v = check_generator("Phi(u)", "Psi(u)", r#"{"x":"1"}"#).unwrap();
        assert_eq!(v["verdict"], "proven-symmetry");
    }

    #[test]
    fn bad_field_is_an_error() {
        assert!(check_generator("Phi(u)", "Psi(u)", "{").is_err());
        assert!(check_generator("Phi(", "Psi(u)", r#"{"x":"1"}"#).is_err());
    }

    #[test]
    fn adjoint_lookup() {
        let v = adjoint_cell("X1", "X1").unwrap();
        assert_eq!(v["value"], "X1");
        assert_eq!(v["checks_pass"], true);
        assert!(matches!(adjoint_cell("X11", "X1"), Err(DemoError::UnknownGenerator(_))));
    }

    #[test]
    fn row_lookup() {
        assert_eq!(classification_row(1).unwrap()["status"], "pass");
        assert!(matches!(classification_row(99), Err(DemoError::UnknownRow(99))));
    }
}
