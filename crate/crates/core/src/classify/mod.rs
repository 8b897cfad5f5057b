//! Optimal system of one-dimensional subalgebras, replay of the adjoint
//! reductions, projected operators and the classification table.

mod integrate;
mod invariants;
mod reduction;
mod rows;

use serde_json::{json, Value};

use crate::equiv::{project, ProjectionTarget};
use crate::jetfield::{Chart, JetError, VectorField};
use crate::liealg::{render_combination, LieBasis, LieError};
use crate::paperdata;
use crate::symkernel::{differentiate, render_compact, substitute, Bindings, Context, Equality, Expr, SymError};

pub use invariants::{invariants, non_solvable, solve_for, verify_invariant, InvariantSet};
pub use reduction::{reduction_scripts, replay_reduction, ReductionScript, Replay, Step, StepRecord};
pub use reduction::{apply_step, Target};
pub use rows::{
    classification_rows, construct_row, corrected_forms, recheck, row_markdown, table5_report, table5_report_with,
    verify_row, verify_row_with, ClassificationRow, Constructed, Correction, NumericInvariance, RowReport, RowStatus,
    SignCheck, Table5Report,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error("unknown entry `{0}`")]
    Unknown(String),
    #[error("adjoint entry ({0}, {1}) is not in closed form")]
    NotClosed(String, String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// One representative `A^i` of the optimal system.
#[derive(Clone, Debug)]
pub struct OptimalEntry {
    pub name: String,
    pub source: String,
    /// Coefficients over X1..X10.
    pub coeffs: Vec<Expr>,
}

impl OptimalEntry {
    pub fn parameters(&self) -> Vec<String> {
        let mut out: Vec<String> = self.coeffs.iter().flat_map(|c| c.free_symbols()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn field(&self, basis: &LieBasis) -> Result<VectorField, ClassifyError> {
        Ok(basis.combine(&self.coeffs)?)
    }

    pub fn with(&self, set: &Bindings) -> OptimalEntry {
        OptimalEntry {
            name: self.name.clone(),
            source: self.source.clone(),
            coeffs: self.coeffs.iter().map(|c| substitute(c, set)).collect(),
        }
    }

    /// Projection to (x, u, f, g).
    pub fn fiber_projection(&self, basis: &LieBasis) -> Result<VectorField, ClassifyError> {
        Ok(project(&self.field(basis)?, ProjectionTarget::Fiber).field)
    }

    /// Projection to (t, x, u).
    pub fn point_projection(&self, basis: &LieBasis) -> Result<VectorField, ClassifyError> {
        Ok(project(&self.field(basis)?, ProjectionTarget::Point).field)
    }

    pub fn to_json(&self, basis: &LieBasis) -> Value {
        json!({
            "name": self.name,
            "expr": render_combination(basis, &self.coeffs),
            "parameters": self.parameters(),
        })
    }
}

fn load(name: &str) -> Value {
    paperdata::document(name).expect("bundled document exists")
}

fn str_of<'a>(v: &'a Value, key: &str) -> Result<&'a str, ClassifyError> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| ClassifyError::Malformed(format!("missing string `{key}`")))
}

fn array_of<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, ClassifyError> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| ClassifyError::Malformed(format!("missing array `{key}`")))
}

/// Coefficients of an expression linear in the basis names.
pub(crate) fn linear_in(e: &Expr, names: &[String]) -> Result<Vec<Expr>, ClassifyError> {
    let coeffs: Vec<Expr> = names.iter().map(|n| differentiate(e, n)).collect::<Result<_, _>>()?;
    let rebuilt: Expr = coeffs.iter().zip(names).map(|(c, n)| c * Expr::sym(n)).sum();
    if coeffs.iter().any(|c| names.iter().any(|n| c.contains_symbol(n))) || rebuilt != *e {
        return Err(ClassifyError::Malformed(format!("`{}` is not linear in the basis", render_compact(e))));
    }
    Ok(coeffs)
}

/// The twenty entries as printed.
pub fn optimal_system() -> Vec<OptimalEntry> {
    let basis = LieBasis::l10();
    parse_optimal(&load("optimal"), &basis).expect("bundled optimal system parses")
}

fn parse_optimal(doc: &Value, basis: &LieBasis) -> Result<Vec<OptimalEntry>, ClassifyError> {
    array_of(doc, "entries")?
        .iter()
        .map(|e| {
            let source = str_of(e, "expr")?.to_string();
            let coeffs = linear_in(&basis.context().parse(&source)?, &basis.names)?;
            Ok(OptimalEntry {
                name: str_of(e, "name")?.to_string(),
                source,
                coeffs,
            })
        })
        .collect()
}

pub fn optimal_entry(name: &str) -> Result<OptimalEntry, ClassifyError> {
    optimal_system()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| ClassifyError::Unknown(name.to_string()))
}

/// A printed projected operator with the entries it is claimed to project.
#[derive(Clone, Debug)]
pub struct ZEntry {
    pub name: String,
    pub sources: Vec<String>,
    pub printed: VectorField,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZAgreement {
    Exact,
    /// Equal up to a nonzero constant factor.
    Proportional,
    Differs,
}

pub fn z_list() -> Vec<ZEntry> {
    let ctx = Context::fiber();
    let doc = load("zlist");
    array_of(&doc, "entries")
        .and_then(|entries| {
            entries
                .iter()
                .map(|e| {
                    let printed = fiber_field(
                        e.get("field").ok_or_else(|| ClassifyError::Malformed("missing field".into()))?,
                        &ctx,
                    )?;
                    let sources = array_of(e, "sources")?
                        .iter()
                        .filter_map(|s| s.as_str().map(str::to_string))
                        .collect();
                    Ok(ZEntry {
                        name: str_of(e, "name")?.to_string(),
                        sources,
                        printed,
                    })
                })
                .collect()
        })
        .expect("bundled Z list parses")
}

pub fn z_entry(name: &str) -> Result<ZEntry, ClassifyError> {
    z_list()
        .into_iter()
        .find(|z| z.name == name)
        .ok_or_else(|| ClassifyError::Unknown(name.to_string()))
}

/// `{"x": "...", "f": "..."}` on the fiber chart.
pub(crate) fn fiber_field(v: &Value, ctx: &Context) -> Result<VectorField, ClassifyError> {
    field_on(Chart::fiber(), v, ctx)
}

pub(crate) fn field_on(chart: Chart, v: &Value, ctx: &Context) -> Result<VectorField, ClassifyError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ClassifyError::Malformed("a field must be an object".into()))?;
    let mut out = VectorField::zero(chart.clone());
    for (k, e) in obj {
        if !chart.contains(k) {
            return Err(ClassifyError::Malformed(format!("coordinate `{k}` is not on the {chart} chart")));
        }
        let text = e
            .as_str()
            .ok_or_else(|| ClassifyError::Malformed(format!("coefficient of {k} must be a string")))?;
        out.set(k, ctx.parse(text)?);
    }
    Ok(out)
}

/// Compares two fields on the same chart coefficientwise, allowing a constant factor.
pub fn agreement(computed: &VectorField, printed: &VectorField) -> ZAgreement {
    let diff = computed.sub(printed).map(|d| d.is_zero()).unwrap_or(false);
    if diff {
        return ZAgreement::Exact;
    }
    let coords: Vec<&String> = computed.coeffs().keys().chain(printed.coeffs().keys()).collect();
    let mut ratio: Option<Expr> = None;
    for c in coords {
        let (a, b) = (computed.coeff(c), printed.coeff(c));
        if a.is_zero() != b.is_zero() {
            return ZAgreement::Differs;
        }
        if a.is_zero() {
            continue;
        }
        let r = &a / &b;
        if r.free_symbols().iter().any(|s| ["x", "u", "f", "g", "t"].contains(&s.as_str())) {
            return ZAgreement::Differs;
        }
        match &ratio {
            None => ratio = Some(r),
            Some(prev) if crate::symkernel::equals(prev, &r) == Equality::ProvenEqual => {}
            Some(_) => return ZAgreement::Differs,
        }
    }
    ZAgreement::Proportional
}

/// Printed `Z^i` against the fiber projection of each claimed source.
#[derive(Clone, Debug)]
pub struct ZComparison {
    pub name: String,
    pub source: String,
    pub computed: VectorField,
    pub printed: VectorField,
    pub agreement: ZAgreement,
}

impl ZComparison {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "source": self.source,
            "computed": render_field(&self.computed),
            "printed": render_field(&self.printed),
            "agreement": self.agreement,
        })
    }
}

pub(crate) fn render_field(v: &VectorField) -> String {
    if v.is_zero() {
        "0".into()
    } else {
        v.to_string()
    }
}

pub fn compare_z_list() -> Result<Vec<ZComparison>, ClassifyError> {
    let basis = LieBasis::l10();
    let mut out = Vec::new();
    for z in z_list() {
        for src in &z.sources {
            let computed = optimal_entry(src)?.fiber_projection(&basis)?;
            out.push(ZComparison {
                name: z.name.clone(),
                source: src.clone(),
                agreement: agreement(&computed, &z.printed),
                computed,
                printed: z.printed.clone(),
            });
        }
    }
    Ok(out)
}
