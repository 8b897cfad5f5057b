//! Construction and verification of the classification table.

use serde::Serialize;
use serde_json::{json, Value};

use super::invariants::{invariants, solve_for, verify_invariant, InvariantSet};
use super::{
    agreement, array_of, compare_z_list, field_on, load, optimal_entry, render_field, str_of, z_entry, ClassifyError,
    ZAgreement, ZComparison,
};
use crate::detsys::{verify_candidate_with, EquationSpec, NumericOptions, Verdict, Verification};
use crate::jetfield::{Chart, VectorField};
use crate::liealg::LieBasis;
use crate::numcheck::{partial_value, random_binding};
use crate::symkernel::{render_compact, substitute, zero_test, Bindings, Builtin, Context, Expr, ZeroTest};

/// One printed row: forms use bare `Phi`, `Psi` for `Φ(λ)`, `Ψ(λ)` and `pm` for ±.
#[derive(Clone, Debug)]
pub struct ClassificationRow {
    pub row: u32,
    pub z: String,
    /// Parameters fixed by the row's condition.
    pub set: Vec<(String, String)>,
    /// Parameters assumed nonzero.
    pub nonzero: Vec<String>,
    pub lambda: String,
    pub f: String,
    pub g: String,
    pub x2: Vec<Value>,
}

impl ClassificationRow {
    fn from_json(v: &Value) -> Result<Self, ClassifyError> {
        let strings = |key: &str| -> Result<Vec<String>, ClassifyError> {
            Ok(array_of(v, key)?
                .iter()
                .filter_map(|s| s.as_str().map(str::to_string))
                .collect())
        };
        let set = v
            .get("set")
            .and_then(Value::as_object)
            .ok_or_else(|| ClassifyError::Malformed("missing `set`".into()))?
            .iter()
            .map(|(k, e)| (k.clone(), e.as_str().unwrap_or_default().to_string()))
            .collect();
        Ok(ClassificationRow {
            row: v
                .get("row")
                .and_then(Value::as_u64)
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| ClassifyError::Malformed("missing `row`".into()))?,
            z: str_of(v, "z")?.to_string(),
            set,
            nonzero: strings("nonzero")?,
            lambda: str_of(v, "lambda")?.to_string(),
            f: str_of(v, "f")?.to_string(),
            g: str_of(v, "g")?.to_string(),
            x2: array_of(v, "x2")?.clone(),
        })
    }

    /// `Z^14(γ3 = 0)`-style label.
    pub fn label(&self) -> String {
        let mut conds: Vec<String> = self.set.iter().map(|(k, v)| format!("{k}={v}")).collect();
        conds.extend(self.nonzero.iter().map(|k| format!("{k}!=0")));
        if conds.is_empty() {
            self.z.clone()
        } else {
            format!("{}({})", self.z, conds.join(", "))
        }
    }

    /// Signs to try: both when a ± is printed.
    pub fn signs(&self) -> Vec<i64> {
        let has_pm = [&self.lambda, &self.f, &self.g]
            .iter()
            .any(|s| s.split(|c: char| !c.is_alphanumeric()).any(|w| w == "pm"));
        if has_pm {
            vec![1, -1]
        } else {
            vec![1]
        }
    }

    fn bindings(&self, ctx: &Context, sign: i64) -> Result<Bindings, ClassifyError> {
        let mut b = Bindings::new();
        for (k, v) in &self.set {
            b.insert(Expr::sym(k), ctx.parse(v)?);
        }
        b.insert(Expr::sym("pm"), Expr::int(sign));
        Ok(b)
    }

    fn source(&self) -> Result<String, ClassifyError> {
        z_entry(&self.z)?
            .sources
            .first()
            .cloned()
            .ok_or_else(|| ClassifyError::Malformed(format!("{} has no source", self.z)))
    }
}

pub fn classification_rows() -> Vec<ClassificationRow> {
    let doc = load("table5");
    array_of(&doc, "rows")
        .and_then(|rows| rows.iter().map(ClassificationRow::from_json).collect())
        .expect("bundled table parses")
}

fn row_context() -> Context {
    let mut ctx = Context::fiber();
    ctx.declare_symbols(&["Phi", "Psi"]);
    ctx
}

fn arbitrary(name: &str, lambda: &Expr) -> Expr {
    let f = Context::fiber()
        .function(name)
        .cloned()
        .expect("fiber context declares Phi and Psi");
    Expr::apply(&f, vec![0], vec![lambda.clone()])
}

/// A row instantiated for one sign, with its invariance checks under the computed operator.
#[derive(Clone, Debug)]
pub struct Constructed {
    pub row: u32,
    pub sign: i64,
    pub lambda: Expr,
    pub spec: EquationSpec,
    pub z: VectorField,
    pub lambda_invariant: Option<ZeroTest>,
    pub f_invariant: Option<ZeroTest>,
    pub g_invariant: Option<ZeroTest>,
}

fn surface_test(z: &VectorField, coord: &str, form: &Expr, on: &Bindings) -> Option<ZeroTest> {
    let e = &Expr::sym(coord) - form;
    let r = z.apply(&e).ok()?;
    Some(zero_test(&substitute(&r, on)))
}

/// Computed fiber operator for the row (projection of its optimal entry).
fn computed_z(row: &ClassificationRow, b: &Bindings) -> Result<VectorField, ClassifyError> {
    Ok(optimal_entry(&row.source()?)?.with(b).fiber_projection(&LieBasis::l10())?)
}

fn computed_x2(row: &ClassificationRow, b: &Bindings) -> Result<VectorField, ClassifyError> {
    Ok(optimal_entry(&row.source()?)?.with(b).point_projection(&LieBasis::l10())?)
}

/// Parses the row for one sign; fails when a form is undefined under the
/// row's condition or still refers to the unknowns f, g.
pub fn construct_row(row: &ClassificationRow, sign: i64) -> Result<Constructed, ClassifyError> {
    let ctx = row_context();
    let b = row.bindings(&ctx, sign)?;
    let lambda = substitute(&ctx.parse(&row.lambda)?, &b);
    if lambda.has_division_by_zero() {
        return Err(ClassifyError::Unsupported(format!(
            "λ = {} is undefined under {}",
            row.lambda,
            row.label()
        )));
    }
    let mut place = b.clone();
    place.insert(Expr::sym("Phi"), arbitrary("Phi", &lambda));
    place.insert(Expr::sym("Psi"), arbitrary("Psi", &lambda));
    let mut forms = Vec::new();
    for (name, text) in [("f", &row.f), ("g", &row.g)] {
        let e = substitute(&ctx.parse(text)?, &place);
        if e.has_division_by_zero() {
            return Err(ClassifyError::Unsupported(format!("{name} = {text} is undefined under {}", row.label())));
        }
        if e.contains_symbol("f") || e.contains_symbol("g") {
            return Err(ClassifyError::Unsupported(format!("{name} = {text} refers to the unknown f or g")));
        }
        forms.push(e);
    }
    let g = forms.pop().expect("two forms");
    let f = forms.pop().expect("two forms");
    let z = computed_z(row, &b)?;
    let mut on = Bindings::new();
    on.insert(Expr::sym("f"), f.clone());
    on.insert(Expr::sym("g"), g.clone());
    let lambda_invariant = z.apply(&lambda).ok().map(|r| zero_test(&r));
    let f_invariant = surface_test(&z, "f", &f, &on);
    let g_invariant = surface_test(&z, "g", &g, &on);
    let spec = EquationSpec::new(f, g).map_err(|e| ClassifyError::Malformed(e.to_string()))?;
    Ok(Constructed {
        row: row.row,
        sign,
        lambda,
        spec,
        z,
        lambda_invariant,
        f_invariant,
        g_invariant,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    /// The printed row verifies for at least one sign.
    Pass,
    Fail,
    /// The printed forms cannot be instantiated without guessing.
    Ambiguous,
    /// Verified numerically only.
    NumericOnly,
}

/// Verdicts of one sign of a row.
#[derive(Clone, Debug)]
pub struct SignCheck {
    pub sign: i64,
    pub f: Expr,
    pub g: Expr,
    pub lambda_invariant: Option<ZeroTest>,
    pub f_invariant: Option<ZeroTest>,
    pub g_invariant: Option<ZeroTest>,
    pub verdicts: Vec<(VectorField, Verification)>,
}

impl SignCheck {
    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| accepted(v.verdict))
    }

    fn to_json(&self) -> Value {
        json!({
            "sign": self.sign,
            "f": render_compact(&self.f),
            "g": render_compact(&self.g),
            "invariance": {"lambda": self.lambda_invariant, "f": self.f_invariant, "g": self.g_invariant},
            "operators": self.verdicts.iter().map(|(x, v)| {
                let mut o = v.to_json();
                o["operator"] = Value::String(render_field(x));
                o
            }).collect::<Vec<_>>(),
        })
    }
}

fn accepted(v: Verdict) -> bool {
    matches!(v, Verdict::ProvenSymmetry | Verdict::Probable)
}

/// Forms rebuilt from recomputed invariants, with their verdicts.
#[derive(Clone, Debug)]
pub struct Correction {
    pub lambda: Expr,
    pub f: Expr,
    pub g: Expr,
    pub operator: VectorField,
    pub verification: Verification,
    pub printed_operators: Vec<(VectorField, Verification)>,
}

impl Correction {
    pub fn passes(&self) -> bool {
        accepted(self.verification.verdict)
    }

    fn to_json(&self) -> Value {
        json!({
            "lambda": render_compact(&self.lambda),
            "f": render_compact(&self.f),
            "g": render_compact(&self.g),
            "operator": render_field(&self.operator),
            "verification": self.verification.to_json(),
            "printed_operators": self.printed_operators.iter().map(|(x, v)| json!({
                "operator": render_field(x),
                "verdict": v.verdict,
            })).collect::<Vec<_>>(),
            "passes": self.passes(),
        })
    }
}

/// Sampled `|Z(λ)|` for a base invariant that cannot be differentiated symbolically.
#[derive(Clone, Debug, Serialize)]
pub struct NumericInvariance {
    pub reading: String,
    pub samples: usize,
    pub max_abs: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct RowReport {
    pub row: u32,
    pub label: String,
    pub source: String,
    pub z_computed: VectorField,
    pub z_printed: VectorField,
    pub z_agreement: ZAgreement,
    pub status: RowStatus,
    pub signs: Vec<SignCheck>,
    pub recomputed: Option<InvariantSet>,
    pub correction: Option<Correction>,
    pub numeric: Vec<NumericInvariance>,
    pub note: Option<String>,
}

impl RowReport {
    pub fn passing_signs(&self) -> Vec<i64> {
        self.signs.iter().filter(|s| s.passes()).map(|s| s.sign).collect()
    }

    pub fn corrected_passes(&self) -> bool {
        self.correction.as_ref().is_some_and(Correction::passes)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "row": self.row,
            "z": self.label,
            "source": self.source,
            "z_computed": render_field(&self.z_computed),
            "z_printed": render_field(&self.z_printed),
            "z_agreement": self.z_agreement,
            "status": self.status,
            "passing_signs": self.passing_signs(),
            "verdicts": self.signs.iter().map(SignCheck::to_json).collect::<Vec<_>>(),
            "recomputed_invariants": self.recomputed.as_ref().map(InvariantSet::to_json),
            "correction": self.correction.as_ref().map(Correction::to_json),
            "numeric_invariance": self.numeric,
            "note": self.note,
        })
    }
}

fn printed_x2(row: &ClassificationRow, b: &Bindings) -> Result<Vec<VectorField>, ClassifyError> {
    let ctx = row_context();
    row.x2
        .iter()
        .map(|v| Ok(field_on(Chart::point(), v, &ctx)?.map_coeffs(|c| substitute(c, b))))
        .collect()
}

/// Solves two fiber invariants for f and g as functions of λ.
pub fn corrected_forms(set: &InvariantSet) -> Option<(Expr, Expr, Expr)> {
    let lambda = set.lambda()?.clone();
    let involves = |j: &Expr| (j.depends_on("f"), j.depends_on("g"));
    let target = |v: &str| arbitrary(if v == "f" { "Phi" } else { "Psi" }, &lambda);
    let (first, second) = match set.fiber.as_slice() {
        [a, b] => match (involves(a), involves(b)) {
            ((true, false), _) | ((false, true), _) => (a, b),
            (_, (true, false)) | (_, (false, true)) => (b, a),
            _ => return None,
        },
        _ => return None,
    };
    let v1 = if first.depends_on("f") { "f" } else { "g" };
    let v2 = if v1 == "f" { "g" } else { "f" };
    let s1 = solve_for(first, v1, &target(v1))?;
    let mut b = Bindings::new();
    b.insert(Expr::sym(v1), s1.clone());
    let s2 = solve_for(&substitute(second, &b), v2, &target(v2))?;
    if s2.depends_on("f") || s2.depends_on("g") {
        return None;
    }
    Some(if v1 == "f" { (lambda, s1, s2) } else { (lambda, s2, s1) })
}

fn correction(
    row: &ClassificationRow,
    b: &Bindings,
    set: &InvariantSet,
    opts: &NumericOptions,
) -> Result<Option<Correction>, ClassifyError> {
    let Some((lambda, f, g)) = corrected_forms(set) else {
        return Ok(None);
    };
    let spec = match EquationSpec::new(f.clone(), g.clone()) {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };
    let operator = computed_x2(row, b)?;
    let verification = verify_candidate_with(&spec, &operator, opts);
    let printed_operators = printed_x2(row, b)?
        .into_iter()
        .map(|x| {
            let v = verify_candidate_with(&spec, &x, opts);
            (x, v)
        })
        .collect();
    Ok(Some(Correction {
        lambda,
        f,
        g,
        operator,
        verification,
        printed_operators,
    }))
}

const NUMERIC_INVARIANCE_TOL: f64 = 1e-6;

/// Samples `Z(λ)` with finite differences where λ has no symbolic derivative.
fn numeric_invariance(z: &VectorField, lambda: &Expr, reading: &str, want: usize) -> NumericInvariance {
    let (a, b) = (z.coeff("x"), z.coeff("u"));
    let mut worst: Option<f64> = None;
    let mut got = 0;
    for seed in 0..(want as u64 * 20) {
        if got == want {
            break;
        }
        let bind = random_binding(&[lambda, &a, &b], 0x7ab1e5 + seed);
        let value = (|| -> Result<f64, crate::numcheck::NumError> {
            let av = crate::numcheck::eval(&a, &bind)?;
            let bv = crate::numcheck::eval(&b, &bind)?;
            let dx = partial_value(lambda, "x", &bind)?;
            let du = partial_value(lambda, "u", &bind)?;
            let scale = 1.0 + dx.abs().max(du.abs());
            Ok((av * dx + bv * du) / scale)
        })();
        if let Ok(v) = value {
            if v.is_finite() {
                got += 1;
                worst = Some(worst.map_or(v.abs(), |w: f64| w.max(v.abs())));
            }
        }
    }
    NumericInvariance {
        reading: reading.to_string(),
        samples: got,
        max_abs: worst,
        pass: got > 0 && worst.is_some_and(|w| w < NUMERIC_INVARIANCE_TOL),
    }
}

/// Both readings of a λ built from Lambert W: as printed, and with its
/// parameters renamed to those of the row's operator.
fn lambert_readings(row: &ClassificationRow, z: &VectorField) -> Result<Vec<NumericInvariance>, ClassifyError> {
    let ctx = row_context();
    let lambda = ctx.parse(&row.lambda)?;
    let mut renamed = Bindings::new();
    renamed.insert(Expr::sym("gamma3"), Expr::sym("gamma5"));
    renamed.insert(Expr::sym("eta1"), Expr::sym("eta3"));
    Ok(vec![
        numeric_invariance(z, &lambda, "as printed", 20),
        numeric_invariance(z, &substitute(&lambda, &renamed), "gamma3 -> gamma5, eta1 -> eta3", 20),
    ])
}

/// Verifies one printed row for every sign; on failure recomputes the
/// invariants of the computed operator and tests the rebuilt forms.
pub fn verify_row(row: &ClassificationRow) -> Result<RowReport, ClassifyError> {
    verify_row_with(row, &NumericOptions::default())
}

pub fn verify_row_with(row: &ClassificationRow, opts: &NumericOptions) -> Result<RowReport, ClassifyError> {
    let ctx = row_context();
    let base = row.bindings(&ctx, 1)?;
    let source = row.source()?;
    let z_computed = computed_z(row, &base)?;
    let z_printed = z_entry(&row.z)?.printed.map_coeffs(|c| substitute(c, &base));
    let z_agreement = agreement(&z_computed, &z_printed);
    let lambda_text = ctx.parse(&row.lambda)?;
    let mut report = RowReport {
        row: row.row,
        label: row.label(),
        source,
        z_computed: z_computed.clone(),
        z_printed,
        z_agreement,
        status: RowStatus::Fail,
        signs: Vec::new(),
        recomputed: None,
        correction: None,
        numeric: Vec::new(),
        note: None,
    };
    if lambda_text.contains_builtin(Builtin::LambertW) {
        report.status = RowStatus::NumericOnly;
        report.numeric = lambert_readings(row, &z_computed)?;
        report.note = Some("λ involves Lambert W of a non-constant argument: symbolic verification skipped".into());
        report.recomputed = Some(invariants(&z_computed)?);
        return Ok(report);
    }
    let mut ambiguity = None;
    for sign in row.signs() {
        let b = row.bindings(&ctx, sign)?;
        match construct_row(row, sign) {
            Ok(c) => {
                let verdicts = printed_x2(row, &b)?
                    .into_iter()
                    .map(|x| {
                        let v = verify_candidate_with(&c.spec, &x, opts);
                        (x, v)
                    })
                    .collect();
                report.signs.push(SignCheck {
                    sign,
                    f: c.spec.f.clone(),
                    g: c.spec.g.clone(),
                    lambda_invariant: c.lambda_invariant,
                    f_invariant: c.f_invariant,
                    g_invariant: c.g_invariant,
                    verdicts,
                });
            }
            Err(ClassifyError::Unsupported(why)) => ambiguity = Some(why),
            Err(e) => return Err(e),
        }
    }
    report.status = if ambiguity.is_some() {
        RowStatus::Ambiguous
    } else if report.signs.iter().any(SignCheck::passes) {
        RowStatus::Pass
    } else {
        RowStatus::Fail
    };
    report.note = ambiguity;
    if report.status != RowStatus::Pass {
        let set = invariants(&z_computed)?;
        report.correction = correction(row, &base, &set, opts)?;
        report.recomputed = Some(set);
    }
    Ok(report)
}

/// Every recomputed invariant is re-verified against the operator.
pub fn recheck(report: &RowReport) -> Result<bool, ClassifyError> {
    match &report.recomputed {
        Some(set) => {
            for j in set.all() {
                if !verify_invariant(&report.z_computed, &j)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        None => Ok(true),
    }
}

#[derive(Clone, Debug)]
pub struct Table5Report {
    pub rows: Vec<RowReport>,
    pub z_list: Vec<ZComparison>,
}

impl Table5Report {
    pub fn row(&self, n: u32) -> Option<&RowReport> {
        self.rows.iter().find(|r| r.row == n)
    }

    pub fn count(&self, status: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn corrected(&self) -> usize {
        self.rows.iter().filter(|r| r.corrected_passes()).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "summary": {
                "rows": self.rows.len(),
                "pass": self.count(RowStatus::Pass),
                "fail": self.count(RowStatus::Fail),
                "ambiguous": self.count(RowStatus::Ambiguous),
                "numeric_only": self.count(RowStatus::NumericOnly),
                "corrected_pass": self.corrected(),
                "z_list_differs": self.z_list.iter().filter(|z| z.agreement == ZAgreement::Differs).count(),
            },
            "z_list": self.z_list.iter().map(ZComparison::to_json).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(RowReport::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "# Classification table check\n\n{} rows: {} pass, {} fail, {} ambiguous, {} numeric only; {} failing rows have a passing corrected form.\n\n",
            self.rows.len(),
            self.count(RowStatus::Pass),
            self.count(RowStatus::Fail),
            self.count(RowStatus::Ambiguous),
            self.count(RowStatus::NumericOnly),
            self.corrected()
        );
        s.push_str("## Projected operators\n\n| Z | source | computed | printed | agreement |\n|---|---|---|---|---|\n");
        for z in &self.z_list {
            s.push_str(&format!(
                "| {} | {} | `{}` | `{}` | {:?} |\n",
                z.name,
                z.source,
                render_field(&z.computed),
                render_field(&z.printed),
                z.agreement
            ));
        }
        s.push_str("\n## Rows\n\n");
        for r in &self.rows {
            s.push_str(&row_markdown(r));
        }
        s
    }
}

pub fn row_markdown(r: &RowReport) -> String {
    let status = match r.status {
        RowStatus::Pass => "pass",
        RowStatus::Fail => "fail",
        RowStatus::Ambiguous => "ambiguous",
        RowStatus::NumericOnly => "numeric only",
    };
    let mut s = format!(
        "### Row {}: {} from {} ({status})\n\ncomputed Z: `{}`\n",
        r.row,
        r.label,
        r.source,
        render_field(&r.z_computed)
    );
    if r.z_agreement != ZAgreement::Exact {
        s.push_str(&format!("printed Z: `{}` ({:?})\n", render_field(&r.z_printed), r.z_agreement));
    }
    if let Some(n) = &r.note {
        s.push_str(&format!("\nnote: {n}\n"));
    }
    for c in &r.signs {
        s.push_str(&format!(
            "\nsign {:+}: f = `{}`, g = `{}`; invariance λ {:?}, f {:?}, g {:?}\n",
            c.sign,
            render_compact(&c.f),
            render_compact(&c.g),
            c.lambda_invariant,
            c.f_invariant,
            c.g_invariant
        ));
        for (x, v) in &c.verdicts {
            s.push_str(&format!("- `{}`: {}", render_field(x), v.verdict.as_str()));
            if let Some(res) = v.residual.as_ref().filter(|_| !accepted(v.verdict)) {
                s.push_str(&format!(", residual `{}`", render_compact(res)));
            }
            s.push('\n');
        }
    }
    for n in &r.numeric {
        s.push_str(&format!(
            "\nnumeric invariance ({}): {} samples, max |Z(λ)| = {}, {}\n",
            n.reading,
            n.samples,
            n.max_abs.map_or("n/a".to_string(), |m| format!("{m:.3e}")),
            if n.pass { "pass" } else { "fail" }
        ));
    }
    if let Some(set) = &r.recomputed {
        let list: Vec<String> = set.all().iter().map(render_compact).collect();
        s.push_str(&format!("\nrecomputed invariants: `{}`\n", list.join("`, `")));
        for g in &set.gaps {
            s.push_str(&format!("- gap: {g}\n"));
        }
    }
    if let Some(c) = &r.correction {
        s.push_str(&format!(
            "\ncorrected: λ = `{}`, f = `{}`, g = `{}`; `{}` {}\n",
            render_compact(&c.lambda),
            render_compact(&c.f),
            render_compact(&c.g),
            render_field(&c.operator),
            c.verification.verdict.as_str()
        ));
    }
    s.push('\n');
    s
}

pub fn table5_report() -> Result<Table5Report, ClassifyError> {
    table5_report_with(&NumericOptions::default())
}

pub fn table5_report_with(opts: &NumericOptions) -> Result<Table5Report, ClassifyError> {
    let rows = classification_rows()
        .iter()
        .map(|r| verify_row_with(r, opts))
        .collect::<Result<_, _>>()?;
    Ok(Table5Report {
        rows,
        z_list: compare_z_list()?,
    })
}
