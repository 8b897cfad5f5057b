use std::fs;

use serde_json::{json, Value};

use nib_symmetry::classify::{
    classification_rows, optimal_system, reduction_scripts, replay_reduction, row_markdown, table5_report_with,
    verify_row_with, RowStatus,
};
use nib_symmetry::detsys::{
    compare_with_printed, invariance_residual, numeric_max_residual, split, verify_candidate_with, EquationSpec,
    LineComparison, NumericOptions, Verdict,
};
use nib_symmetry::jetfield::VectorField;
use nib_symmetry::liealg::{
    adjoint_table, bracket as lie_bracket, commutator_table, compare_table, printed_table, CellVerdict, LieBasis,
    TableKind,
};
use nib_symmetry::numcheck::{fd_corpus, DERIVATIVE_CORPUS};
use nib_symmetry::symkernel::{render, render_compact, Context, Expr};

use crate::output::{CliError, Report};
use crate::{Algebra, EquationArgs};

const FD_TOL: f64 = 1e-6;
const FD_POINTS: usize = 20;

fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Inline JSON, or `@path`.
fn json_arg(text: &str) -> Result<Value, CliError> {
    let body = match text.strip_prefix('@') {
        Some(path) => read_file(path.as_ref())?,
        None => text.to_string(),
    };
    serde_json::from_str(&body).map_err(|e| CliError::usage(format!("invalid JSON: {e}")))
}

fn equation(args: &EquationArgs) -> Result<Option<EquationSpec>, CliError> {
    let ctx = Context::point();
    if let Some(path) = &args.spec {
        let v: Value = serde_json::from_str(&read_file(path)?)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        return EquationSpec::from_json(&v, &ctx).map(Some).map_err(CliError::usage);
    }
    match (&args.f, &args.g) {
        (None, None) => Ok(None),
        (Some(f), Some(g)) => {
            let f = ctx.parse(f).map_err(|e| CliError::usage(format!("--f: {e}")))?;
            let g = ctx.parse(g).map_err(|e| CliError::usage(format!("--g: {e}")))?;
            EquationSpec::new(f, g).map(Some).map_err(CliError::usage)
        }
        _ => Err(CliError::usage("--f and --g must be given together")),
    }
}

/// Point fields parse in the point context; charts carrying f or g use the extended one.
fn vector_field(text: &str) -> Result<VectorField, CliError> {
    let v = json_arg(text)?;
    let extended = v
        .get("chart")
        .and_then(Value::as_array)
        .is_some_and(|c| c.iter().any(|n| n == "f" || n == "g"));
    let ctx = if extended { Context::equivalence() } else { Context::point() };
    VectorField::from_json(&v, &ctx).map_err(CliError::usage)
}

fn line_md(l: &LineComparison) -> String {
    format!(
        "| {} | {} | `{}` | `{}` |\n",
        l.label,
        if l.matches { "match" } else { "differs" },
        l.printed,
        l.computed.as_deref().unwrap_or("-")
    )
}

pub fn detsys(eq: &EquationArgs, compare_paper: bool) -> Result<Report, CliError> {
    let spec = equation(eq)?.unwrap_or_else(EquationSpec::generic);
    let ctx = Context::point();
    let v = VectorField::point(ctx.call("xi"), ctx.call("tau"), ctx.call("phi"));
    let residual = invariance_residual(&spec, &v).map_err(CliError::usage)?;
    let system = split(&residual, &spec).map_err(CliError::usage)?;
    let mut json = json!({
        "spec": spec.to_json(),
        "residual": render(&residual),
        "system": system.to_json(),
    });
    let mut markdown = format!(
        "# Determining equations\n\nu_t + ({}) u_x = {}\n\nresidual: `{}`\n\n{}",
        render_compact(&spec.g),
        render_compact(&spec.f),
        render_compact(&residual),
        system.to_markdown()
    );
    let mut pass = true;
    let mut summary = format!("{} determining equations", system.distinct().len());
    if compare_paper {
        let cmp = compare_with_printed().map_err(CliError::usage)?;
        pass = cmp.all_match() && cmp.reassembly_exact;
        json["comparison"] = serde_json::to_value(&cmp).expect("comparison serializes");
        markdown.push_str("\n## Against the printed equations\n\n| line | verdict | printed | computed |\n|---|---|---|---|\n");
        markdown.push_str(&line_md(&cmp.determining_equation));
        for l in cmp.ux_split.iter().chain(&cmp.system) {
            markdown.push_str(&line_md(l));
        }
        for c in &cmp.unmatched_computed {
            markdown.push_str(&format!("| unmatched computed | differs | - | `{c}` |\n"));
        }
        markdown.push_str(&format!("\nreassembly exact: {}\n", cmp.reassembly_exact));
        summary.push_str(if pass { "; printed equations match" } else { "; printed equations differ" });
    }
    Ok(Report {
        name: "detsys".into(),
        json,
        markdown,
        summary,
        pass,
    })
}

pub fn verify(eq: &EquationArgs, vf: &str, opts: &NumericOptions) -> Result<Report, CliError> {
    let spec = equation(eq)?.ok_or_else(|| CliError::usage("verify needs --f and --g or --spec"))?;
    let v = vector_field(vf)?;
    let result = verify_candidate_with(&spec, &v, opts);
    let pass = result.verdict == Verdict::ProvenSymmetry;
    let mut markdown = format!(
        "# Symmetry check\n\nequation: u_t + ({}) u_x = {}\n\nfield: `{}`\n\nverdict: {}\n",
        render_compact(&spec.g),
        render_compact(&spec.f),
        v,
        result.verdict.as_str()
    );
    if let Some(r) = result.residual.as_ref().filter(|r| !r.is_zero()) {
        markdown.push_str(&format!("\nresidual: `{}`\n", render_compact(r)));
    }
    if let Some(m) = result.numeric_max {
        markdown.push_str(&format!("\nsampled residual max: {m:.3e}\n"));
    }
    if let Some(n) = &result.note {
        markdown.push_str(&format!("\nnote: {n}\n"));
    }
    Ok(Report {
        name: "verify".into(),
        json: json!({"spec": spec.to_json(), "field": v.to_json(), "verification": result.to_json()}),
        markdown,
        summary: format!("verdict: {}", result.verdict.as_str()),
        pass,
    })
}

pub fn bracket(v: &str, w: &str) -> Result<Report, CliError> {
    let (v, w) = (vector_field(v)?, vector_field(w)?);
    let b = lie_bracket(&v, &w).map_err(CliError::usage)?;
    let shown = if b.is_zero() { "0".to_string() } else { b.to_string() };
    Ok(Report {
        name: "bracket".into(),
        json: json!({"v": v.to_json(), "w": w.to_json(), "bracket": b.to_json()}),
        markdown: format!("[`{v}`, `{w}`] = `{shown}`\n"),
        summary: format!("bracket: {shown}"),
        pass: true,
    })
}

fn basis(algebra: Algebra) -> LieBasis {
    match algebra {
        Algebra::L10 => LieBasis::l10(),
        Algebra::Ibe => LieBasis::ibe(),
        Algebra::Equiv => LieBasis::equiv(),
    }
}

pub fn commutators(algebra: Algebra, compare_paper: bool) -> Result<Report, CliError> {
    let basis = basis(algebra);
    let table = commutator_table(&basis).map_err(CliError::usage)?;
    let antisymmetry = table.antisymmetry_failures().map_err(CliError::usage)?;
    let jacobi = table.jacobi_failures().map_err(CliError::usage)?;
    let n = basis.len();
    let closed = table.closed_count() == n * n;
    let mut pass = antisymmetry.is_empty() && jacobi.is_empty();
    let mut json = table.to_json();
    json["checks"] = json!({
        "antisymmetry_failures": antisymmetry.iter().map(|(i, j)| format!("({}, {})", basis.names[*i], basis.names[*j])).collect::<Vec<_>>(),
        "jacobi_failures": jacobi.iter().map(|(i, j, k)| format!("({}, {}, {})", basis.names[*i], basis.names[*j], basis.names[*k])).collect::<Vec<_>>(),
    });
    let mut markdown = format!("# Commutator table: {}\n\n{}", basis.name, table.to_markdown());
    markdown.push_str(&format!(
        "\nclosed: {closed}; antisymmetry failures: {}; Jacobi failures: {}\n",
        antisymmetry.len(),
        jacobi.len()
    ));
    let mut summary = format!("{} commutators, {} closed", n * n, table.closed_count());
    if compare_paper {
        let printed = printed_table(&basis, TableKind::Commutator).map_err(CliError::usage)?;
        let diff = compare_table(&table, &printed).map_err(CliError::usage)?;
        pass &= diff.count(CellVerdict::Mismatch) == 0;
        summary.push_str(&format!("; {} of {} match the printed table", diff.count(CellVerdict::Match), diff.cells.len()));
        json["comparison"] = diff.to_json();
        markdown.push_str(&format!("\n## Against the printed table\n\n{}", diff.to_markdown()));
    }
    Ok(Report {
        name: format!("commutators-{}", basis.name),
        json,
        markdown,
        summary,
        pass,
    })
}

pub fn adjoint(algebra: Algebra, compare_paper: bool) -> Result<Report, CliError> {
    if algebra != Algebra::L10 {
        return Err(CliError::usage("the adjoint table needs rational structure constants: use --algebra l10"));
    }
    let basis = basis(algebra);
    let table = adjoint_table(&commutator_table(&basis).map_err(CliError::usage)?).map_err(CliError::usage)?;
    let n = basis.len();
    let failing: Vec<String> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !table.checks(i, j).all())
        .map(|(i, j)| format!("({}, {})", basis.names[i], basis.names[j]))
        .collect();
    let mut pass = failing.is_empty();
    let mut json = table.to_json();
    json["failing_checks"] = json!(failing);
    let mut markdown = format!("# Adjoint table: {}\n\n{}", basis.name, table.to_markdown());
    markdown.push_str(&format!("\nentries failing a check: {}\n", failing.len()));
    let mut summary = format!("{} adjoint entries, {} failing checks", n * n, failing.len());
    if compare_paper {
        let printed = printed_table(&basis, TableKind::Adjoint).map_err(CliError::usage)?;
        let diff = compare_table(&table, &printed).map_err(CliError::usage)?;
        pass &= diff.count(CellVerdict::Mismatch) == 0;
        summary.push_str(&format!(
            "; {} match, {} match under s -> -s, {} mismatch",
            diff.count(CellVerdict::Match),
            diff.count(CellVerdict::MatchUnderSNegation),
            diff.count(CellVerdict::Mismatch)
        ));
        json["comparison"] = diff.to_json();
        markdown.push_str(&format!("\n## Against the printed table\n\n{}", diff.to_markdown()));
    }
    Ok(Report {
        name: format!("adjoint-{}", basis.name),
        json,
        markdown,
        summary,
        pass,
    })
}

pub fn optimal_list() -> Report {
    let basis = LieBasis::l10();
    let entries = optimal_system();
    let mut markdown = String::from("# Optimal system\n\n| entry | operator | parameters |\n|---|---|---|\n");
    for e in &entries {
        markdown.push_str(&format!("| {} | `{}` | {} |\n", e.name, e.source, e.parameters().join(", ")));
    }
    Report {
        name: "optimal-system".into(),
        json: json!({
            "basis": basis.name,
            "entries": entries.iter().map(|e| e.to_json(&basis)).collect::<Vec<_>>(),
        }),
        markdown,
        summary: format!("{} entries", entries.len()),
        pass: true,
    }
}

pub fn replay(case: Option<&str>) -> Result<Report, CliError> {
    let scripts: Vec<_> = reduction_scripts()
        .into_iter()
        .filter(|s| case.is_none_or(|c| s.name == c))
        .collect();
    if scripts.is_empty() {
        return Err(CliError::usage(format!("no reduction script named {}", case.unwrap_or_default())));
    }
    let replays = scripts
        .iter()
        .map(replay_reduction)
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::usage)?;
    let passed = replays.iter().filter(|r| r.pass()).count();
    let mut markdown = String::from("# Adjoint reductions\n\n");
    for r in &replays {
        markdown.push_str(&r.to_markdown());
        markdown.push('\n');
    }
    Ok(Report {
        name: "reductions".into(),
        json: json!({"replays": replays.iter().map(|r| r.to_json()).collect::<Vec<_>>()}),
        markdown,
        summary: format!("{passed} of {} reductions reach their targets", replays.len()),
        pass: passed == replays.len(),
    })
}

pub fn classify_report(opts: &NumericOptions) -> Result<Report, CliError> {
    let report = table5_report_with(opts).map_err(CliError::usage)?;
    let pass = report.count(RowStatus::Pass) == report.rows.len();
    Ok(Report {
        name: "classification".into(),
        json: report.to_json(),
        markdown: report.to_markdown(),
        summary: format!(
            "{} rows: {} pass, {} fail, {} ambiguous, {} numeric only, {} corrected",
            report.rows.len(),
            report.count(RowStatus::Pass),
            report.count(RowStatus::Fail),
            report.count(RowStatus::Ambiguous),
            report.count(RowStatus::NumericOnly),
            report.corrected()
        ),
        pass,
    })
}

pub fn classify_row(n: u32, opts: &NumericOptions) -> Result<Report, CliError> {
    let rows = classification_rows();
    let row = rows
        .iter()
        .find(|r| r.row == n)
        .ok_or_else(|| CliError::usage(format!("no row {n}; rows run from 1 to {}", rows.len())))?;
    let report = verify_row_with(row, opts).map_err(CliError::usage)?;
    Ok(Report {
        name: format!("row-{n}"),
        json: report.to_json(),
        markdown: row_markdown(&report),
        summary: format!("row {n}: {:?}", report.status).to_lowercase(),
        pass: report.status == RowStatus::Pass,
    })
}

fn sampled(spec: &EquationSpec, v: &VectorField, opts: &NumericOptions) -> Result<Report, CliError> {
    let m = numeric_max_residual(spec, v, opts).map_err(CliError::usage)?;
    Ok(Report {
        name: "numcheck".into(),
        json: json!({
            "spec": spec.to_json(),
            "field": v.to_json(),
            "samples": opts.samples,
            "seed": opts.seed,
            "tol": opts.tol,
            "max_residual": m,
        }),
        markdown: format!(
            "# Sampled residual\n\nfield `{v}` on u_t + ({}) u_x = {}\n\n{} on-shell samples, seed {}: max |residual| = {m:.3e} (tol {:.1e})\n",
            render_compact(&spec.g),
            render_compact(&spec.f),
            opts.samples,
            opts.seed,
            opts.tol
        ),
        summary: format!("max sampled residual {m:.3e}"),
        pass: m < opts.tol,
    })
}

pub fn numcheck(eq: &EquationArgs, vf: Option<&str>, opts: &NumericOptions) -> Result<Report, CliError> {
    if let Some(vf) = vf {
        let spec = equation(eq)?.unwrap_or_else(EquationSpec::generic);
        return sampled(&spec, &vector_field(vf)?, opts);
    }
    let fd = fd_corpus(&DERIVATIVE_CORPUS, FD_POINTS, opts.seed, FD_TOL).map_err(CliError::usage)?;
    let mut corroborated = Vec::new();
    let generic = EquationSpec::generic();
    let dt = VectorField::point(Expr::one(), Expr::zero(), Expr::zero());
    let m = numeric_max_residual(&generic, &dt, opts).map_err(CliError::usage)?;
    corroborated.push(("generator ∂t, opaque f and g".to_string(), m));
    for row in classification_rows() {
        let report = verify_row_with(&row, opts).map_err(CliError::usage)?;
        for s in &report.signs {
            for (x, v) in &s.verdicts {
                if v.verdict == Verdict::ProvenSymmetry {
                    let label = format!("row {} sign {:+}: {}", row.row, s.sign, x);
                    corroborated.push((label, v.numeric_max.unwrap_or(f64::INFINITY)));
                }
            }
        }
    }
    let worst = corroborated.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    let pass = fd.pass() && worst < opts.tol;
    let mut markdown = format!("# Numeric corroboration\n\n## Finite differences (tol {FD_TOL:.0e})\n\n{}", fd.to_markdown());
    markdown.push_str(&format!(
        "\n## Proven symmetries, {} on-shell samples, seed {} (tol {:.0e})\n\n| verdict | max residual |\n|---|---|\n",
        opts.samples, opts.seed, opts.tol
    ));
    for (label, m) in &corroborated {
        markdown.push_str(&format!("| {label} | {m:.3e} |\n"));
    }
    Ok(Report {
        name: "numcheck".into(),
        json: json!({
            "finite_differences": fd.to_json(),
            "samples": opts.samples,
            "seed": opts.seed,
            "tol": opts.tol,
            "corroboration": corroborated.iter().map(|(l, m)| json!({"verdict": l, "max_residual": m})).collect::<Vec<_>>(),
        }),
        markdown,
        summary: format!(
            "finite differences max {:.2e}; {} proven verdicts, max sampled residual {worst:.2e}",
            fd.max_error(),
            corroborated.len()
        ),
        pass,
    })
}
