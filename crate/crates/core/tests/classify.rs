use nib_symmetry::classify::{
    classification_rows, compare_z_list, construct_row, invariants, non_solvable, optimal_entry, optimal_system,
    recheck, reduction_scripts, replay_reduction, solve_for, table5_report, verify_invariant, verify_row, RowStatus,
    Table5Report, ZAgreement,
};
use nib_symmetry::detsys::{numeric_max_residual, verify_candidate, NumericOptions, Verdict};
use nib_symmetry::jetfield::{Chart, VectorField};
use nib_symmetry::liealg::{render_combination, LieBasis};
use nib_symmetry::symkernel::{substitute, zero_test, Bindings, Context, Expr, ZeroTest};
use std::sync::OnceLock;

fn report() -> &'static Table5Report {
    static REPORT: OnceLock<Table5Report> = OnceLock::new();
    REPORT.get_or_init(|| table5_report().expect("report builds"))
}

fn field(pairs: &[(&str, &str)]) -> VectorField {
    let ctx = Context::fiber();
    VectorField::from_pairs(Chart::fiber(), pairs.iter().map(|(c, e)| (*c, ctx.parse(e).unwrap())))
}

fn parse(text: &str) -> Expr {
    Context::fiber().parse(text).unwrap()
}

#[test]
fn optimal_system_has_twenty_entries() {
    let all = optimal_system();
    assert_eq!(all.len(), 20);
    let basis = LieBasis::l10();
    assert_eq!(render_combination(&basis, &optimal_entry("A7").unwrap().coeffs), "X3 + X4");
    let a20 = optimal_entry("A20").unwrap();
    assert_eq!(a20.parameters(), vec!["eta5".to_string(), "gamma6".to_string()]);
    assert!(optimal_entry("A21").is_err());
}

#[test]
fn reduction_replays() {
    let scripts = reduction_scripts();
    let replay = |name: &str| {
        let s = scripts.iter().find(|s| s.name == name).unwrap();
        replay_reduction(s).unwrap()
    };
    let a = replay("case-a");
    assert_eq!(a.records[0].cancelled, Some(true));
    assert_eq!(a.records[1].cancelled, Some(false));
    assert!(!a.pass());
    assert!(replay("case-a-corrected").pass());
    let e = replay("case-e");
    assert!(!e.pass());
    assert!(!e.offending.is_empty());
    assert!(replay("case-j").pass());
}

#[test]
fn z5_invariants() {
    let z5 = field(&[("f", "f^2"), ("g", "f*g")]);
    for j in ["x", "u", "f/g"] {
        assert!(verify_invariant(&z5, &parse(j)).unwrap(), "{j}");
    }
    assert!(!verify_invariant(&z5, &parse("f")).unwrap());
}

#[test]
fn z14_printed_invariants() {
    let z = field(&[("x", "x"), ("f", "-gamma3*f^2"), ("g", "(1 - gamma3*f)*g")]);
    assert!(verify_invariant(&z, &parse("u")).unwrap());
    assert!(!verify_invariant(&z, &parse("f - 1/(gamma3*ln(x))")).unwrap());
    let set = invariants(&z).unwrap();
    assert!(set.complete(), "{set:?}");
    let z0 = field(&[("x", "x"), ("g", "g")]);
    for j in ["u", "f", "g/x"] {
        assert!(verify_invariant(&z0, &parse(j)).unwrap(), "{j}");
    }
}

#[test]
fn non_solvable_operators() {
    for (name, want) in [("Z3", true), ("Z4", true), ("Z5", true), ("Z1", false), ("Z2", false)] {
        let z = nib_symmetry::classify::z_list().into_iter().find(|z| z.name == name).unwrap();
        assert_eq!(non_solvable(&z.printed), want, "{name}");
    }
    assert!(!non_solvable(&VectorField::zero(Chart::fiber())));
}

#[test]
fn solves_power_invariant() {
    let j = parse("g/x^2");
    let s = solve_for(&j, "g", &Expr::sym("T")).unwrap();
    let mut b = Bindings::new();
    b.insert(Expr::sym("g"), s);
    assert_eq!(zero_test(&(substitute(&j, &b) - Expr::sym("T"))), ZeroTest::Zero);
}

#[test]
fn z_list_comparison() {
    let cmp = compare_z_list().unwrap();
    assert_eq!(cmp.len(), 19);
    let get = |n: &str| cmp.iter().find(|c| c.name == n).unwrap().agreement;
    assert_eq!(get("Z1"), ZAgreement::Exact);
    assert_eq!(get("Z2"), ZAgreement::Differs);
    assert_eq!(get("Z3"), ZAgreement::Proportional);
    assert_eq!(get("Z18"), ZAgreement::Exact);
}

#[test]
fn report_has_every_row() {
    let r = report();
    assert_eq!(r.rows.len(), 27);
    assert_eq!(classification_rows().len(), 27);
    let total: usize = [RowStatus::Pass, RowStatus::Fail, RowStatus::Ambiguous, RowStatus::NumericOnly]
        .into_iter()
        .map(|s| r.count(s))
        .sum();
    assert_eq!(total, 27);
}

#[test]
fn printed_rows_that_verify() {
    let r = report();
    for n in [1, 2, 3, 13] {
        let row = r.row(n).unwrap();
        assert_eq!(row.status, RowStatus::Pass, "row {n}");
        for s in &row.signs {
            let row_def = classification_rows().into_iter().find(|r| r.row == n).unwrap();
            let spec = construct_row(&row_def, s.sign).unwrap().spec;
            for (x, v) in &s.verdicts {
                assert_eq!(v.verdict, Verdict::ProvenSymmetry, "row {n}");
                let m = numeric_max_residual(&spec, x, &NumericOptions::default()).unwrap();
                assert!(m < 1e-9, "row {n}: {m}");
            }
        }
    }
}

#[test]
fn failing_rows_carry_residuals_and_invariants() {
    for row in &report().rows {
        if row.status != RowStatus::Fail {
            continue;
        }
        let residual = row
            .signs
            .iter()
            .flat_map(|s| &s.verdicts)
            .any(|(_, v)| v.residual.as_ref().is_some_and(|r| !r.is_zero()));
        assert!(residual, "row {}", row.row);
        assert!(row.recomputed.is_some(), "row {}", row.row);
        assert!(recheck(row).unwrap(), "row {}", row.row);
    }
}

#[test]
fn row_23_correction() {
    let row = report().row(23).unwrap();
    assert_eq!(row.status, RowStatus::Fail);
    let c = row.correction.as_ref().unwrap();
    assert!(c.passes());
    assert_eq!(c.f, parse("Phi(x)"));
    assert_eq!(c.g, parse("Psi(x)/u"));
}

#[test]
fn special_rows() {
    let r = report();
    assert_eq!(r.row(7).unwrap().status, RowStatus::Ambiguous);
    assert_eq!(r.row(24).unwrap().status, RowStatus::Ambiguous);
    let w = r.row(21).unwrap();
    assert_eq!(w.status, RowStatus::NumericOnly);
    assert!(!w.numeric.is_empty());
}

#[test]
fn rescaled_operator_keeps_verdict() {
    let row = classification_rows().into_iter().find(|r| r.row == 1).unwrap();
    let c = construct_row(&row, 1).unwrap();
    let ctx = Context::point();
    let v = VectorField::point(Expr::zero(), ctx.parse("3").unwrap(), Expr::zero());
    assert_eq!(verify_candidate(&c.spec, &v).verdict, Verdict::ProvenSymmetry);
    let w = VectorField::point(Expr::zero(), Expr::zero(), Expr::one());
    assert_ne!(verify_candidate(&c.spec, &w).verdict, Verdict::ProvenSymmetry);
}

#[test]
fn row_reports_are_stable() {
    let row = classification_rows().into_iter().find(|r| r.row == 6).unwrap();
    let a = verify_row(&row).unwrap().to_json().to_string();
    let b = verify_row(&row).unwrap().to_json().to_string();
    assert_eq!(a, b);
}
