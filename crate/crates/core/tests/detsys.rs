use nib_symmetry::detsys::{
    ansatz_solve, compare_with_printed, invariance_residual, split, verify_candidate, verify_family, EquationSpec,
    GeneratorFamily, Method, SplitLevel, Verdict,
};
use nib_symmetry::jetfield::{Chart, VectorField};
use nib_symmetry::symkernel::Context;

#[test]
fn printed_comparison_locates_the_discrepancies() {
    let cmp = compare_with_printed().unwrap();
    println!("{}", serde_json::to_string_pretty(&cmp).unwrap());
    assert!(cmp.reassembly_exact);
    assert!(!cmp.all_match());
    let ok = cmp.system.iter().filter(|l| l.matches).count();
    assert_eq!(ok, 6);
}

#[test]
fn generic_system_is_the_split_of_the_residual() {
    let ctx = Context::point();
    let spec = EquationSpec::generic();
    let v = VectorField::point(ctx.call("xi"), ctx.call("tau"), ctx.call("phi"));
    let r = invariance_residual(&spec, &v).unwrap();
    let sys = split(&r, &spec).unwrap();
    assert_eq!(sys.level, SplitLevel::Independence);
    assert_eq!(sys.reassemble(), r);
    assert_eq!(sys.distinct().len(), 8);
}

#[test]
fn generic_degree_two_ansatz_is_time_translation() {
    let basis = ansatz_solve(&EquationSpec::generic(), 2).unwrap();
    assert_eq!(basis, vec![VectorField::partial(Chart::point(), "t")]);
}

#[test]
fn ibe_family_verifies() {
    let fam = GeneratorFamily::ibe();
    let out = verify_family(&fam.spec, &fam).unwrap();
    assert_eq!(out.verdict, Verdict::ProvenSymmetry);
    assert_eq!(out.method, Method::Symbolic);
}

#[test]
fn constant_speed_family_verifies() {
    let fam = GeneratorFamily::constant_g();
    assert_eq!(verify_family(&fam.spec, &fam).unwrap().verdict, Verdict::ProvenSymmetry);
}

#[test]
fn homogeneous_family_fails() {
    let gx = GeneratorFamily::homogeneous(false);
    let out = verify_family(&gx.spec, &gx).unwrap();
    assert_eq!(out.verdict, Verdict::ProvenNot, "{:?}", out.residual);
    let gxu = GeneratorFamily::homogeneous(true);
    let out = verify_family(&gxu.spec, &gxu).unwrap();
    println!("{}", out.to_json());
    assert_eq!(out.method, Method::Numeric);
    assert_eq!(out.verdict, Verdict::ProvenNot);
}

#[test]
fn scaling_for_power_law() {
    let ctx = Context::point();
    let spec = EquationSpec::new(ctx.parse("u^2").unwrap(), ctx.parse("u").unwrap()).unwrap();
    let v = VectorField::point(ctx.parse("-t").unwrap(), ctx.parse("0").unwrap(), ctx.parse("u").unwrap());
    assert_eq!(verify_candidate(&spec, &v).verdict, Verdict::ProvenSymmetry);
}

#[test]
fn numeric_residual_agrees_on_known_symmetries() {
    use nib_symmetry::detsys::{numeric_max_residual, NumericOptions};
    for fam in [GeneratorFamily::ibe(), GeneratorFamily::projective(), GeneratorFamily::constant_g()] {
        let m = numeric_max_residual(&fam.spec, &fam.field, &NumericOptions::default()).unwrap();
        assert!(m < 1e-9, "{}: {m}", fam.name);
    }
    let v = VectorField::partial(Chart::point(), "x");
    let m = numeric_max_residual(&EquationSpec::generic(), &v, &NumericOptions::default()).unwrap();
    assert!(m > 1e-3);
}
