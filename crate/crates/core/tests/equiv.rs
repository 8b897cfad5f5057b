use nib_symmetry::equiv::{
    as_y_combination, build_y, equiv_conditions, l10_basis, project, time_independent_context, EquivField,
    ProjectionTarget, YKind,
};
use nib_symmetry::jetfield::Chart;
use nib_symmetry::symkernel::{Context, FunctionSymbol};

#[test]
fn time_conditions_come_from_the_split() {
    let sys = equiv_conditions(&EquivField::generic()).unwrap();
    for c in &sys.conditions {
        println!("{} : {}", c.label, c.expr);
    }
    let ctx = Context::equivalence();
    assert_eq!(sys.get("f_t: 1"), ctx.parse("chi_t").unwrap());
    assert_eq!(sys.get("f_t: f_x"), ctx.parse("-tau_t").unwrap());
    assert_eq!(sys.get("f_t: f_u"), ctx.parse("-phi_t").unwrap());
    assert_eq!(sys.get("g_t: 1"), ctx.parse("eta_t").unwrap());
}

#[test]
fn printed_ux_and_constant_parts() {
    let sys = equiv_conditions(&EquivField::time_independent()).unwrap();
    let ctx = time_independent_context();
    let eq18 = ctx.parse("f*g*xi_u + g*xi_t - f*tau_u - g*tau_x + g^2*xi_x + eta").unwrap();
    let eq19 = ctx.parse("-chi + f*phi_u - f*xi_t - f^2*xi_u + g*phi_x - f*g*xi_x").unwrap();
    assert_eq!(sys.get("equation: u_x^1"), eq18);
    assert_eq!(sys.get("equation: u_x^0"), eq19);
}

#[test]
fn y_generators() {
    let ctx = time_independent_context();
    for (kind, coeff) in [(YKind::Y2, "tau"), (YKind::Y3, "phi")] {
        let y = build_y(kind, &ctx.call(coeff)).unwrap();
        let sys = equiv_conditions(&y).unwrap();
        assert!(sys.is_satisfied(), "{kind:?}: {:?}", sys.nonzero().collect::<Vec<_>>());
    }
    let y1 = build_y(YKind::Y1, &ctx.call("xi")).unwrap();
    let sys = equiv_conditions(&y1).unwrap();
    let left: Vec<_> = sys.nonzero().collect();
    println!("{left:?}");
    assert!(left.iter().all(|c| c.label.starts_with("f_t") || c.label.starts_with("g_t")));
    assert!(!left.is_empty());

    let mut restricted = ctx.clone();
    restricted.declare_function(FunctionSymbol::opaque("F1", &["x", "u"]));
    let xi = restricted.parse("c1*t + F1(x,u)").unwrap();
    assert!(equiv_conditions(&build_y(YKind::Y1, &xi).unwrap()).unwrap().is_satisfied());
}

#[test]
fn general_solution_fails_only_through_xi_time_dependence() {
    let sys = equiv_conditions(&EquivField::general_solution()).unwrap();
    assert!(sys.get("equation: u_x^1").is_zero());
    assert!(sys.get("equation: u_x^0").is_zero());
    assert!(!sys.is_satisfied());
}

#[test]
fn l10_fields_are_equivalence_generators() {
    for (name, v) in l10_basis().names.iter().zip(&l10_basis().fields) {
        let y = EquivField::new(v.clone()).unwrap();
        assert!(equiv_conditions(&y).unwrap().is_satisfied(), "{name}");
        assert!(as_y_combination(v).unwrap().is_some(), "{name}");
    }
}

#[test]
fn projections() {
    let b = l10_basis();
    let z1 = project(&b.fields[1], ProjectionTarget::Fiber);
    assert_eq!(z1.field.to_string(), "∂x");
    let a10 = b.fields[3].add(&b.fields[9]).unwrap();
    let z9 = project(&a10, ProjectionTarget::Fiber);
    println!("{}", z9.field);
    assert_eq!(z9.field.chart, Chart::fiber());
}
