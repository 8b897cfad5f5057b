use super::*;

fn p(s: &str) -> Expr {
    Context::point().parse(s).unwrap()
}

#[test]
fn parse_equation_has_three_terms() {
    let e = p("u_t + g(x,u)*u_x - f(x,u)");
    assert_eq!(e.term_count(), 3);
    assert!(p("0").is_zero());
}

#[test]
fn arithmetic_normalizes() {
    assert_eq!(p("(x+u)^2 - x^2 - 2*x*u"), p("u^2"));
    assert_eq!(p("x/x"), Expr::one());
    assert_eq!(p("(x^2 - u^2)/(x - u)"), p("x + u"));
    assert_eq!(p("1/2 + 1/3"), Expr::frac(5, 6));
    assert_eq!(p("exp(x)*exp(u)"), p("exp(x + u)"));
    assert_eq!(p("exp(2*ln(x))"), p("x^2"));
    assert_eq!(p("ln(x^3*exp(u))"), p("3*ln(x) + u"));
    assert_eq!(p("4^(1/2)"), Expr::int(2));
    assert_eq!(p("(x*u)^(1/2)*(x*u)^(1/2)"), p("x*u"));
}

#[test]
fn render_round_trips() {
    for s in [
        "u_t + g(x,u)*u_x - f(x,u)",
        "-x/(2*u)",
        "(x + u)^(-2)*3/5",
        "x^(1/3)*exp(u - x)",
        "g_xu(x,u)*F1(u)^2 - ln(1 + x)",
        "Phi(x*u)/(1 - Psi(u)^2)",
        "2^(1/2)*x",
        "(x+u)^(1/2) + lambertw(x)",
    ] {
        let e = p(s);
        assert_eq!(p(&render(&e)), e, "{s} -> {}", render(&e));
        assert_eq!(p(&render_compact(&e)), e, "{s} -> {}", render_compact(&e));
    }
}

#[test]
fn parse_errors() {
    let ctx = Context::point();
    assert!(matches!(ctx.parse("x + * u"), Err(SymError::Parse { pos: 4, .. })));
    assert!(matches!(ctx.parse("zz + 1"), Err(SymError::Undeclared(_))));
    assert!(matches!(ctx.parse("f(x)"), Err(SymError::Arity { expected: 2, got: 1, .. })));
    assert!(matches!(ctx.parse("x/0"), Err(SymError::Parse { .. })));
    assert!(matches!(ctx.parse("(x"), Err(SymError::Parse { .. })));
}

#[test]
fn derivatives() {
    let d = |s: &str, v: &str| differentiate(&p(s), v).unwrap();
    assert_eq!(d("u^2", "u"), p("2*u"));
    assert_eq!(d("g(x,u)", "x"), p("g_x(x,u)"));
    assert_eq!(d("f*g", "u"), p("f_u*g + f*g_u"));
    assert_eq!(d("x/u", "u"), p("-x/u^2"));
    assert_eq!(d("exp(x*u)", "x"), p("u*exp(x*u)"));
    assert_eq!(d("ln(x)", "x"), p("1/x"));
    assert_eq!(d("Phi(x*u)", "x"), p("u*Phi_l(x*u)"));
    assert_eq!(d("u_x*u", "u_x"), p("u"));
    assert!(differentiate(&p("lambertw(x)"), "x").is_err());
    assert_eq!(d("lambertw(u)", "x"), Expr::zero());
    assert_eq!(d("g_x", "u"), d("g_u", "x"));
}

#[test]
fn antiderivative_atom() {
    let ctx = Context::homogeneous(true);
    let e = ctx.parse("P(x,u)").unwrap();
    assert_eq!(differentiate(&e, "x").unwrap(), ctx.parse("exp(g)").unwrap());
    assert!(matches!(differentiate(&e, "u"), Err(SymError::UnsupportedDerivative(_))));
}

#[test]
fn substitution_is_simultaneous() {
    let mut b = Bindings::new();
    b.insert(p("x"), p("u"));
    b.insert(p("u"), p("x"));
    assert_eq!(substitute(&p("x + 2*u"), &b), p("u + 2*x"));
    let mut onshell = Bindings::new();
    onshell.insert(p("u_t"), p("f - g*u_x"));
    assert!(substitute(&p("u_t + g*u_x - f"), &onshell).is_zero());
}

#[test]
fn instantiation_differentiates_the_body() {
    let e = p("g_x*Phi(u^2)");
    let e = instantiate_function(&e, "g", &p("x^2*u")).unwrap();
    let e = instantiate_function(&e, "Phi", &(Expr::sym("l") * Expr::int(3))).unwrap();
    assert_eq!(e, p("6*x*u^3"));
    let e = instantiate_function(&p("Phi_l(x + 1)"), "Phi", &Expr::sym("l").powi(3)).unwrap();
    assert_eq!(e, p("3*(x + 1)^2"));
}

#[test]
fn power_collection() {
    let e = p("3*u_x^2*f + u_x - g");
    let c = collect_powers(&e, "u_x").unwrap();
    assert_eq!(c.len(), 3);
    assert_eq!(c[&2], p("3*f"));
    assert!(collect_powers(&Expr::zero(), "u_x").unwrap().is_empty());
    assert!(matches!(collect_powers(&p("Phi(u_x)"), "u_x"), Err(SymError::NotPolynomial { .. })));
    assert!(matches!(collect_powers(&p("u_x^(1/2)"), "u_x"), Err(SymError::NotPolynomial { .. })));
    let m = collect_monomials(&p("f^2*x + f*g*u + 1"), &[p("f"), p("g")]).unwrap();
    assert_eq!(m[&vec![2, 0]], p("x"));
    assert_eq!(m[&vec![1, 1]], p("u"));
}

#[test]
fn equality_verdicts() {
    assert_eq!(equals(&p("f*g"), &p("g*f")), Equality::ProvenEqual);
    assert_eq!(equals(&p("x/(x+u) + u/(x+u)"), &Expr::one()), Equality::ProvenEqual);
    assert_eq!(equals(&p("f + g"), &p("f")), Equality::NotEqual);
    assert_eq!(zero_test(&p("(x+1)^(1/2)*(x+1)^(1/2) - x - 1")), ZeroTest::Zero);
    assert_eq!(zero_test(&p("ln(x*u) - ln(x) - ln(u)")), ZeroTest::Zero);
    assert_eq!(zero_test(&p("lambertw(x)*exp(lambertw(x)) - x")), ZeroTest::ProbablyZero);
}
