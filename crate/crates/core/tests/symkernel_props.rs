use nib_symmetry::numcheck::{fd_check, random_binding};
use nib_symmetry::symkernel::{
    collect_powers, differentiate, equals, render, render_compact, Context, Equality, Expr,
};
use proptest::prelude::*;

/// Grammar-level AST used to produce expression strings.
#[derive(Clone, Debug)]
enum Ast {
    Int(i64),
    Frac(i64, i64),
    Var(&'static str),
    Call(&'static str, Vec<Ast>),
    Builtin(&'static str, Box<Ast>),
    Neg(Box<Ast>),
    Bin(char, Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64, i64),
}

impl Ast {
    fn text(&self) -> String {
        match self {
            Ast::Int(n) => n.to_string(),
            Ast::Frac(p, q) => format!("({p}/{q})"),
            Ast::Var(v) => v.to_string(),
            Ast::Call(f, args) => {
                let a: Vec<String> = args.iter().map(Ast::text).collect();
                format!("{f}({})", a.join(", "))
            }
            Ast::Builtin(b, a) => format!("{b}({})", a.text()),
            Ast::Neg(a) => format!("-({})", a.text()),
            Ast::Bin(op, a, b) => format!("({} {op} {})", a.text(), b.text()),
            Ast::Pow(a, p, 1) => format!("({})^{p}", a.text()),
            Ast::Pow(a, p, q) => format!("({})^({p}/{q})", a.text()),
        }
    }

    /// Same expression with commutative operands swapped where `flip` says so.
    fn shuffled(&self, seed: u64) -> Ast {
        let bit = |k: u64| (seed.rotate_left((k % 63) as u32) ^ k) & 1 == 1;
        match self {
            Ast::Bin(op @ ('+' | '*'), a, b) => {
                let (a, b) = (a.shuffled(seed / 3 + 1), b.shuffled(seed / 5 + 7));
                if bit(seed) {
                    Ast::Bin(*op, Box::new(b), Box::new(a))
                } else {
                    Ast::Bin(*op, Box::new(a), Box::new(b))
                }
            }
            Ast::Bin(op, a, b) => Ast::Bin(*op, Box::new(a.shuffled(seed + 11)), Box::new(b.shuffled(seed + 13))),
            Ast::Neg(a) => Ast::Neg(Box::new(a.shuffled(seed + 17))),
            Ast::Pow(a, p, q) => Ast::Pow(Box::new(a.shuffled(seed + 19)), *p, *q),
            Ast::Builtin(n, a) => Ast::Builtin(n, Box::new(a.shuffled(seed + 23))),
            Ast::Call(f, args) => Ast::Call(f, args.iter().map(|a| a.shuffled(seed + 29)).collect()),
            other => other.clone(),
        }
    }
}

fn leaf() -> impl Strategy<Value = Ast> {
    prop_oneof![
        (-5i64..6).prop_map(Ast::Int),
        (-4i64..5, 2i64..5).prop_map(|(p, q)| Ast::Frac(p, q)),
        prop::sample::select(vec!["t", "x", "u", "u_x", "u_t", "gamma1"]).prop_map(Ast::Var),
        prop::sample::select(vec!["f", "g", "g_x", "f_u", "g_xu"]).prop_map(|f| Ast::Call(f, vec![Ast::Var("x"), Ast::Var("u")])),
    ]
}

fn ast() -> impl Strategy<Value = Ast> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            3 => (prop::sample::select(vec!['+', '-', '*']), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Ast::Bin(op, Box::new(a), Box::new(b))),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Bin('/', Box::new(a), Box::new(b))),
            1 => inner.clone().prop_map(|a| Ast::Neg(Box::new(a))),
            1 => (inner.clone(), 0i64..4).prop_map(|(a, p)| Ast::Pow(Box::new(a), p, 1)),
            1 => (inner.clone(), prop::sample::select(vec![(1i64, 2i64), (-1, 1), (-1, 2), (2, 3)]))
                .prop_map(|(a, (p, q))| Ast::Pow(Box::new(a), p, q)),
            1 => (prop::sample::select(vec!["exp", "ln"]), inner.clone())
                .prop_map(|(b, a)| Ast::Builtin(b, Box::new(a))),
            1 => inner.clone().prop_map(|a| Ast::Call("Phi", vec![a])),
        ]
    })
}

/// Polynomials in u_x with coefficients over x, u, f, g.
fn poly_ast() -> impl Strategy<Value = Ast> {
    let coeff = prop_oneof![
        (-5i64..6).prop_map(Ast::Int),
        prop::sample::select(vec!["x", "u", "gamma2"]).prop_map(Ast::Var),
        prop::sample::select(vec!["f", "g", "g_u"]).prop_map(|f| Ast::Call(f, vec![Ast::Var("x"), Ast::Var("u")])),
    ];
    let term = (coeff.clone(), coeff, 0i64..4).prop_map(|(a, b, k)| {
        Ast::Bin('*', Box::new(Ast::Bin('*', Box::new(a), Box::new(b))), Box::new(Ast::Pow(Box::new(Ast::Var("u_x")), k, 1)))
    });
    prop::collection::vec(term, 1..6).prop_map(|ts| {
        ts.into_iter().reduce(|a, b| Ast::Bin('+', Box::new(a), Box::new(b))).expect("nonempty")
    })
}

fn parse(s: &str) -> Option<Expr> {
    Context::point().parse(s).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn render_parse_round_trip(a in ast()) {
        if let Some(e) = parse(&a.text()) {
            let full = render(&e);
            prop_assert_eq!(parse(&full), Some(e.clone()), "full form {}", full);
            let compact = render_compact(&e);
            prop_assert_eq!(parse(&compact), Some(e.clone()), "compact form {}", compact);
            // normalization is idempotent
            prop_assert_eq!(parse(&full).map(|x| render(&x)), Some(full));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn collect_powers_reassembles(a in poly_ast()) {
        let e = parse(&a.text()).expect("polynomial parses");
        let parts = collect_powers(&e, "u_x").expect("polynomial in u_x");
        let ux = Expr::sym("u_x");
        let back: Expr = parts.iter().map(|(k, c)| c * &ux.powi(*k)).sum();
        prop_assert_eq!(back, e.clone());
        for c in parts.values() {
            prop_assert!(!c.contains_symbol("u_x"));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shuffled_trees_are_equal(a in ast(), seed in any::<u64>()) {
        if let (Some(e), Some(s)) = (parse(&a.text()), parse(&a.shuffled(seed).text())) {
            prop_assert_eq!(equals(&e, &s), Equality::ProvenEqual);
        }
    }

    #[test]
    fn differentiation_is_linear(a in ast(), b in ast(), p in -3i64..4, q in 1i64..4) {
        if let (Some(e1), Some(e2)) = (parse(&a.text()), parse(&b.text())) {
            let (k1, k2) = (Expr::int(p), Expr::frac(1, q));
            let combo = &k1 * &e1 + &k2 * &e2;
            if let (Ok(d), Ok(d1), Ok(d2)) =
                (differentiate(&combo, "x"), differentiate(&e1, "x"), differentiate(&e2, "x"))
            {
                let rhs = &k1 * &d1 + &k2 * &d2;
                prop_assert_ne!(equals(&d, &rhs), Equality::NotEqual);
            }
        }
    }

    #[test]
    fn mixed_partials_commute(a in ast()) {
        if let Some(e) = parse(&a.text()) {
            let xu = differentiate(&differentiate(&e, "x").unwrap(), "u").unwrap();
            let ux = differentiate(&differentiate(&e, "u").unwrap(), "x").unwrap();
            prop_assert_ne!(equals(&xu, &ux), Equality::NotEqual);
        }
    }
}

#[test]
fn finite_differences_agree_on_corpus() {
    let corpus = [
        "u^2*x - 3*u_x*g(x,u)",
        "f(x,u)*g(x,u)",
        "exp(x*u)/(1 + u^2)",
        "g_xu(x,u)^2 - ln(2 + x^2)",
        "(3 + x^2 + u^2)^(1/2)*f(x,u)",
        "Phi(x*u) + Psi(u - x)^2",
        "1/(4 - f(x,u)^2/10)",
    ];
    let ctx = Context::point();
    for s in corpus {
        let e = ctx.parse(s).unwrap();
        for var in ["x", "u", "u_x"] {
            let mut checked = 0;
            for seed in 0..40u64 {
                if checked == 20 {
                    break;
                }
                let b = random_binding(&[&e], seed);
                if let Ok(err) = fd_check(&e, var, &b) {
                    assert!(err < 1e-6, "{s} d/d{var} seed {seed}: {err}");
                    checked += 1;
                }
            }
            assert_eq!(checked, 20, "{s}: too many singular samples");
        }
    }
}
