use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::expr::{DerivRule, Expr, FunctionSymbol};
use super::{parse, SymError};

/// Declared symbols and function symbols available to the parser.
#[derive(Clone, Debug, Default)]
pub struct Context {
    symbols: BTreeSet<String>,
    functions: BTreeMap<String, Arc<FunctionSymbol>>,
}

const JETS: [&str; 5] = ["u_t", "u_x", "u_tt", "u_tx", "u_xx"];

fn parameters() -> Vec<String> {
    let mut out: Vec<String> = ["alpha1", "alpha2", "beta1", "s", "lam", "pm", "g0", "k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    out.extend((1..=6).map(|i| format!("gamma{i}")));
    out.extend((1..=5).map(|i| format!("eta{i}")));
    out.extend((1..=3).map(|i| format!("c{i}")));
    out.extend((1..=10).map(|i| format!("a{i}")));
    out
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Point chart (t, x, u) with jets, the classification parameters and
    /// the opaque functions f, g, xi, tau, phi, F1..F4, Phi, Psi.
    pub fn point() -> Self {
        let mut c = Context::new();
        c.declare_symbols(&["t", "x", "u"]);
        c.declare_symbols(&JETS);
        for p in parameters() {
            c.declare_symbol(&p);
        }
        c.declare_function(FunctionSymbol::opaque("f", &["x", "u"]));
        c.declare_function(FunctionSymbol::opaque("g", &["x", "u"]));
        for n in ["xi", "tau", "phi"] {
            c.declare_function(FunctionSymbol::opaque(n, &["t", "x", "u"]));
        }
        for i in 1..=4 {
            c.declare_function(FunctionSymbol::opaque(&format!("F{i}"), &["u"]));
        }
        c.declare_function(FunctionSymbol::opaque("Phi", &["l"]));
        c.declare_function(FunctionSymbol::opaque("Psi", &["l"]));
        c
    }

    /// Point chart for the inviscid family, where the speed depends on u only.
    pub fn ibe() -> Self {
        let mut c = Context::point();
        c.declare_function(FunctionSymbol::opaque("g", &["u"]));
        c
    }

    /// Point chart for the homogeneous family with the antiderivative atom `P`
    /// of `exp(g)` in x. When g depends on u, the u-derivative of `P(x,u)` is unknown.
    pub fn homogeneous(g_depends_on_u: bool) -> Self {
        let mut c = Context::point();
        if g_depends_on_u {
            c.declare_function(FunctionSymbol::opaque("g", &["x", "u"]));
            let g = c.call("g");
            c.declare_function(FunctionSymbol::with_rules(
                "P",
                &["x", "u"],
                vec![DerivRule::Explicit(g.exp()), DerivRule::Unknown],
            ));
        } else {
            c.declare_function(FunctionSymbol::opaque("g", &["x"]));
            let g = c.call("g");
            c.declare_function(FunctionSymbol::with_rules("P", &["x"], vec![DerivRule::Explicit(g.exp())]));
        }
        c
    }

    /// Extended chart (t, x, u, f, g) where f and g are coordinates and
    /// their first derivatives are independent jet symbols.
    pub fn equivalence() -> Self {
        let mut c = Context::new();
        c.declare_symbols(&["t", "x", "u", "f", "g"]);
        c.declare_symbols(&JETS);
        c.declare_symbols(&["f_t", "f_x", "f_u", "g_t", "g_x", "g_u"]);
        for p in parameters() {
            c.declare_symbol(&p);
        }
        for n in ["xi", "tau", "phi"] {
            c.declare_function(FunctionSymbol::opaque(n, &["t", "x", "u"]));
        }
        for n in ["chi", "eta"] {
            c.declare_function(FunctionSymbol::opaque(n, &["t", "x", "u", "f", "g"]));
        }
        c
    }

    /// Fiber chart (x, u, f, g) on which projected operators act.
    pub fn fiber() -> Self {
        let mut c = Context::new();
        c.declare_symbols(&["t", "x", "u", "f", "g"]);
        for p in parameters() {
            c.declare_symbol(&p);
        }
        c.declare_function(FunctionSymbol::opaque("Phi", &["l"]));
        c.declare_function(FunctionSymbol::opaque("Psi", &["l"]));
        c
    }

    pub fn declare_symbol(&mut self, name: &str) {
        self.symbols.insert(name.to_string());
    }

    pub fn declare_symbols(&mut self, names: &[&str]) {
        for n in names {
            self.declare_symbol(n);
        }
    }

    /// Declares (or replaces) a function symbol.
    pub fn declare_function(&mut self, f: Arc<FunctionSymbol>) {
        self.functions.insert(f.name.to_string(), f);
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.symbols.contains(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(|s| s.as_str())
    }

    pub fn function(&self, name: &str) -> Option<&Arc<FunctionSymbol>> {
        self.functions.get(name)
    }

    pub fn functions(&self) -> impl Iterator<Item = &Arc<FunctionSymbol>> {
        self.functions.values()
    }

    /// Resolves `g_xu` to the function `g` with derivative counts.
    pub fn resolve_derived(&self, name: &str) -> Option<(Arc<FunctionSymbol>, Vec<u16>)> {
        let (base, suffix) = name.split_once('_')?;
        let f = self.functions.get(base)?;
        let counts = f.parse_suffix(suffix)?;
        Some((f.clone(), counts))
    }

    /// The declared symbol `name`.
    ///
    /// # Panics
    /// When `name` is not declared.
    pub fn var(&self, name: &str) -> Expr {
        assert!(self.has_symbol(name), "undeclared symbol {name}");
        Expr::sym(name)
    }

    /// `name` applied to its parameter symbols.
    ///
    /// # Panics
    /// When `name` is not a declared function.
    pub fn call(&self, name: &str) -> Expr {
        let f = self.functions.get(name).unwrap_or_else(|| panic!("undeclared function {name}"));
        Expr::call(f)
    }

    pub fn parse(&self, text: &str) -> Result<Expr, SymError> {
        parse::parse(self, text)
    }
}
