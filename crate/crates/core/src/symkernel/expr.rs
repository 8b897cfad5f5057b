use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::normal::{self, Poly};

/// Exact rational scalar used for every numeric constant inside an expression.
pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Immutable symbolic expression, always held in normal form.
#[derive(Clone)]
pub struct Expr(pub(crate) Arc<Node>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Q),
    Sym(Arc<str>),
    Apply(Apply),
    Builtin(Builtin, Expr),
    Pow(Expr, Q),
    Mul(Vec<Expr>),
    Add(Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Exp,
    Ln,
    LambertW,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
            Builtin::LambertW => "lambertw",
        }
    }
}

/// How a function symbol differentiates with respect to one argument position.
#[derive(Clone, Debug)]
pub enum DerivRule {
    /// The derivative is a new opaque atom (`g` → `g_x`).
    Opaque,
    /// The derivative is a known expression in the parameter symbols.
    Explicit(Expr),
    /// The derivative is not available symbolically.
    Unknown,
}

#[derive(Debug)]
pub struct FunctionSymbol {
    pub name: Arc<str>,
    pub params: Vec<Arc<str>>,
    pub rules: Vec<DerivRule>,
}

impl FunctionSymbol {
    pub fn opaque(name: &str, params: &[&str]) -> Arc<Self> {
        Arc::new(FunctionSymbol {
            name: name.into(),
            params: params.iter().map(|p| Arc::from(*p)).collect(),
            rules: params.iter().map(|_| DerivRule::Opaque).collect(),
        })
    }

    pub fn with_rules(name: &str, params: &[&str], rules: Vec<DerivRule>) -> Arc<Self> {
        assert_eq!(params.len(), rules.len());
        Arc::new(FunctionSymbol {
            name: name.into(),
            params: params.iter().map(|p| Arc::from(*p)).collect(),
            rules,
        })
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// Subscript naming of a derived symbol: `g` with counts (1,1) is `g_xu`.
    pub fn derived_name(&self, derivs: &[u16]) -> String {
        let mut s = self.name.to_string();
        if derivs.iter().any(|&d| d > 0) {
            s.push('_');
            for (p, &d) in self.params.iter().zip(derivs) {
                for _ in 0..d {
                    s.push_str(p);
                }
            }
        }
        s
    }

    /// Parses a subscript like `xu` into derivative counts.
    pub fn parse_suffix(&self, suffix: &str) -> Option<Vec<u16>> {
        let mut counts = vec![0u16; self.params.len()];
        let mut rest = suffix;
        'outer: while !rest.is_empty() {
            for (i, p) in self.params.iter().enumerate() {
                if rest.starts_with(&**p) {
                    counts[i] += 1;
                    rest = &rest[p.len()..];
                    continue 'outer;
                }
            }
            return None;
        }
        Some(counts)
    }

    pub fn default_args(&self) -> Vec<Expr> {
        self.params.iter().map(|p| Expr::sym(p)).collect()
    }
}

impl PartialEq for FunctionSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.params == other.params
    }
}
impl Eq for FunctionSymbol {}
impl PartialOrd for FunctionSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FunctionSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name).then_with(|| self.params.cmp(&other.params))
    }
}
impl Hash for FunctionSymbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.params.hash(state);
    }
}

/// Application of an (optionally differentiated) function symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Apply {
    pub func: Arc<FunctionSymbol>,
    pub derivs: Vec<u16>,
    pub args: Vec<Expr>,
}

impl Apply {
    pub fn is_default_args(&self) -> bool {
        self.args.len() == self.func.params.len()
            && self
                .args
                .iter()
                .zip(&self.func.params)
                .all(|(a, p)| a.as_sym() == Some(&**p))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Expr {}
impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}
impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}
impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

impl Expr {
    pub(crate) fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(q: Q) -> Expr {
        Expr::from_node(Node::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(q_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(q_frac(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::from_node(Node::Sym(name.into()))
    }

    /// Application of `func` (differentiated `derivs` times per position) to `args`.
    pub fn apply(func: &Arc<FunctionSymbol>, derivs: Vec<u16>, args: Vec<Expr>) -> Expr {
        assert_eq!(args.len(), func.arity(), "arity mismatch for {}", func.name);
        assert_eq!(derivs.len(), func.arity());
        Expr::from_node(Node::Apply(Apply {
            func: func.clone(),
            derivs,
            args,
        }))
    }

    /// `func` applied to its own parameter symbols.
    pub fn call(func: &Arc<FunctionSymbol>) -> Expr {
        Expr::apply(func, vec![0; func.arity()], func.default_args())
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self.node() {
            Node::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_apply(&self) -> Option<&Apply> {
        match self.node() {
            Node::Apply(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_one())
    }

    pub fn exp(&self) -> Expr {
        normal::exp(self)
    }

    pub fn ln(&self) -> Expr {
        normal::ln(self)
    }

    pub fn lambertw(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        Expr::from_node(Node::Builtin(Builtin::LambertW, self.clone()))
    }

    pub fn pow_q(&self, q: &Q) -> Expr {
        normal::pow(self, q)
    }

    pub fn powi(&self, n: i64) -> Expr {
        normal::pow(self, &q_int(n))
    }

    /// General power; non-constant exponents become `exp(e*ln(base))`.
    pub fn pow_expr(&self, e: &Expr) -> Expr {
        match e.as_num() {
            Some(q) => self.pow_q(q),
            None => (e * &self.ln()).exp(),
        }
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub(crate) fn poly(&self) -> Poly {
        Poly::of(self)
    }

    /// Immediate children in the tree.
    pub fn children(&self) -> Vec<Expr> {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => vec![],
            Node::Apply(a) => a.args.clone(),
            Node::Builtin(_, e) => vec![e.clone()],
            Node::Pow(b, _) => vec![b.clone()],
            Node::Mul(v) | Node::Add(v) => v.clone(),
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(s) => &**s == name,
            Node::Apply(a) => a.args.iter().any(|e| e.contains_symbol(name)),
            Node::Builtin(_, e) | Node::Pow(e, _) => e.contains_symbol(name),
            Node::Mul(v) | Node::Add(v) => v.iter().any(|e| e.contains_symbol(name)),
        }
    }

    pub fn contains(&self, sub: &Expr) -> bool {
        if self == sub {
            return true;
        }
        self.children().iter().any(|c| c.contains(sub))
    }

    /// Depends on `name` directly or through an opaque function whose arguments mention it.
    pub fn depends_on(&self, name: &str) -> bool {
        self.contains_symbol(name)
    }

    pub fn free_symbols(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut std::collections::BTreeSet<String>) {
        match self.node() {
            Node::Sym(s) => {
                out.insert(s.to_string());
            }
            _ => {
                for c in self.children() {
                    c.collect_symbols(out);
                }
            }
        }
    }

    /// Every function symbol used, keyed by name.
    pub fn functions(&self) -> std::collections::BTreeMap<String, Arc<FunctionSymbol>> {
        let mut out = std::collections::BTreeMap::new();
        self.collect_functions(&mut out);
        out
    }

    fn collect_functions(&self, out: &mut std::collections::BTreeMap<String, Arc<FunctionSymbol>>) {
        if let Node::Apply(a) = self.node() {
            out.insert(a.func.name.to_string(), a.func.clone());
            if let Some(DerivRule::Explicit(rule)) = a.func.rules.iter().find(|r| matches!(r, DerivRule::Explicit(_))) {
                rule.collect_functions(out);
            }
        }
        for c in self.children() {
            c.collect_functions(out);
        }
    }

    pub fn contains_builtin(&self, kind: Builtin) -> bool {
        match self.node() {
            Node::Builtin(k, e) => *k == kind || e.contains_builtin(kind),
            _ => self.children().iter().any(|c| c.contains_builtin(kind)),
        }
    }

    /// True when a `0^(-q)` marker from a division by zero is present.
    pub fn has_division_by_zero(&self) -> bool {
        match self.node() {
            Node::Pow(b, q) if b.is_zero() && *q < Q::zero() => true,
            _ => self.children().iter().any(|c| c.has_division_by_zero()),
        }
    }

    /// Number of top-level terms.
    pub fn term_count(&self) -> usize {
        match self.node() {
            Node::Add(v) => v.len(),
            Node::Num(q) if q.is_zero() => 0,
            _ => 1,
        }
    }

    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Add(v) => v.clone(),
            Node::Num(q) if q.is_zero() => vec![],
            _ => vec![self.clone()],
        }
    }

    /// Splits a term into its rational coefficient and the remaining factor.
    pub fn split_coefficient(&self) -> (Q, Expr) {
        match self.node() {
            Node::Num(q) => (q.clone(), Expr::one()),
            Node::Mul(v) => match v[0].as_num() {
                Some(q) => {
                    let rest: Vec<Expr> = v[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest[0].clone()
                    } else {
                        Expr::from_node(Node::Mul(rest))
                    };
                    (q.clone(), rest)
                }
                None => (Q::one(), self.clone()),
            },
            _ => (Q::one(), self.clone()),
        }
    }

    /// If `self = c * other` for a nonzero rational `c`, returns `c`.
    pub fn rational_multiple_of(&self, other: &Expr) -> Option<Q> {
        let a = self.poly();
        let b = other.poly();
        a.rational_multiple_of(&b)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:path) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, normal::add);
binop!(Sub, sub, normal::sub);
binop!(Mul, mul, normal::mul);
binop!(Div, div, normal::div);

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        normal::scale(self, &q_int(-1))
    }
}
impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut p = Poly::zero();
        for e in iter {
            p.add_assign(&e.poly());
        }
        normal::finish(p)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(q: Q) -> Expr {
        Expr::num(q)
    }
}
