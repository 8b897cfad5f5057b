//! Brackets, commutator tables, structure constants and the adjoint action.

mod adjoint;
mod sexp;
mod table;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::jetfield::{Chart, JetError, VectorField};
use crate::linalg::solve;
use crate::symkernel::normal::{Mono, Poly};
use crate::symkernel::{differentiate, render, Context, Expr, FunctionSymbol, SymError, Q};

pub use adjoint::{adjoint_series, adjoint_table, AdjointChecks, AdjointEntry, AdjointTable, Closure};
pub use sexp::SExp;
pub use table::{compare_table, render_combination, CellDiff, CellVerdict, PrintedTable, TableDiff, TableKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("basis `{0}` is not closed under the bracket")]
    NotClosed(String),
    #[error("table shape mismatch: {0}")]
    Shape(String),
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// How a bracket is expressed back in terms of a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decomposer {
    /// Rational linear combinations of fixed fields.
    ConstantSpan,
    /// `v¹_F, v²_F, v³_F, v⁴_F` with F an arbitrary function of u.
    IbeFamily,
    /// `Y¹_ξ, Y²_τ, Y³_φ` with ξ(t,x,u), τ(x,u), φ(x,u).
    EquivFamily,
}

#[derive(Clone, Debug)]
pub struct LieBasis {
    pub name: String,
    pub chart: Chart,
    pub names: Vec<String>,
    pub fields: Vec<VectorField>,
    pub decomposer: Decomposer,
    context: Context,
}

fn field(chart: &Chart, ctx: &Context, pairs: &[(&str, &str)]) -> VectorField {
    VectorField::from_pairs(
        chart.clone(),
        pairs.iter().map(|(c, e)| (*c, ctx.parse(e).expect("basis coefficient parses"))),
    )
}

impl LieBasis {
    /// Fixed fields with rational structure constants.
    pub fn constant(name: &str, chart: Chart, context: Context, named: Vec<(String, VectorField)>) -> Result<Self, LieError> {
        let mut names = Vec::new();
        let mut fields = Vec::new();
        for (n, f) in named {
            if f.chart.coords != chart.coords {
                return Err(LieError::Jet(JetError::ChartMismatch(f.chart.to_string(), chart.to_string())));
            }
            if names.contains(&n) {
                return Err(LieError::Malformed(format!("duplicate basis name {n}")));
            }
            names.push(n);
            fields.push(f);
        }
        let mut context = context;
        for n in &names {
            context.declare_symbol(n);
        }
        Ok(LieBasis {
            name: name.to_string(),
            chart,
            names,
            fields,
            decomposer: Decomposer::ConstantSpan,
            context,
        })
    }

    /// The ten-dimensional subalgebra of the equivalence algebra.
    pub fn l10() -> Self {
        let chart = Chart::equivalence();
        let ctx = Context::equivalence();
        let specs: [&[(&str, &str)]; 10] = [
            &[("t", "1")],
            &[("x", "1")],
            &[("u", "1")],
            &[("t", "t"), ("f", "-f"), ("g", "-g")],
            &[("t", "x"), ("f", "-f*g"), ("g", "-g^2")],
            &[("t", "u"), ("f", "-f^2"), ("g", "-f*g")],
            &[("x", "x"), ("g", "g")],
            &[("x", "u"), ("g", "f")],
            &[("u", "x"), ("f", "g")],
            &[("u", "u"), ("f", "f")],
        ];
        let named = specs
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("X{}", i + 1), field(&chart, &ctx, p)))
            .collect();
        LieBasis::constant("l10", chart, ctx, named).expect("L10 basis is well formed")
    }

    /// Generic members of the inviscid point-symmetry families, parameterized by F1..F4.
    pub fn ibe() -> Self {
        let mut context = Context::ibe();
        let names: Vec<String> = (1..=4).map(|i| format!("v{i}")).collect();
        for n in &names {
            context.declare_symbol(n);
        }
        let mut b = LieBasis {
            name: "ibe".into(),
            chart: Chart::point(),
            names,
            fields: Vec::new(),
            decomposer: Decomposer::IbeFamily,
            context,
        };
        b.fields = (0..4)
            .map(|k| {
                let p = b.context.call(&format!("F{}", k + 1));
                b.member(k, &p)
            })
            .collect();
        b
    }

    /// Generic members of the equivalence families with ξ(t,x,u), τ(x,u), φ(x,u).
    pub fn equiv() -> Self {
        let mut context = Context::equivalence();
        context.declare_function(FunctionSymbol::opaque("tau", &["x", "u"]));
        context.declare_function(FunctionSymbol::opaque("phi", &["x", "u"]));
        let names: Vec<String> = (1..=3).map(|i| format!("Y{i}")).collect();
        for n in &names {
            context.declare_symbol(n);
        }
        let mut b = LieBasis {
            name: "equiv".into(),
            chart: Chart::equivalence(),
            names,
            fields: Vec::new(),
            decomposer: Decomposer::EquivFamily,
            context,
        };
        b.fields = ["xi", "tau", "phi"]
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let p = b.context.call(n);
                b.member(k, &p)
            })
            .collect();
        b
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "l10" => Some(LieBasis::l10()),
            "ibe" => Some(LieBasis::ibe()),
            "equiv" => Some(LieBasis::equiv()),
            _ => None,
        }
    }

    /// Parsing context with the basis names declared as symbols.
    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The field contributed by coefficient `param` at basis position `k`:
    /// `param · X_k` for fixed fields, the family member with that function otherwise.
    pub fn member(&self, k: usize, param: &Expr) -> VectorField {
        let p = |s: &str| self.context.parse(s).expect("family template parses");
        let d = |v: &str| differentiate(param, v).expect("family parameter is differentiable");
        match self.decomposer {
            Decomposer::ConstantSpan => self.fields[k].scale(param),
            Decomposer::IbeFamily => {
                let pairs: Vec<(&str, Expr)> = match k {
                    0 => vec![("t", param.clone())],
                    1 => vec![("t", param * Expr::sym("t")), ("x", param * Expr::sym("x"))],
                    2 => vec![("x", param.clone())],
                    _ => vec![("x", param * p("g_u") * Expr::sym("t")), ("u", param.clone())],
                };
                VectorField::from_pairs(Chart::point(), pairs)
            }
            Decomposer::EquivFamily => {
                let (f, g) = (Expr::sym("f"), Expr::sym("g"));
                let pairs: Vec<(&str, Expr)> = match k {
                    0 => {
                        let inner = &g * d("x") + d("t") + &f * d("u");
                        vec![("t", param.clone()), ("f", -(&f * &inner)), ("g", -(&g * &inner))]
                    }
                    1 => vec![("x", param.clone()), ("g", &g * d("x") + &f * d("u"))],
                    _ => vec![("u", param.clone()), ("f", &g * d("x") + &f * d("u"))],
                };
                VectorField::from_pairs(Chart::equivalence(), pairs)
            }
        }
    }

    /// Σ member(k, coeffs[k]).
    pub fn combine(&self, coeffs: &[Expr]) -> Result<VectorField, LieError> {
        let mut out = VectorField::zero(self.chart.clone());
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.member(k, c))?;
            }
        }
        Ok(out)
    }

    /// Expresses `w` over the basis; the residual is what the combination misses.
    pub fn decompose(&self, w: &VectorField) -> Result<BracketCell, LieError> {
        let coeffs = match self.decomposer {
            Decomposer::ConstantSpan => self.solve_constant(w),
            Decomposer::IbeFamily => {
                let c4 = w.coeff("u");
                let rest = w.sub(&self.member(3, &c4))?;
                let b = rest.coeff("x");
                let c2 = differentiate(&b, "x")?;
                let c3 = &b - &c2 * Expr::sym("x");
                let c1 = rest.coeff("t") - &c2 * Expr::sym("t");
                let coeffs = vec![c1, c2, c3, c4];
                coeffs
                    .iter()
                    .all(|c| !c.contains_symbol("t") && !c.contains_symbol("x"))
                    .then_some(coeffs)
            }
            Decomposer::EquivFamily => {
                let coeffs = vec![w.coeff("t"), w.coeff("x"), w.coeff("u")];
                let on_fiber = |c: &Expr| !c.contains_symbol("f") && !c.contains_symbol("g");
                (on_fiber(&coeffs[0]) && coeffs[1..].iter().all(|c| on_fiber(c) && !c.contains_symbol("t"))).then_some(coeffs)
            }
        };
        let Some(coeffs) = coeffs else {
            return Ok(BracketCell {
                coeffs: vec![Expr::zero(); self.len()],
                residual: Some(w.clone()),
            });
        };
        let residual = w.sub(&self.combine(&coeffs)?)?;
        Ok(if residual.is_zero() {
            BracketCell { coeffs, residual: None }
        } else {
            BracketCell {
                coeffs: vec![Expr::zero(); self.len()],
                residual: Some(w.clone()),
            }
        })
    }

    fn solve_constant(&self, w: &VectorField) -> Option<Vec<Expr>> {
        let keyed = |v: &VectorField| -> Vec<((String, Mono), Q)> {
            v.coeffs()
                .iter()
                .flat_map(|(c, e)| Poly::of(e).terms.into_iter().map(move |(m, q)| ((c.clone(), m), q)))
                .collect()
        };
        let mut keys: Vec<(String, Mono)> = Vec::new();
        let columns: Vec<Vec<((String, Mono), Q)>> = self.fields.iter().map(keyed).collect();
        let target = keyed(w);
        for (k, _) in columns.iter().flatten().chain(target.iter()) {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
        let n = self.len();
        let mut a = vec![vec![Q::zero(); n]; keys.len()];
        let mut b = vec![Q::zero(); keys.len()];
        for (j, col) in columns.iter().enumerate() {
            for (k, q) in col {
                let r = keys.iter().position(|x| x == k).expect("key registered");
                a[r][j] = q.clone();
            }
        }
        for (k, q) in &target {
            let r = keys.iter().position(|x| x == k).expect("key registered");
            b[r] = q.clone();
        }
        solve(&a, &b, n).map(|x| x.into_iter().map(Expr::num).collect())
    }
}

/// `[v, w]` with i-th coefficient `v(w_i) − w(v_i)`.
pub fn bracket(v: &VectorField, w: &VectorField) -> Result<VectorField, LieError> {
    if v.chart.coords != w.chart.coords {
        return Err(LieError::Jet(JetError::ChartMismatch(v.chart.to_string(), w.chart.to_string())));
    }
    let mut out = VectorField::zero(v.chart.clone());
    for c in &v.chart.coords {
        let e = v.apply(&w.coeff(c))? - w.apply(&v.coeff(c))?;
        out.set(c, e);
    }
    Ok(out)
}

/// `[u,[v,w]] + [v,[w,u]] + [w,[u,v]]`.
pub fn jacobiator(u: &VectorField, v: &VectorField, w: &VectorField) -> Result<VectorField, LieError> {
    let a = bracket(u, &bracket(v, w)?)?;
    let b = bracket(v, &bracket(w, u)?)?;
    let c = bracket(w, &bracket(u, v)?)?;
    Ok(a.add(&b)?.add(&c)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketCell {
    /// Coefficient per basis element; all zero when not closed.
    pub coeffs: Vec<Expr>,
    /// The bracket itself when it leaves the span.
    pub residual: Option<VectorField>,
}

impl BracketCell {
    pub fn closed(&self) -> bool {
        self.residual.is_none()
    }

    /// Rational coefficients, when every coefficient is a number.
    pub fn rational(&self) -> Option<Vec<Q>> {
        if !self.closed() {
            return None;
        }
        self.coeffs.iter().map(|c| if c.is_zero() { Some(Q::zero()) } else { c.as_num().cloned() }).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CommutatorTable {
    pub basis: LieBasis,
    pub cells: Vec<Vec<BracketCell>>,
}

pub fn commutator_table(basis: &LieBasis) -> Result<CommutatorTable, LieError> {
    let mut cells = Vec::with_capacity(basis.len());
    for v in &basis.fields {
        let mut row = Vec::with_capacity(basis.len());
        for w in &basis.fields {
            row.push(basis.decompose(&bracket(v, w)?)?);
        }
        cells.push(row);
    }
    Ok(CommutatorTable {
        basis: basis.clone(),
        cells,
    })
}

/// `c[i][j][k]`: coefficient of `X_k` in `[X_i, X_j]`.
pub type StructureConstants = Vec<Vec<Vec<Q>>>;

impl CommutatorTable {
    pub fn closed_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.closed()).count()
    }

    pub fn structure_constants(&self) -> Result<StructureConstants, LieError> {
        self.cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.rational().ok_or_else(|| LieError::NotClosed(self.basis.name.clone())))
                    .collect()
            })
            .collect()
    }

    pub fn render_cell(&self, i: usize, j: usize) -> String {
        let c = &self.cells[i][j];
        match &c.residual {
            None => render_combination(&self.basis, &c.coeffs),
            Some(r) => format!("not closed: {r}"),
        }
    }

    pub fn to_json(&self) -> Value {
        let n = self.basis.len();
        json!({
            "schema": "nibsym.table/1",
            "algebra": self.basis.name,
            "kind": "commutator",
            "basis": self.basis.names,
            "fields": self.basis.fields.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            "closed": self.closed_count() == n * n,
            "cells": (0..n).map(|i| (0..n).map(|j| {
                let c = &self.cells[i][j];
                json!({
                    "value": self.render_cell(i, j),
                    "closed": c.closed(),
                    "coefficients": c.coeffs.iter().map(render).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn to_markdown(&self) -> String {
        let n = self.basis.len();
        let mut s = format!("| [row, col] | {} |\n|---|{}\n", self.basis.names.join(" | "), "---|".repeat(n));
        for i in 0..n {
            let cells: Vec<String> = (0..n).map(|j| self.render_cell(i, j)).collect();
            s.push_str(&format!("| {} | {} |\n", self.basis.names[i], cells.join(" | ")));
        }
        s
    }

    /// Pairs whose brackets are not exactly antisymmetric.
    pub fn antisymmetry_failures(&self) -> Result<Vec<(usize, usize)>, LieError> {
        let f = &self.basis.fields;
        let mut out = Vec::new();
        for i in 0..f.len() {
            for j in 0..f.len() {
                if !bracket(&f[i], &f[j])?.add(&bracket(&f[j], &f[i])?)?.is_zero() || self.cells[i][j].coeffs != negate(&self.cells[j][i].coeffs) {
                    out.push((i, j));
                }
            }
        }
        Ok(out)
    }

    /// Triples `i < j < k` violating the Jacobi identity.
    pub fn jacobi_failures(&self) -> Result<Vec<(usize, usize, usize)>, LieError> {
        let f = &self.basis.fields;
        let mut out = Vec::new();
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                for k in j + 1..f.len() {
                    if !jacobiator(&f[i], &f[j], &f[k])?.is_zero() {
                        out.push((i, j, k));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn negate(v: &[Expr]) -> Vec<Expr> {
    v.iter().map(|e| -e).collect()
}

/// The printed table for `algebra` and `kind`, as bundled.
pub fn printed_table(basis: &LieBasis, kind: TableKind) -> Result<PrintedTable, LieError> {
    let doc = match (basis.name.as_str(), kind) {
        ("ibe", TableKind::Commutator) => "table1",
        ("equiv", TableKind::Commutator) => "table2",
        ("l10", TableKind::Commutator) => "table3",
        ("l10", TableKind::Adjoint) => "table4",
        (a, k) => return Err(LieError::Malformed(format!("no printed {k:?} table for {a}"))),
    };
    PrintedTable::from_json(&crate::paperdata::document(doc).expect("bundled document"), basis)
}
