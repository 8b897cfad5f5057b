use serde::Serialize;
use serde_json::{json, Value};

use super::{AdjointTable, CommutatorTable, Decomposer, LieBasis, LieError};
use crate::symkernel::{differentiate, equals, render_compact, substitute, Bindings, Equality, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    Commutator,
    Adjoint,
}

/// A printed table: each cell a linear combination over the basis.
#[derive(Clone, Debug)]
pub struct PrintedTable {
    pub algebra: String,
    pub kind: TableKind,
    pub basis: Vec<String>,
    pub cells: Vec<Vec<Vec<Expr>>>,
    pub source: Vec<Vec<String>>,
}

impl PrintedTable {
    /// Reads `{"algebra", "kind", "basis", "cells": [[string]]}`; cells are
    /// written linearly in the basis names, e.g. `X10 - X6` or `F1*F2*v1`.
    pub fn from_json(v: &Value, basis: &LieBasis) -> Result<Self, LieError> {
        let str_field = |k: &str| {
            v.get(k)
                .and_then(Value::as_str)
                .ok_or_else(|| LieError::Malformed(format!("missing `{k}`")))
        };
        let algebra = str_field("algebra")?.to_string();
        let kind = match str_field("kind")? {
            "commutator" => TableKind::Commutator,
            "adjoint" => TableKind::Adjoint,
            other => return Err(LieError::Malformed(format!("unknown kind {other}"))),
        };
        let names: Vec<String> = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| LieError::Malformed("missing `basis`".into()))?
            .iter()
            .map(|n| n.as_str().map(str::to_string).ok_or_else(|| LieError::Malformed("basis name".into())))
            .collect::<Result<_, _>>()?;
        if names != basis.names {
            return Err(LieError::Shape(format!("basis {:?} vs {:?}", names, basis.names)));
        }
        let rows = v
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| LieError::Malformed("missing `cells`".into()))?;
        let mut cells = Vec::new();
        let mut source = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| LieError::Malformed("row".into()))?;
            if row.len() != names.len() {
                return Err(LieError::Shape(format!("row of length {} in a {}-basis table", row.len(), names.len())));
            }
            let mut out = Vec::new();
            let mut src = Vec::new();
            for c in row {
                let s = c.as_str().ok_or_else(|| LieError::Malformed("cell".into()))?;
                out.push(linear_coefficients(&basis.context().parse(s)?, &names)?);
                src.push(s.to_string());
            }
            cells.push(out);
            source.push(src);
        }
        if cells.len() != names.len() {
            return Err(LieError::Shape(format!("{} rows in a {}-basis table", cells.len(), names.len())));
        }
        Ok(PrintedTable {
            algebra,
            kind,
            basis: names,
            cells,
            source,
        })
    }
}

fn linear_coefficients(e: &Expr, names: &[String]) -> Result<Vec<Expr>, LieError> {
    let coeffs: Vec<Expr> = names.iter().map(|n| differentiate(e, n)).collect::<Result<_, _>>()?;
    let rebuilt: Expr = coeffs.iter().zip(names).map(|(c, n)| c * Expr::sym(n)).sum();
    if coeffs.iter().any(|c| names.iter().any(|n| c.contains_symbol(n))) || rebuilt != *e {
        return Err(LieError::Malformed(format!("cell `{}` is not linear in the basis", render_compact(e))));
    }
    Ok(coeffs)
}

/// `c1 X1 + c2 X2 ...` for fixed fields, `v1[c1] + ...` for function families.
pub fn render_combination(basis: &LieBasis, coeffs: &[Expr]) -> String {
    let family = basis.decomposer != Decomposer::ConstantSpan;
    let mut out = String::new();
    for (c, n) in coeffs.iter().zip(&basis.names) {
        if c.is_zero() {
            continue;
        }
        let (neg, mag) = match c.split_coefficient() {
            (k, _) if k < num_traits::Zero::zero() => (true, -c),
            _ => (false, c.clone()),
        };
        let term = if family {
            format!("{n}[{}]", render_compact(&mag))
        } else if mag.is_one() {
            n.clone()
        } else if mag.term_count() > 1 {
            format!("({}) {n}", render_compact(&mag))
        } else {
            format!("{} {n}", render_compact(&mag))
        };
        if out.is_empty() {
            out = if neg { format!("-{term}") } else { term };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellVerdict {
    Match,
    MatchUnderSNegation,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellDiff {
    pub row: String,
    pub col: String,
    pub verdict: CellVerdict,
    pub computed: String,
    pub printed: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableDiff {
    pub algebra: String,
    pub kind: TableKind,
    pub cells: Vec<CellDiff>,
}

impl TableDiff {
    pub fn count(&self, v: CellVerdict) -> usize {
        self.cells.iter().filter(|c| c.verdict == v).count()
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CellDiff> {
        self.cells.iter().filter(|c| c.verdict != CellVerdict::Match)
    }

    pub fn cell(&self, row: &str, col: &str) -> Option<&CellDiff> {
        self.cells.iter().find(|c| c.row == row && c.col == col)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra,
            "kind": self.kind,
            "summary": {
                "cells": self.cells.len(),
                "match": self.count(CellVerdict::Match),
                "match_under_s_negation": self.count(CellVerdict::MatchUnderSNegation),
                "mismatch": self.count(CellVerdict::Mismatch),
            },
            "differences": self.mismatches().collect::<Vec<_>>(),
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "{} cells: {} match, {} match under s -> -s, {} mismatch\n",
            self.cells.len(),
            self.count(CellVerdict::Match),
            self.count(CellVerdict::MatchUnderSNegation),
            self.count(CellVerdict::Mismatch)
        );
        let diffs: Vec<&CellDiff> = self.mismatches().collect();
        if !diffs.is_empty() {
            s.push_str("\n| cell | verdict | computed | printed |\n|---|---|---|---|\n");
            for d in diffs {
                let v = match d.verdict {
                    CellVerdict::Match => "match",
                    CellVerdict::MatchUnderSNegation => "match under s -> -s",
                    CellVerdict::Mismatch => "mismatch",
                };
                s.push_str(&format!("| ({}, {}) | {v} | `{}` | `{}` |\n", d.row, d.col, d.computed, d.printed));
            }
        }
        s
    }
}

fn same(a: &[Expr], b: &[Expr]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| x == y || equals(x, y) == Equality::ProvenEqual)
}

/// A computed table to diff against a printed one.
pub enum Computed<'a> {
    Commutator(&'a CommutatorTable),
    Adjoint(&'a AdjointTable),
}

impl<'a> From<&'a CommutatorTable> for Computed<'a> {
    fn from(t: &'a CommutatorTable) -> Self {
        Computed::Commutator(t)
    }
}

impl<'a> From<&'a AdjointTable> for Computed<'a> {
    fn from(t: &'a AdjointTable) -> Self {
        Computed::Adjoint(t)
    }
}

pub fn compare_table<'a>(computed: impl Into<Computed<'a>>, printed: &PrintedTable) -> Result<TableDiff, LieError> {
    let computed = computed.into();
    let (basis, kind) = match &computed {
        Computed::Commutator(t) => (&t.basis, TableKind::Commutator),
        Computed::Adjoint(t) => (&t.basis, TableKind::Adjoint),
    };
    if kind != printed.kind || basis.names != printed.basis {
        return Err(LieError::Shape(format!(
            "computed {} {:?} vs printed {} {:?}",
            basis.name, kind, printed.algebra, printed.kind
        )));
    }
    let mut negate = Bindings::new();
    negate.insert(Expr::sym("s"), -Expr::sym("s"));
    let n = basis.len();
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (coeffs, rendered) = match &computed {
                Computed::Commutator(t) => (t.cells[i][j].coeffs.clone(), t.render_cell(i, j)),
                Computed::Adjoint(t) => (t.entries[i][j].as_exprs(), t.render_cell(i, j)),
            };
            let want = &printed.cells[i][j];
            let verdict = if same(&coeffs, want) {
                CellVerdict::Match
            } else if kind == TableKind::Adjoint
                && same(&coeffs.iter().map(|c| substitute(c, &negate)).collect::<Vec<_>>(), want)
            {
                CellVerdict::MatchUnderSNegation
            } else {
                CellVerdict::Mismatch
            };
            cells.push(CellDiff {
                row: basis.names[i].clone(),
                col: basis.names[j].clone(),
                verdict,
                computed: rendered,
                printed: render_combination(basis, want),
            });
        }
    }
    Ok(TableDiff {
        algebra: basis.name.clone(),
        kind,
        cells,
    })
}
