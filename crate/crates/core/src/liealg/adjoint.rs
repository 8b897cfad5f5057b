use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::sexp::SExp;
use super::{render_combination, CommutatorTable, LieBasis, LieError, StructureConstants};
use crate::linalg::solve;
use crate::symkernel::{q_int, Expr, Q};

/// How the Lie series was summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// `ad^order` annihilates the target.
    Nilpotent { order: usize },
    /// Summed exactly over rational eigenvalues; `order` is the recurrence length.
    Exponential { order: usize },
    /// Partial sum through `s^order`.
    Truncated { order: usize },
}

impl Closure {
    pub fn is_closed(self) -> bool {
        !matches!(self, Closure::Truncated { .. })
    }

    pub fn label(self) -> String {
        match self {
            Closure::Nilpotent { order } => format!("nilpotent({order})"),
            Closure::Exponential { order } => format!("exponential({order})"),
            Closure::Truncated { order } => format!("truncated({order})"),
        }
    }
}

/// `Ad(exp(s·X_acting)) X_target = Σ_k coeffs[k](s) X_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointEntry {
    pub acting: usize,
    pub target: usize,
    pub coeffs: Vec<SExp>,
    pub closure: Closure,
}

impl AdjointEntry {
    pub fn as_exprs(&self) -> Vec<Expr> {
        self.coeffs.iter().map(SExp::to_expr).collect()
    }
}

fn ad_matrix(sc: &StructureConstants, i: usize) -> Vec<Vec<Q>> {
    let n = sc.len();
    (0..n).map(|r| (0..n).map(|j| sc[i][j][r].clone()).collect()).collect()
}

fn mat_vec(a: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000 {
        return None;
    }
    Some((1..=n).filter(|d| n % d == 0).map(BigInt::from).collect())
}

/// Rational roots with multiplicity of `Σ coeffs[k] λ^k`, or `None` when some root is irrational.
fn rational_roots(coeffs: &[Q]) -> Option<Vec<(Q, usize)>> {
    let mut p: Vec<Q> = coeffs.to_vec();
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut roots: Vec<(Q, usize)> = Vec::new();
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push((Q::zero(), zeros));
        p.drain(..zeros);
    }
    while p.len() > 1 {
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * Q::from(lcm.clone())).to_integer()).collect();
        let (a0, an) = (&ints[0], &ints[ints.len() - 1]);
        let mut found = None;
        'search: for num in divisors(a0)? {
            for den in divisors(an)? {
                for sign in [1, -1] {
                    let r = Q::new(&num * sign, den.clone());
                    let value = p.iter().rev().fold(Q::zero(), |acc, c| acc * &r + c);
                    if value.is_zero() {
                        found = Some(r);
                        break 'search;
                    }
                }
            }
        }
        let r = found?;
        let mut quotient = vec![Q::zero(); p.len() - 1];
        let mut carry = Q::zero();
        for k in (0..p.len()).rev() {
            let c = &p[k] + &carry * &r;
            if k == 0 {
                debug_assert!(c.is_zero());
            } else {
                quotient[k - 1] = c.clone();
                carry = c;
            }
        }
        p = quotient;
        match roots.iter_mut().find(|(x, _)| *x == r) {
            Some((_, m)) => *m += 1,
            None => roots.push((r, 1)),
        }
    }
    Some(roots)
}

fn falling(n: usize, k: usize) -> Q {
    (n - k + 1..=n).fold(Q::one(), |acc, v| acc * q_int(v as i64))
}

const TRUNCATION_ORDER: usize = 12;

/// Sums `Σ (−s)^n/n! ad_{X_i}^n X_j` in closed form over the Krylov space of `X_j`.
pub fn adjoint_series(sc: &StructureConstants, i: usize, j: usize) -> AdjointEntry {
    let n = sc.len();
    let a = ad_matrix(sc, i);
    let mut krylov: Vec<Vec<Q>> = vec![(0..n).map(|k| if k == j { Q::one() } else { Q::zero() }).collect()];
    let recurrence = loop {
        let next = mat_vec(&a, krylov.last().expect("nonempty"));
        let m = krylov.len();
        let cols: Vec<Vec<Q>> = (0..n).map(|r| krylov.iter().map(|v| v[r].clone()).collect()).collect();
        if let Some(c) = solve(&cols, &next, m) {
            break c;
        }
        krylov.push(next);
    };
    let m = krylov.len();
    let mut minpoly: Vec<Q> = recurrence.iter().map(|c| -c).collect();
    minpoly.push(Q::one());

    let Some(roots) = rational_roots(&minpoly) else {
        return truncated(&a, i, j, n);
    };
    let mut basis_fns: Vec<(Q, usize)> = Vec::new();
    for (lambda, mult) in &roots {
        for k in 0..*mult {
            basis_fns.push((-lambda, k));
        }
    }
    let matrix: Vec<Vec<Q>> = (0..m)
        .map(|d| {
            basis_fns
                .iter()
                .map(|(r, k)| if d < *k { Q::zero() } else { falling(d, *k) * num_traits::pow(r.clone(), d - k) })
                .collect()
        })
        .collect();
    let mut coeffs = Vec::with_capacity(n);
    for comp in 0..n {
        let rhs: Vec<Q> = (0..m)
            .map(|d| if d % 2 == 0 { krylov[d][comp].clone() } else { -krylov[d][comp].clone() })
            .collect();
        let c = solve(&matrix, &rhs, m).expect("confluent Vandermonde system is regular");
        let mut e = SExp::zero();
        for ((r, k), v) in basis_fns.iter().zip(c) {
            e = e.add(&SExp::term(v, *k as u32, r.clone()));
        }
        coeffs.push(e);
    }
    let closure = if roots.iter().all(|(r, _)| r.is_zero()) {
        Closure::Nilpotent { order: m }
    } else {
        Closure::Exponential { order: m }
    };
    AdjointEntry {
        acting: i,
        target: j,
        coeffs,
        closure,
    }
}

fn truncated(a: &[Vec<Q>], i: usize, j: usize, n: usize) -> AdjointEntry {
    let mut v: Vec<Q> = (0..n).map(|k| if k == j { Q::one() } else { Q::zero() }).collect();
    let mut coeffs = vec![SExp::zero(); n];
    let mut fact = Q::one();
    for order in 0..=TRUNCATION_ORDER {
        if order > 0 {
            fact *= q_int(order as i64);
            v = mat_vec(a, &v);
        }
        let sign = if order % 2 == 0 { Q::one() } else { -Q::one() };
        for (c, x) in coeffs.iter_mut().zip(&v) {
            *c = c.add(&SExp::term(x * &sign / &fact, order as u32, Q::zero()));
        }
    }
    AdjointEntry {
        acting: i,
        target: j,
        coeffs,
        closure: Closure::Truncated { order: TRUNCATION_ORDER },
    }
}

#[derive(Clone, Debug)]
pub struct AdjointTable {
    pub basis: LieBasis,
    pub structure: StructureConstants,
    pub entries: Vec<Vec<AdjointEntry>>,
}

pub fn adjoint_table(table: &CommutatorTable) -> Result<AdjointTable, LieError> {
    let sc = table.structure_constants()?;
    let n = sc.len();
    let entries = (0..n).map(|i| (0..n).map(|j| adjoint_series(&sc, i, j)).collect()).collect();
    Ok(AdjointTable {
        basis: table.basis.clone(),
        structure: sc,
        entries,
    })
}

/// Per-entry results of the identity, derivative and group-law checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdjointChecks {
    pub closed: bool,
    pub identity_at_zero: bool,
    pub derivative_at_zero: bool,
    pub group_law: bool,
}

impl AdjointChecks {
    pub fn all(self) -> bool {
        self.closed && self.identity_at_zero && self.derivative_at_zero && self.group_law
    }
}

impl AdjointTable {
    pub fn entry(&self, i: usize, j: usize) -> &AdjointEntry {
        &self.entries[i][j]
    }

    pub fn render_cell(&self, i: usize, j: usize) -> String {
        render_combination(&self.basis, &self.entries[i][j].as_exprs())
    }

    pub fn checks(&self, i: usize, j: usize) -> AdjointChecks {
        let e = &self.entries[i][j];
        let n = self.structure.len();
        let identity_at_zero = e
            .coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| c.at_zero() == if k == j { Q::one() } else { Q::zero() });
        let derivative_at_zero = e
            .coeffs
            .iter()
            .zip(&self.structure[i][j])
            .all(|(c, b)| c.derivative().at_zero() == -b.clone());
        let mut composed = vec![SExp::zero(); n];
        for (k, outer) in e.coeffs.iter().enumerate() {
            let outer = outer.negate_s();
            for (l, inner) in self.entries[i][k].coeffs.iter().enumerate() {
                composed[l] = composed[l].add(&outer.mul(inner));
            }
        }
        let group_law = composed
            .iter()
            .enumerate()
            .all(|(l, c)| *c == if l == j { SExp::one() } else { SExp::zero() });
        AdjointChecks {
            closed: e.closure.is_closed(),
            identity_at_zero,
            derivative_at_zero,
            group_law,
        }
    }

    pub fn to_json(&self) -> Value {
        let n = self.basis.len();
        json!({
            "schema": "nibsym.table/1",
            "algebra": self.basis.name,
            "kind": "adjoint",
            "basis": self.basis.names,
            "cells": (0..n).map(|i| (0..n).map(|j| {
                let c = self.checks(i, j);
                json!({
                    "value": self.render_cell(i, j),
                    "closure": self.entries[i][j].closure.label(),
                    "checks": {
                        "identity_at_zero": c.identity_at_zero,
                        "derivative_at_zero": c.derivative_at_zero,
                        "group_law": c.group_law,
                    },
                })
            }).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn to_markdown(&self) -> String {
        let n = self.basis.len();
        let mut s = format!("| Ad | {} |\n|---|{}\n", self.basis.names.join(" | "), "---|".repeat(n));
        for i in 0..n {
            let cells: Vec<String> = (0..n).map(|j| self.render_cell(i, j)).collect();
            s.push_str(&format!("| {} | {} |\n", self.basis.names[i], cells.join(" | ")));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::q_frac;

    #[test]
    fn roots_with_multiplicity() {
        // (λ-1)^2 (λ+1/2) λ
        let p = vec![q_int(0), q_frac(1, 2), q_int(0), q_frac(-3, 2), q_int(1)];
        let mut r = rational_roots(&p).unwrap();
        r.sort();
        assert_eq!(r, vec![(q_frac(-1, 2), 1), (q_int(0), 1), (q_int(1), 2)]);
        assert!(rational_roots(&[q_int(-2), q_int(0), q_int(1)]).is_none());
    }

    #[test]
    fn two_dimensional_affine_algebra() {
        // [X1, X2] = X1
        let sc = vec![
            vec![vec![q_int(0), q_int(0)], vec![q_int(1), q_int(0)]],
            vec![vec![q_int(-1), q_int(0)], vec![q_int(0), q_int(0)]],
        ];
        let e = adjoint_series(&sc, 1, 0);
        assert_eq!(e.coeffs[0], SExp::term(q_int(1), 0, q_int(1)));
        assert_eq!(e.closure, Closure::Exponential { order: 1 });
        let e = adjoint_series(&sc, 0, 1);
        assert_eq!(e.coeffs[0], SExp::term(q_int(-1), 1, q_int(0)));
        assert_eq!(e.closure, Closure::Nilpotent { order: 2 });
    }
}
