use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive};

use super::diff::differentiate;
use super::expr::{Builtin, Expr, Node};
use super::normal::{finish, Mono, Poly};
use super::SymError;

/// Substitution map from symbols or full application atoms to replacements.
pub type Bindings = BTreeMap<Expr, Expr>;

/// Simultaneous substitution followed by normalization.
pub fn substitute(e: &Expr, bindings: &Bindings) -> Expr {
    if bindings.is_empty() {
        return e.clone();
    }
    if let Some(v) = bindings.get(e) {
        return v.clone();
    }
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Apply(a) => {
            let args: Vec<Expr> = a.args.iter().map(|x| substitute(x, bindings)).collect();
            Expr::apply(&a.func, a.derivs.clone(), args)
        }
        Node::Builtin(k, x) => {
            let x = substitute(x, bindings);
            match k {
                Builtin::Exp => x.exp(),
                Builtin::Ln => x.ln(),
                Builtin::LambertW => x.lambertw(),
            }
        }
        Node::Pow(b, q) => substitute(b, bindings).pow_q(q),
        Node::Mul(v) => {
            let mut acc = Expr::one();
            for f in v {
                acc = acc * substitute(f, bindings);
            }
            acc
        }
        Node::Add(v) => v.iter().map(|t| substitute(t, bindings)).sum(),
    }
}

/// Replaces every application of the function `name` (and its derivatives)
/// by `body`, an expression in the function's parameter symbols.
pub fn instantiate_function(e: &Expr, name: &str, body: &Expr) -> Result<Expr, SymError> {
    let mut map = Bindings::new();
    collect_apps(e, name, &mut map);
    if map.is_empty() {
        return Ok(e.clone());
    }
    for (atom, slot) in map.iter_mut() {
        let a = atom.as_apply().expect("application");
        let mut d = body.clone();
        for (p, &count) in a.func.params.iter().zip(&a.derivs) {
            for _ in 0..count {
                d = differentiate(&d, p)?;
            }
        }
        let mut args = Bindings::new();
        for (p, x) in a.func.params.iter().zip(&a.args) {
            args.insert(Expr::sym(p), instantiate_function(x, name, body)?);
        }
        *slot = substitute(&d, &args);
    }
    Ok(substitute(e, &map))
}

fn collect_apps(e: &Expr, name: &str, out: &mut Bindings) {
    if let Node::Apply(a) = e.node() {
        if &*a.func.name == name {
            out.insert(e.clone(), Expr::zero());
        }
    }
    for c in e.children() {
        collect_apps(&c, name, out);
    }
}

/// Coefficients of the powers of the symbol `var`.
pub fn collect_powers(e: &Expr, var: &str) -> Result<BTreeMap<i64, Expr>, SymError> {
    let v = Expr::sym(var);
    let grouped = collect_by(e, std::slice::from_ref(&v), var)?;
    Ok(grouped.into_iter().map(|(k, c)| (k[0] as i64, c)).collect())
}

/// Coefficients of the monomials in the given atoms (symbols or applications).
pub fn collect_monomials(e: &Expr, atoms: &[Expr]) -> Result<BTreeMap<Vec<u32>, Expr>, SymError> {
    let label = atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
    collect_by(e, atoms, &label)
}

fn collect_by(e: &Expr, atoms: &[Expr], label: &str) -> Result<BTreeMap<Vec<u32>, Expr>, SymError> {
    let not_poly = |reason: String| SymError::NotPolynomial {
        var: label.to_string(),
        reason,
    };
    let mut groups: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (m, c) in &Poly::of(e).terms {
        let mut key = vec![0u32; atoms.len()];
        let mut rest = Mono::new();
        for (a, q) in m {
            if let Some(i) = atoms.iter().position(|x| x == a) {
                if !q.is_integer() || q.is_negative() {
                    return Err(not_poly(format!("exponent {q} on {a}")));
                }
                key[i] = q.to_integer().to_u32().ok_or_else(|| not_poly("exponent too large".into()))?;
            } else {
                if atoms.iter().any(|x| a.contains(x)) {
                    return Err(not_poly(format!("occurs inside {a}")));
                }
                rest.insert(a.clone(), q.clone());
            }
        }
        groups.entry(key).or_default().add_term(rest, c.clone());
    }
    Ok(groups
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| (k, finish(p)))
        .collect())
}
