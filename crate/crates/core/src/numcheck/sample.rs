use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{eval, eval_scoped, Binding, Instantiation, PolyInst};
use super::NumError;
use crate::symkernel::{differentiate, DerivRule, Expr, FunctionSymbol, Node};

/// Names sampled from the coordinate box rather than the parameter range.
pub const COORDINATES: [&str; 16] = [
    "t", "x", "u", "f", "g", "u_t", "u_x", "u_tt", "u_tx", "u_xx", "f_t", "f_x", "f_u", "g_t", "g_x", "g_u",
];

const MAX_MAGNITUDE: f64 = 1e4;
const MIN_DENOMINATOR: f64 = 1e-3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random cubic in `arity` variables; cubic coefficients stay away from zero.
pub fn random_poly(arity: usize, rng: &mut ChaCha8Rng) -> PolyInst {
    let mut terms = Vec::new();
    let mut exps = vec![0u16; arity];
    fn walk(i: usize, left: u16, exps: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i == exps.len() {
            out.push(exps.clone());
            return;
        }
        for e in 0..=left {
            exps[i] = e;
            walk(i + 1, left - e, exps, out);
        }
        exps[i] = 0;
    }
    let mut all = Vec::new();
    walk(0, 3, &mut exps, &mut all);
    for e in all {
        let degree: u16 = e.iter().sum();
        let c = if degree == 3 {
            let mag = rng.gen_range(0.2..1.0);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        } else {
            rng.gen_range(-1.0..1.0)
        };
        terms.push((e, c));
    }
    PolyInst { arity, terms }
}

/// Instantiation for a declared function symbol.
pub fn instantiate(f: &Arc<FunctionSymbol>, rng: &mut ChaCha8Rng) -> Instantiation {
    let explicit = f.rules.iter().position(|r| matches!(r, DerivRule::Explicit(_)));
    match explicit {
        Some(var) => {
            let DerivRule::Explicit(integrand) = &f.rules[var] else {
                unreachable!()
            };
            Instantiation::Quadrature {
                integrand: integrand.clone(),
                var,
                lower: 0.0,
            }
        }
        None => Instantiation::Poly(random_poly(f.arity(), rng)),
    }
}

fn coordinate_value(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-2.0..2.0)
}

fn parameter_value(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.5..2.0);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

/// Binds every free symbol and function of `exprs` from a seeded stream.
pub fn random_binding(exprs: &[&Expr], seed: u64) -> Binding {
    let mut rng = rng(seed);
    let mut symbols = std::collections::BTreeSet::new();
    let mut functions = BTreeMap::new();
    for e in exprs {
        symbols.extend(e.free_symbols());
        functions.extend(e.functions());
    }
    let mut b = Binding {
        seed,
        ..Binding::default()
    };
    for (name, f) in &functions {
        b.functions.insert(name.clone(), instantiate(f, &mut rng));
    }
    for s in symbols {
        let v = if COORDINATES.contains(&s.as_str()) {
            coordinate_value(&mut rng)
        } else {
            parameter_value(&mut rng)
        };
        b.values.insert(s, v);
    }
    b
}

/// Evaluation that rejects huge values and near-singular denominators.
pub fn eval_guarded(e: &Expr, b: &Binding) -> Result<f64, NumError> {
    check_denominators(e, b)?;
    let v = eval(e, b)?;
    if !v.is_finite() || v.abs() > MAX_MAGNITUDE {
        return Err(NumError::Domain(format!("magnitude {v}")));
    }
    Ok(v)
}

fn check_denominators(e: &Expr, b: &Binding) -> Result<(), NumError> {
    if let Node::Pow(base, q) = e.node() {
        if *q < crate::symkernel::q_int(0) {
            let v = eval(base, b)?;
            if v.abs() < MIN_DENOMINATOR {
                return Err(NumError::Domain(format!("denominator {v}")));
            }
        }
    }
    for c in e.children() {
        check_denominators(&c, b)?;
    }
    Ok(())
}

/// Outcome of numeric zero probing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    Zero,
    NonZero,
    Undecided,
}

/// Evaluates `e` at `points` random positive sample points with random cubic
/// instantiations of every function, using a tolerance relative to the term scale.
pub fn probe_zero(e: &Expr, points: usize, seed: u64) -> Probe {
    let base = random_binding(&[e], seed);
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let terms = e.terms();
    let (mut valid, mut nonzero) = (0usize, 0usize);
    for _ in 0..points * 3 {
        if valid >= points {
            break;
        }
        let mut b = base.clone();
        for v in b.values.values_mut() {
            *v = r.gen_range(0.3..1.9);
        }
        let Ok(v) = eval_guarded(e, &b) else { continue };
        let mut scale = 1.0f64;
        let mut ok = true;
        for t in &terms {
            match eval(t, &b) {
                Ok(x) => scale = scale.max(x.abs()),
                Err(_) => ok = false,
            }
        }
        if !ok {
            continue;
        }
        valid += 1;
        if v.abs() > 1e-8 * scale {
            nonzero += 1;
        }
    }
    if valid < points.min(8) {
        Probe::Undecided
    } else if nonzero == 0 {
        Probe::Zero
    } else if nonzero * 2 > valid {
        Probe::NonZero
    } else {
        Probe::Undecided
    }
}

/// Relative error between the symbolic derivative and a Richardson-extrapolated
/// central difference.
pub fn fd_check(e: &Expr, var: &str, b: &Binding) -> Result<f64, NumError> {
    if !e.contains_symbol(var) {
        return Ok(0.0);
    }
    let d = differentiate(e, var).map_err(|err| NumError::Unsupported(err.to_string()))?;
    let symbolic = eval(&d, b)?;
    let x0 = b.get(var).ok_or_else(|| NumError::Unbound(var.to_string()))?;
    let at = |x: f64| eval_scoped(e, b, &[(var, x)]);
    let central = |h: f64| -> Result<f64, NumError> { Ok((at(x0 + h)? - at(x0 - h)?) / (2.0 * h)) };
    let h = 1e-6;
    let numeric = (4.0 * central(h / 2.0)? - central(h)?) / 3.0;
    Ok((symbolic - numeric).abs() / symbolic.abs().max(1.0))
}

/// On-shell samples: random (t, x, u, u_x) with `u_t = f - g u_x`; every
/// expression in `guard` must evaluate without hitting a singularity.
pub fn sample_onshell(f: &Expr, g: &Expr, guard: &[&Expr], n: usize, seed: u64) -> Result<Vec<Binding>, NumError> {
    let mut all: Vec<&Expr> = vec![f, g];
    all.extend_from_slice(guard);
    let base = random_binding(&all, seed);
    let mut r = rng(seed.wrapping_add(1));
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > 100 * n.max(1) {
            return Err(NumError::RejectionOverflow { wanted: n, got: out.len() });
        }
        let mut b = base.clone();
        for c in ["t", "x", "u", "u_x"] {
            b.set(c, coordinate_value(&mut r));
        }
        let (Ok(fv), Ok(gv)) = (eval_guarded(f, &b), eval_guarded(g, &b)) else {
            continue;
        };
        b.set("u_t", fv - gv * b.get("u_x").expect("set above"));
        if guard.iter().all(|e| eval_guarded(e, &b).is_ok()) {
            out.push(b);
        }
    }
    Ok(out)
}
