use std::fmt;

use num_traits::{One, Signed};

use super::expr::{Expr, Node, Q};

/// Full rendering: every function application shows its arguments.
pub fn render(e: &Expr) -> String {
    let mut s = String::new();
    write_sum(&mut s, e, false);
    s
}

/// Compact rendering: applications to their own parameters drop the argument list.
pub fn render_compact(e: &Expr) -> String {
    let mut s = String::new();
    write_sum(&mut s, e, true);
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

fn write_sum(out: &mut String, e: &Expr, compact: bool) {
    let terms = match e.node() {
        Node::Add(v) => v.clone(),
        _ => vec![e.clone()],
    };
    for (i, t) in terms.iter().enumerate() {
        let (c, rest) = t.split_coefficient();
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        write_term(out, &c.abs(), &rest, compact);
    }
}

/// Factors of a product term as (base, exponent) pairs.
fn factors(rest: &Expr) -> Vec<(Expr, Q)> {
    let one = Q::one();
    let list = match rest.node() {
        Node::Mul(v) => v.clone(),
        _ if rest.is_one() => vec![],
        _ => vec![rest.clone()],
    };
    list.into_iter()
        .map(|f| match f.node() {
            Node::Pow(b, q) => (b.clone(), q.clone()),
            _ => (f.clone(), one.clone()),
        })
        .collect()
}

fn write_term(out: &mut String, c: &Q, rest: &Expr, compact: bool) {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    if !c.numer().is_one() || rest.is_one() {
        num.push(c.numer().to_string());
    }
    if !c.denom().is_one() {
        den.push(c.denom().to_string());
    }
    let fs = factors(rest);
    // Sum atoms in a denominator stay as explicit negative powers unless there is
    // exactly one of them with unit exponent; otherwise re-parsing would expand them.
    let sums: Vec<&Q> = fs
        .iter()
        .filter(|(b, q)| q.is_negative() && matches!(b.node(), Node::Add(_)))
        .map(|(_, q)| q)
        .collect();
    let inline_sums = !(sums.is_empty() || (sums.len() == 1 && (-sums[0].clone()).is_one()));
    for (b, q) in fs {
        if q.is_negative() && !(inline_sums && matches!(b.node(), Node::Add(_))) {
            den.push(power(&b, &-q, compact));
        } else {
            num.push(power(&b, &q, compact));
        }
    }
    if num.is_empty() {
        num.push("1".into());
    }
    out.push_str(&num.join("*"));
    if !den.is_empty() {
        out.push('/');
        if den.len() == 1 {
            out.push_str(&den[0]);
        } else {
            out.push('(');
            out.push_str(&den.join("*"));
            out.push(')');
        }
    }
}

fn power(b: &Expr, q: &Q, compact: bool) -> String {
    let base = atom(b, compact);
    if q.is_one() {
        return match b.node() {
            Node::Add(_) => format!("({base})"),
            _ => base,
        };
    }
    let base = match b.node() {
        Node::Num(n) if !n.is_integer() || n.is_negative() => format!("({base})"),
        Node::Num(_) | Node::Sym(_) | Node::Apply(_) | Node::Builtin(..) => base,
        _ => format!("({base})"),
    };
    if q.is_integer() && !q.is_negative() {
        format!("{base}^{q}")
    } else {
        format!("{base}^({q})")
    }
}

fn atom(e: &Expr, compact: bool) -> String {
    match e.node() {
        Node::Num(q) => q.to_string(),
        Node::Sym(s) => s.to_string(),
        Node::Apply(a) => {
            let name = a.func.derived_name(&a.derivs);
            if compact && a.is_default_args() {
                return name;
            }
            let args: Vec<String> = a
                .args
                .iter()
                .map(|x| {
                    let mut s = String::new();
                    write_sum(&mut s, x, compact);
                    s
                })
                .collect();
            format!("{name}({})", args.join(", "))
        }
        Node::Builtin(k, x) => {
            let mut s = String::new();
            write_sum(&mut s, x, compact);
            format!("{}({s})", k.name())
        }
        Node::Pow(..) | Node::Mul(_) => {
            let mut s = String::new();
            write_sum(&mut s, e, compact);
            if s.starts_with('-') || s.contains('/') {
                format!("({s})")
            } else {
                s
            }
        }
        Node::Add(_) => {
            let mut s = String::new();
            write_sum(&mut s, e, compact);
            s
        }
    }
}
