//! Normal form: an expanded sum of rational multiples of monomials over atoms.
//!
//! Atoms are symbols, function applications, builtin applications, rational
//! constants raised to non-integer powers, and "sum atoms" (a multi-term sum
//! with unit leading coefficient) raised to a negative or fractional power.
//! Exponentials are merged into a single `exp` atom per monomial and
//! `exp(c*ln(a))` collapses to `a^c`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{q_int, Builtin, Expr, Node, Q};

pub(crate) type Mono = BTreeMap<Expr, Q>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct Poly {
    pub terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: Q) -> Poly {
        Poly::monomial(c, Mono::new())
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn monomial(c: Q, m: Mono) -> Poly {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn atom(e: &Expr) -> Poly {
        let mut m = Mono::new();
        m.insert(e.clone(), Q::one());
        Poly::monomial(Q::one(), m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get_mut();
                *v += c;
                if v.is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scaled(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(&other.scaled(&-Q::one()));
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut merged = m1.clone();
                for (a, e) in m2 {
                    let slot = merged.entry(a.clone()).or_insert_with(Q::zero);
                    *slot += e;
                }
                merged.retain(|_, e| !e.is_zero());
                let prod = canon(c1 * c2, merged);
                out.add_assign(&prod);
            }
        }
        out
    }

    pub fn pow_nat(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Reads a normal-form expression into polynomial form without re-normalizing.
    pub fn of(e: &Expr) -> Poly {
        match e.node() {
            Node::Num(q) => Poly::constant(q.clone()),
            Node::Add(v) => {
                let mut p = Poly::zero();
                for t in v {
                    p.add_assign(&Poly::of(t));
                }
                p
            }
            Node::Mul(v) => {
                let mut c = Q::one();
                let mut m = Mono::new();
                for f in v {
                    match f.node() {
                        Node::Num(q) => c = q.clone(),
                        Node::Pow(b, q) => {
                            m.insert(b.clone(), q.clone());
                        }
                        _ => {
                            m.insert(f.clone(), Q::one());
                        }
                    }
                }
                Poly::monomial(c, m)
            }
            Node::Pow(b, q) => {
                let mut m = Mono::new();
                m.insert(b.clone(), q.clone());
                Poly::monomial(Q::one(), m)
            }
            _ => Poly::atom(e),
        }
    }

    pub fn single_term(&self) -> Option<(&Mono, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// `Some(c)` when `self == c * other` for a nonzero rational `c`.
    pub fn rational_multiple_of(&self, other: &Poly) -> Option<Q> {
        if self.terms.len() != other.terms.len() || self.is_zero() {
            return None;
        }
        let mut ratio: Option<Q> = None;
        for ((m1, c1), (m2, c2)) in self.terms.iter().zip(other.terms.iter()) {
            if m1 != m2 {
                return None;
            }
            let r = c1 / c2;
            match &ratio {
                None => ratio = Some(r),
                Some(prev) if *prev == r => {}
                _ => return None,
            }
        }
        ratio
    }

    /// Exact quotient by `s` when `s` divides `self`; `None` otherwise.
    pub fn div_exact(&self, s: &Poly) -> Option<Poly> {
        if s.is_zero() {
            return None;
        }
        let mut active: Vec<Expr> = Vec::new();
        for m in s.terms.keys() {
            for (a, e) in m {
                if !is_nat(e) || !divisible_atom(a) {
                    return None;
                }
                if !active.contains(a) {
                    active.push(a.clone());
                }
            }
        }
        active.sort();
        let key = |m: &Mono| -> Option<Vec<u64>> {
            active
                .iter()
                .map(|a| match m.get(a) {
                    None => Some(0),
                    Some(e) if is_nat(e) => e.to_integer().to_u64(),
                    Some(_) => None,
                })
                .collect()
        };
        let (s_key, s_coef) = s
            .terms
            .iter()
            .map(|(m, c)| (key(m).expect("checked"), c.clone()))
            .max_by(|a, b| a.0.cmp(&b.0))
            .expect("nonzero");
        let mut r = self.clone();
        let mut quotient = Poly::zero();
        let mut steps = 0usize;
        while !r.is_zero() {
            steps += 1;
            if steps > 400 {
                return None;
            }
            let mut best: Option<Vec<u64>> = None;
            for m in r.terms.keys() {
                let k = key(m)?;
                if best.as_ref().is_none_or(|b| k > *b) {
                    best = Some(k);
                }
            }
            let rk = best.expect("nonzero");
            if rk.iter().zip(&s_key).any(|(a, b)| a < b) {
                return None;
            }
            let mut t = Poly::zero();
            for (m, c) in &r.terms {
                if key(m).as_ref() != Some(&rk) {
                    continue;
                }
                let mut nm: Mono = m.iter().filter(|(a, _)| !active.contains(a)).map(|(a, e)| (a.clone(), e.clone())).collect();
                for (i, a) in active.iter().enumerate() {
                    let d = rk[i] - s_key[i];
                    if d > 0 {
                        nm.insert(a.clone(), q_int(d as i64));
                    }
                }
                t.add_term(nm, c / &s_coef);
            }
            r = r.sub(&t.mul(s));
            quotient.add_assign(&t);
        }
        Some(quotient)
    }
}

fn is_nat(e: &Q) -> bool {
    e.is_integer() && !e.is_negative()
}

fn divisible_atom(a: &Expr) -> bool {
    matches!(
        a.node(),
        Node::Sym(_) | Node::Apply(_) | Node::Builtin(Builtin::Ln, _) | Node::Builtin(Builtin::LambertW, _)
    )
}

/// `b^e` as an exact rational, when one exists.
fn exact_pow(b: &Q, e: &Q) -> Option<Q> {
    if e.is_integer() {
        let n = e.to_integer().to_i32()?;
        if b.is_zero() && n < 0 {
            return None;
        }
        return Some(pow_int(b, n));
    }
    if !b.is_positive() {
        return None;
    }
    let r = e.denom().to_u32()?;
    let p = e.numer().to_i32()?;
    let nr = b.numer().nth_root(r);
    let dr = b.denom().nth_root(r);
    if num_traits::pow(nr.clone(), r as usize) == *b.numer() && num_traits::pow(dr.clone(), r as usize) == *b.denom() {
        Some(pow_int(&Q::new(nr, dr), p))
    } else {
        None
    }
}

fn pow_int(b: &Q, n: i32) -> Q {
    if n >= 0 {
        num_traits::pow(b.clone(), n as usize)
    } else {
        num_traits::pow(b.recip(), (-n) as usize)
    }
}

/// Canonicalizes one monomial after exponents were combined.
fn canon(c: Q, m: Mono) -> Poly {
    if c.is_zero() {
        return Poly::zero();
    }
    let mut coef = c;
    let mut out = Mono::new();
    let mut exp_args: Vec<(Expr, Q)> = Vec::new();
    let mut expand: Vec<(Expr, u32)> = Vec::new();
    for (atom, e) in m {
        if e.is_zero() {
            continue;
        }
        match atom.node() {
            Node::Num(b) => match exact_pow(b, &e) {
                Some(v) => coef *= v,
                None => {
                    out.insert(atom, e);
                }
            },
            Node::Builtin(Builtin::Exp, arg) => exp_args.push((arg.clone(), e)),
            Node::Add(_) if is_nat(&e) => {
                expand.push((atom.clone(), e.to_integer().to_u32().expect("small exponent")));
            }
            _ => {
                out.insert(atom, e);
            }
        }
    }
    if coef.is_zero() {
        return Poly::zero();
    }
    let mut result;
    if exp_args.len() == 1 && exp_args[0].1.is_one() {
        out.insert(Expr::from_node(Node::Builtin(Builtin::Exp, exp_args[0].0.clone())), Q::one());
        result = Poly::monomial(coef, out);
    } else {
        result = Poly::monomial(coef, out);
        if !exp_args.is_empty() {
            let mut arg = Poly::zero();
            for (a, e) in &exp_args {
                arg.add_assign(&Poly::of(a).scaled(e));
            }
            let factor = exp(&finish(arg));
            result = result.mul(&Poly::of(&factor));
        }
    }
    for (s, n) in expand {
        result = result.mul(&Poly::of(&s).pow_nat(n));
    }
    result
}

fn term_expr(c: &Q, m: &Mono) -> Expr {
    let mut factors: Vec<Expr> = Vec::with_capacity(m.len() + 1);
    for (a, e) in m {
        if e.is_one() {
            factors.push(a.clone());
        } else {
            factors.push(Expr::from_node(Node::Pow(a.clone(), e.clone())));
        }
    }
    if factors.is_empty() {
        return Expr::num(c.clone());
    }
    if c.is_one() && factors.len() == 1 {
        return factors.pop().expect("one factor");
    }
    if !c.is_one() {
        factors.insert(0, Expr::num(c.clone()));
    }
    Expr::from_node(Node::Mul(factors))
}

pub(crate) fn from_poly(p: &Poly) -> Expr {
    let mut terms: Vec<Expr> = p.terms.iter().map(|(m, c)| term_expr(c, m)).collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().expect("one term"),
        _ => Expr::from_node(Node::Add(terms)),
    }
}

/// Cancels sum-atom denominators that exactly divide their numerators.
fn reduce_fractions(p: Poly) -> Poly {
    let has_den = p
        .terms
        .keys()
        .any(|m| m.iter().any(|(a, e)| matches!(a.node(), Node::Add(_)) && e.is_integer() && e.is_negative()));
    if !has_den {
        return p;
    }
    let mut groups: BTreeMap<Mono, Poly> = BTreeMap::new();
    for (m, c) in p.terms {
        let mut den = Mono::new();
        let mut rest = Mono::new();
        for (a, e) in m {
            if matches!(a.node(), Node::Add(_)) && e.is_integer() && e.is_negative() {
                den.insert(a, e);
            } else {
                rest.insert(a, e);
            }
        }
        groups.entry(den).or_default().add_term(rest, c);
    }
    let mut out = Poly::zero();
    for (mut den, mut num) in groups {
        loop {
            let mut changed = false;
            for (s, e) in den.clone() {
                let sp = Poly::of(&s);
                if num.terms.len() < sp.terms.len() {
                    continue;
                }
                if let Some(qt) = num.div_exact(&sp) {
                    num = qt;
                    let ne = e + Q::one();
                    if ne.is_zero() {
                        den.remove(&s);
                    } else {
                        den.insert(s, ne);
                    }
                    changed = true;
                    break;
                }
            }
            if !changed || den.is_empty() {
                break;
            }
        }
        out.add_assign(&num.mul(&Poly::monomial(Q::one(), den)));
    }
    out
}

pub(crate) fn finish(p: Poly) -> Expr {
    from_poly(&reduce_fractions(p))
}

pub(crate) fn add(a: &Expr, b: &Expr) -> Expr {
    let mut p = Poly::of(a);
    p.add_assign(&Poly::of(b));
    finish(p)
}

pub(crate) fn sub(a: &Expr, b: &Expr) -> Expr {
    finish(Poly::of(a).sub(&Poly::of(b)))
}

pub(crate) fn mul(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    finish(Poly::of(a).mul(&Poly::of(b)))
}

pub(crate) fn scale(a: &Expr, k: &Q) -> Expr {
    finish(Poly::of(a).scaled(k))
}

pub(crate) fn div(a: &Expr, b: &Expr) -> Expr {
    mul(a, &pow(b, &q_int(-1)))
}

pub(crate) fn pow(base: &Expr, q: &Q) -> Expr {
    if q.is_zero() {
        return Expr::one();
    }
    if q.is_one() {
        return base.clone();
    }
    let p = Poly::of(base);
    if p.is_zero() {
        if q.is_positive() {
            return Expr::zero();
        }
        return Expr::from_node(Node::Pow(Expr::zero(), q.clone()));
    }
    if is_nat(q) {
        return finish(p.pow_nat(q.to_integer().to_u32().expect("small exponent")));
    }
    if let Some((m, c)) = p.single_term() {
        let mut nm = Mono::new();
        for (a, e) in m {
            nm.insert(a.clone(), e * q);
        }
        let mut coef = Q::one();
        if !c.is_one() {
            match exact_pow(c, q) {
                Some(v) => coef = v,
                None => {
                    let slot = nm.entry(Expr::num(c.clone())).or_insert_with(Q::zero);
                    *slot += q;
                }
            }
        }
        return finish(canon(coef, nm));
    }
    // Multi-term base: pull out the monomial content and the leading coefficient.
    let mut content: Option<Mono> = None;
    for m in p.terms.keys() {
        content = Some(match content {
            None => m.clone(),
            Some(cur) => cur
                .into_iter()
                .filter_map(|(a, e)| m.get(&a).map(|e2| (a, if *e2 < e { e2.clone() } else { e })))
                .collect(),
        });
    }
    let content = content.unwrap_or_default();
    let mut reduced = Poly::zero();
    for (m, c) in &p.terms {
        let mut nm = m.clone();
        for (a, e) in &content {
            let slot = nm.get_mut(a).expect("content atom present");
            *slot -= e;
        }
        nm.retain(|_, e| !e.is_zero());
        reduced.add_term(nm, c.clone());
    }
    let lc = reduced.terms.values().next().expect("nonzero").clone();
    let sum_atom = from_poly(&reduced.scaled(&lc.recip()));
    let mut nm = Mono::new();
    for (a, e) in &content {
        nm.insert(a.clone(), e * q);
    }
    if let Node::Add(_) = sum_atom.node() {
        nm.insert(sum_atom, q.clone());
    } else {
        // content extraction left a single term; fold it in directly
        for (a, e) in Poly::of(&sum_atom).single_term().expect("single").0 {
            let slot = nm.entry(a.clone()).or_insert_with(Q::zero);
            *slot += e * q;
        }
    }
    let coef = match exact_pow(&lc, q) {
        Some(v) => v,
        None => {
            let slot = nm.entry(Expr::num(lc.clone())).or_insert_with(Q::zero);
            *slot += q;
            Q::one()
        }
    };
    finish(canon(coef, nm))
}

pub(crate) fn exp(arg: &Expr) -> Expr {
    let p = Poly::of(arg);
    let mut factors = Poly::one();
    let mut rest = Poly::zero();
    for (m, c) in &p.terms {
        if m.len() == 1 {
            let (atom, e) = m.iter().next().expect("one atom");
            if e.is_one() {
                if let Node::Builtin(Builtin::Ln, inner) = atom.node() {
                    factors = factors.mul(&Poly::of(&pow(inner, c)));
                    continue;
                }
            }
        }
        rest.add_term(m.clone(), c.clone());
    }
    if !rest.is_zero() {
        let atom = Expr::from_node(Node::Builtin(Builtin::Exp, finish(rest)));
        factors = factors.mul(&Poly::atom(&atom));
    }
    finish(factors)
}

pub(crate) fn ln(arg: &Expr) -> Expr {
    let p = Poly::of(arg);
    if let Some((m, c)) = p.single_term() {
        if c.is_positive() {
            let mut acc = Poly::zero();
            if !c.is_one() {
                acc.add_assign(&Poly::atom(&ln_atom(&Expr::num(c.clone()))));
            }
            for (atom, e) in m {
                match atom.node() {
                    Node::Builtin(Builtin::Exp, inner) => acc.add_assign(&Poly::of(inner).scaled(e)),
                    _ => acc.add_assign(&Poly::atom(&ln_atom(atom)).scaled(e)),
                }
            }
            return finish(acc);
        }
    }
    ln_atom(arg)
}

fn ln_atom(arg: &Expr) -> Expr {
    Expr::from_node(Node::Builtin(Builtin::Ln, arg.clone()))
}

/// Multiplies every negative-integer sum-atom power away, returning the numerator.
pub(crate) fn numerator(e: &Expr) -> Expr {
    let p = Poly::of(e);
    let mut clear: BTreeMap<Expr, Q> = BTreeMap::new();
    for m in p.terms.keys() {
        for (a, ex) in m {
            if matches!(a.node(), Node::Add(_)) && ex.is_integer() && ex.is_negative() {
                let need = -ex.clone();
                let slot = clear.entry(a.clone()).or_insert_with(Q::zero);
                if need > *slot {
                    *slot = need;
                }
            }
        }
    }
    if clear.is_empty() {
        return e.clone();
    }
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let mut nm = m.clone();
        for (a, k) in &clear {
            let slot = nm.entry(a.clone()).or_insert_with(Q::zero);
            *slot += k;
        }
        nm.retain(|_, e| !e.is_zero());
        out.add_assign(&canon(c.clone(), nm));
    }
    from_poly(&out)
}

