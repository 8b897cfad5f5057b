use super::expr::{Expr, Node};
use super::normal;
use crate::numcheck::{probe_zero, Probe};

const PROBE_POINTS: usize = 32;
const PROBE_SEED: u64 = 0x5eed_0f_2e70;

/// Result of deciding whether an expression vanishes identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroTest {
    /// The normal form is zero.
    Zero,
    /// Numeric probing found zero at every sample point.
    ProbablyZero,
    NonZero,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equality {
    ProvenEqual,
    ProbablyEqual,
    NotEqual,
    Undecided,
}

/// The expression with all sum-atom denominators multiplied out.
pub fn numerator(e: &Expr) -> Expr {
    normal::numerator(e)
}

/// True when every atom is a symbol or an application to distinct symbols,
/// raised to an integer power: such atoms are algebraically independent, so a
/// nonzero normal form proves the expression nonzero.
fn plain(e: &Expr) -> bool {
    normal::Poly::of(e).terms.keys().all(|m| {
        m.iter().all(|(a, q)| {
            q.is_integer()
                && match a.node() {
                    Node::Sym(_) => true,
                    Node::Apply(app) => {
                        let mut names: Vec<&str> = app.args.iter().filter_map(|x| x.as_sym()).collect();
                        let n = names.len();
                        names.sort_unstable();
                        names.dedup();
                        n == app.args.len() && names.len() == n
                    }
                    _ => false,
                }
        })
    })
}

pub fn zero_test(e: &Expr) -> ZeroTest {
    if e.is_zero() {
        return ZeroTest::Zero;
    }
    let n = numerator(e);
    if n.is_zero() {
        return ZeroTest::Zero;
    }
    if plain(&n) {
        return ZeroTest::NonZero;
    }
    match probe_zero(e, PROBE_POINTS, PROBE_SEED) {
        Probe::Zero => ZeroTest::ProbablyZero,
        Probe::NonZero => ZeroTest::NonZero,
        Probe::Undecided => ZeroTest::Undecided,
    }
}

pub fn equals(a: &Expr, b: &Expr) -> Equality {
    match zero_test(&(a - b)) {
        ZeroTest::Zero => Equality::ProvenEqual,
        ZeroTest::ProbablyZero => Equality::ProbablyEqual,
        ZeroTest::NonZero => Equality::NotEqual,
        ZeroTest::Undecided => Equality::Undecided,
    }
}
