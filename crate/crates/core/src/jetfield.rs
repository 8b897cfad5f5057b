//! Coordinate charts, vector fields, total derivatives and first prolongation.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use num_traits::Zero;

use crate::symkernel::{differentiate, render, Context, Expr, SymError, Q};

pub const JETS: [&str; 5] = ["u_t", "u_x", "u_tt", "u_tx", "u_xx"];
const SECOND_ORDER: [&str; 3] = ["u_tt", "u_tx", "u_xx"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("chart mismatch: {0} vs {1}")]
    ChartMismatch(String, String),
    #[error("total derivative only along t or x, not `{0}`")]
    NotIndependent(String),
    #[error("coefficient of ∂{0} depends on jet coordinate {1}")]
    JetDependence(String, String),
    #[error("second-order jet coordinate {0} survived prolongation")]
    SecondOrderSurvived(String),
    #[error("coordinate `{0}` is not on chart {1}")]
    UnknownCoordinate(String, String),
    #[error("malformed vector field: {0}")]
    Malformed(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// Ordered coordinates of a chart; jet coordinates are derived, never declared.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chart {
    pub name: String,
    pub coords: Vec<String>,
}

impl Chart {
    pub fn new(name: &str, coords: &[&str]) -> Self {
        let coords: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        let mut seen = coords.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), coords.len(), "duplicate coordinate");
        Chart {
            name: name.to_string(),
            coords,
        }
    }

    /// (t, x, u).
    pub fn point() -> Self {
        Chart::new("point", &["t", "x", "u"])
    }

    /// (t, x, u, f, g).
    pub fn equivalence() -> Self {
        Chart::new("equivalence", &["t", "x", "u", "f", "g"])
    }

    /// (x, u, f, g).
    pub fn fiber() -> Self {
        Chart::new("fiber", &["x", "u", "f", "g"])
    }

    pub fn from_coords(coords: &[String]) -> Self {
        let refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
        for c in [Chart::point(), Chart::equivalence(), Chart::fiber()] {
            if c.coords == coords {
                return c;
            }
        }
        Chart::new("custom", &refs)
    }

    pub fn contains(&self, coord: &str) -> bool {
        self.coords.iter().any(|c| c == coord)
    }

    /// First and second order jets, present when the chart carries (t, x, u).
    pub fn jets(&self) -> Vec<&'static str> {
        if ["t", "x", "u"].iter().all(|c| self.contains(c)) {
            JETS.to_vec()
        } else {
            Vec::new()
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.join(","))
    }
}

/// A vector field stored sparsely: absent coordinates have zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub chart: Chart,
    coeffs: BTreeMap<String, Expr>,
}

impl VectorField {
    pub fn zero(chart: Chart) -> Self {
        VectorField {
            chart,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a field from (coordinate, coefficient) pairs.
    ///
    /// # Panics
    /// When a coordinate is not on the chart.
    pub fn from_pairs(chart: Chart, pairs: impl IntoIterator<Item = (impl AsRef<str>, Expr)>) -> Self {
        let mut v = VectorField::zero(chart);
        for (c, e) in pairs {
            v.set(c.as_ref(), e);
        }
        v
    }

    /// `∂/∂coord`.
    pub fn partial(chart: Chart, coord: &str) -> Self {
        VectorField::from_pairs(chart, [(coord, Expr::one())])
    }

    /// Point field ξ∂t + τ∂x + φ∂u.
    pub fn point(xi: Expr, tau: Expr, phi: Expr) -> Self {
        VectorField::from_pairs(Chart::point(), [("t", xi), ("x", tau), ("u", phi)])
    }

    pub fn set(&mut self, coord: &str, e: Expr) {
        assert!(self.chart.contains(coord), "{coord} not on chart {}", self.chart);
        if e.is_zero() {
            self.coeffs.remove(coord);
        } else {
            self.coeffs.insert(coord.to_string(), e);
        }
    }

    pub fn coeff(&self, coord: &str) -> Expr {
        self.coeffs.get(coord).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<String, Expr> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same_chart(&self, other: &VectorField) -> Result<(), JetError> {
        if self.chart.coords != other.chart.coords {
            return Err(JetError::ChartMismatch(self.chart.to_string(), other.chart.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, JetError> {
        self.same_chart(other)?;
        let mut out = self.clone();
        for (c, e) in &other.coeffs {
            let sum = out.coeff(c) + e;
            out.set(c, sum);
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        let mut out = VectorField::zero(self.chart.clone());
        for (c, e) in &self.coeffs {
            out.set(c, k * e);
        }
        out
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, JetError> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    /// Acts as a derivation: Σ coeff_i ∂e/∂coord_i.
    pub fn apply(&self, e: &Expr) -> Result<Expr, JetError> {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (c, k) in &self.coeffs {
            terms.push(k * &differentiate(e, c)?);
        }
        Ok(terms.into_iter().sum())
    }

    /// Restriction to `target` coordinates; dropped non-zero coefficients are returned.
    pub fn restrict(&self, target: &Chart) -> (VectorField, BTreeMap<String, Expr>) {
        let mut kept = VectorField::zero(target.clone());
        let mut dropped = BTreeMap::new();
        for (c, e) in &self.coeffs {
            if target.contains(c) {
                kept.set(c, e.clone());
            } else {
                dropped.insert(c.clone(), e.clone());
            }
        }
        (kept, dropped)
    }

    /// Changes the chart to a superset chart.
    pub fn extend_to(&self, chart: &Chart) -> Result<VectorField, JetError> {
        let mut out = VectorField::zero(chart.clone());
        for (c, e) in &self.coeffs {
            if !chart.contains(c) {
                return Err(JetError::UnknownCoordinate(c.clone(), chart.to_string()));
            }
            out.set(c, e.clone());
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&Expr) -> Expr) -> VectorField {
        let mut out = VectorField::zero(self.chart.clone());
        for (c, e) in &self.coeffs {
            out.set(c, f(e));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Map<String, Value> = self.coeffs.iter().map(|(c, e)| (c.clone(), json!(render(e)))).collect();
        json!({"chart": self.chart.coords, "coeffs": coeffs})
    }

    /// Reads `{"chart": [...], "coeffs": {...}}` or a bare coefficient map on the point chart.
    pub fn from_json(v: &Value, ctx: &Context) -> Result<VectorField, JetError> {
        let obj = v.as_object().ok_or_else(|| JetError::Malformed("expected an object".into()))?;
        let (chart, coeffs) = match obj.get("coeffs") {
            Some(c) => {
                let chart = match obj.get("chart") {
                    Some(Value::Array(a)) => {
                        let names: Option<Vec<String>> = a.iter().map(|x| x.as_str().map(String::from)).collect();
                        Chart::from_coords(&names.ok_or_else(|| JetError::Malformed("chart entries must be strings".into()))?)
                    }
                    None => Chart::point(),
                    Some(_) => return Err(JetError::Malformed("chart must be a list".into())),
                };
                let c = c.as_object().ok_or_else(|| JetError::Malformed("coeffs must be an object".into()))?;
                (chart, c)
            }
            None => (Chart::point(), obj),
        };
        let mut out = VectorField::zero(chart.clone());
        for (k, e) in coeffs {
            if !chart.contains(k) {
                return Err(JetError::UnknownCoordinate(k.clone(), chart.to_string()));
            }
            let text = e.as_str().ok_or_else(|| JetError::Malformed(format!("coefficient of {k} must be a string")))?;
            out.set(k, ctx.parse(text)?);
        }
        Ok(out)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for c in &self.chart.coords {
            let Some(e) = self.coeffs.get(c) else { continue };
            let negative = e.term_count() == 1 && e.split_coefficient().0 < Q::zero();
            let mag = if negative { -e } else { e.clone() };
            let s = crate::symkernel::render_compact(&mag);
            let term = if mag.is_one() {
                format!("∂{c}")
            } else if mag.term_count() > 1 {
                format!("({s})∂{c}")
            } else {
                format!("{s}∂{c}")
            };
            match (out.is_empty(), negative) {
                (true, true) => out = format!("-{term}"),
                (true, false) => out = term,
                (false, true) => out.push_str(&format!(" - {term}")),
                (false, false) => out.push_str(&format!(" + {term}")),
            }
        }
        f.write_str(&out)
    }
}

/// Total derivative along `along` ∈ {t, x} on the point jet space.
pub fn total_derivative(e: &Expr, along: &str) -> Result<Expr, JetError> {
    let (u_j, u_tj, u_xj) = match along {
        "t" => ("u_t", "u_tt", "u_tx"),
        "x" => ("u_x", "u_tx", "u_xx"),
        _ => return Err(JetError::NotIndependent(along.to_string())),
    };
    Ok(differentiate(e, along)?
        + Expr::sym(u_j) * differentiate(e, "u")?
        + Expr::sym(u_tj) * differentiate(e, "u_t")?
        + Expr::sym(u_xj) * differentiate(e, "u_x")?)
}

/// First prolongation of a field whose t, x, u components live on (t, x, u).
#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub base: VectorField,
    pub phi_t: Expr,
    pub phi_x: Expr,
    pub characteristic: Expr,
}

impl ProlongedField {
    /// The prolonged field applied to `e`, which may involve u_t and u_x.
    pub fn apply(&self, e: &Expr) -> Result<Expr, JetError> {
        Ok(self.base.apply(e)?
            + &self.phi_t * &differentiate(e, "u_t")?
            + &self.phi_x * &differentiate(e, "u_x")?)
    }
}

pub fn prolong1(v: &VectorField) -> Result<ProlongedField, JetError> {
    for c in ["t", "x", "u"] {
        if !v.chart.contains(c) {
            return Err(JetError::UnknownCoordinate(c.to_string(), v.chart.to_string()));
        }
        for j in JETS {
            if v.coeff(c).contains_symbol(j) {
                return Err(JetError::JetDependence(c.to_string(), j.to_string()));
            }
        }
    }
    let (xi, tau, phi) = (v.coeff("t"), v.coeff("x"), v.coeff("u"));
    let (ut, ux) = (Expr::sym("u_t"), Expr::sym("u_x"));
    let q = &phi - &xi * &ut - &tau * &ux;
    let phi_t = total_derivative(&q, "t")? + &xi * Expr::sym("u_tt") + &tau * Expr::sym("u_tx");
    let phi_x = total_derivative(&q, "x")? + &xi * Expr::sym("u_tx") + &tau * Expr::sym("u_xx");
    for s in SECOND_ORDER {
        if phi_t.contains_symbol(s) || phi_x.contains_symbol(s) {
            return Err(JetError::SecondOrderSurvived(s.to_string()));
        }
    }
    Ok(ProlongedField {
        base: v.clone(),
        phi_t,
        phi_x,
        characteristic: q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Context::point().parse(s).unwrap()
    }

    #[test]
    fn total_derivatives() {
        assert_eq!(total_derivative(&p("u"), "x").unwrap(), p("u_x"));
        assert!(total_derivative(&p("x"), "t").unwrap().is_zero());
        let q = p("phi - xi*u_t - tau*u_x");
        let dq = total_derivative(&q, "t").unwrap();
        let expected = p("phi_t + phi_u*u_t - u_t*(xi_t + xi_u*u_t) - xi*u_tt - u_x*(tau_t + tau_u*u_t) - tau*u_tx");
        assert_eq!(dq, expected);
        assert!(matches!(total_derivative(&q, "u"), Err(JetError::NotIndependent(_))));
    }

    #[test]
    fn prolongation_examples() {
        let dt = prolong1(&VectorField::partial(Chart::point(), "t")).unwrap();
        assert!(dt.phi_t.is_zero() && dt.phi_x.is_zero());
        let scaling = prolong1(&VectorField::point(Expr::zero(), Expr::zero(), p("u"))).unwrap();
        assert_eq!(scaling.phi_t, p("u_t"));
        assert_eq!(scaling.phi_x, p("u_x"));
        let mixed = prolong1(&VectorField::point(p("t"), Expr::zero(), p("u"))).unwrap();
        assert!(mixed.phi_t.is_zero());
        assert_eq!(mixed.phi_x, p("u_x"));
    }

    #[test]
    fn prolongation_rejects_jet_coefficients() {
        let v = VectorField::point(p("u_x"), Expr::zero(), Expr::zero());
        assert!(matches!(prolong1(&v), Err(JetError::JetDependence(..))));
    }

    #[test]
    fn apply_is_a_derivation() {
        let ctx = Context::fiber();
        let dx = VectorField::partial(Chart::point(), "x");
        assert_eq!(dx.apply(&p("x*u")).unwrap(), p("u"));
        let z5 = VectorField::from_pairs(Chart::fiber(), [("f", ctx.parse("f^2").unwrap()), ("g", ctx.parse("f*g").unwrap())]);
        assert!(z5.apply(&ctx.parse("f/g").unwrap()).unwrap().is_zero());
        assert!(z5.apply(&Expr::int(7)).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip() {
        let ctx = Context::point();
        let v = VectorField::point(p("t"), p("x^2"), Expr::zero());
        let back = VectorField::from_json(&v.to_json(), &ctx).unwrap();
        assert_eq!(back, v);
        let bare = VectorField::from_json(&serde_json::json!({"x": "1"}), &ctx).unwrap();
        assert_eq!(bare, VectorField::partial(Chart::point(), "x"));
        assert!(VectorField::from_json(&serde_json::json!({"f": "1"}), &ctx).is_err());
    }
}
