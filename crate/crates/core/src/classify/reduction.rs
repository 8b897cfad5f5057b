//! Replay of adjoint reductions of a generic element of the ten-dimensional algebra.

use std::sync::OnceLock;

use serde_json::{json, Value};

use super::{array_of, linear_in, load, optimal_entry, str_of, ClassifyError};
use crate::liealg::{adjoint_table, commutator_table, render_combination, AdjointTable, LieBasis};
use crate::symkernel::{render_compact, substitute, zero_test, Bindings, Expr, ZeroTest};

pub(crate) fn l10_adjoint() -> &'static AdjointTable {
    static TABLE: OnceLock<AdjointTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let table = commutator_table(&LieBasis::l10()).expect("L10 brackets close");
        adjoint_table(&table).expect("L10 adjoint table")
    })
}

/// `Ad(exp(s·X_act))`, optionally claimed to cancel one coefficient.
#[derive(Clone, Debug)]
pub struct Step {
    pub act: usize,
    pub s: Expr,
    pub cancels: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum Target {
    Entry(String),
    /// An intermediate form; parameter-bearing coefficients are free.
    Form(Vec<Expr>),
}

#[derive(Clone, Debug)]
pub struct ReductionScript {
    pub name: String,
    pub assume: String,
    pub start: Vec<Expr>,
    pub steps: Vec<Step>,
    pub target: Target,
}

impl ReductionScript {
    pub fn from_json(v: &Value, basis: &LieBasis) -> Result<Self, ClassifyError> {
        let ctx = basis.context();
        let index = |name: &str| basis.index(name).ok_or_else(|| ClassifyError::Unknown(name.to_string()));
        let start = linear_in(&ctx.parse(str_of(v, "start")?)?, &basis.names)?;
        let steps = array_of(v, "steps")?
            .iter()
            .map(|s| {
                Ok(Step {
                    act: index(str_of(s, "act")?)?,
                    s: ctx.parse(str_of(s, "s")?)?,
                    cancels: match s.get("cancels").and_then(Value::as_str) {
                        Some(n) => Some(index(n)?),
                        None => None,
                    },
                })
            })
            .collect::<Result<_, ClassifyError>>()?;
        let target = match v.get("target").and_then(Value::as_str) {
            Some(name) => Target::Entry(name.to_string()),
            None => Target::Form(linear_in(&ctx.parse(str_of(v, "claim")?)?, &basis.names)?),
        };
        Ok(ReductionScript {
            name: str_of(v, "name")?.to_string(),
            assume: v.get("assume").and_then(Value::as_str).unwrap_or_default().to_string(),
            start,
            steps,
            target,
        })
    }
}

pub fn reduction_scripts() -> Vec<ReductionScript> {
    let basis = LieBasis::l10();
    let doc = load("reductions");
    array_of(&doc, "scripts")
        .and_then(|all| all.iter().map(|s| ReductionScript::from_json(s, &basis)).collect())
        .expect("bundled reduction scripts parse")
}

#[derive(Clone, Debug)]
pub struct StepRecord {
    pub step: Step,
    pub vector: Vec<Expr>,
    /// Whether the claimed coefficient vanished.
    pub cancelled: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Replay {
    pub script: String,
    pub records: Vec<StepRecord>,
    pub result: Vec<Expr>,
    pub target: Vec<Expr>,
    pub target_name: String,
    /// Coordinates where the result disagrees with the target.
    pub offending: Vec<usize>,
}

impl Replay {
    pub fn steps_ok(&self) -> bool {
        self.records.iter().all(|r| r.cancelled != Some(false))
    }

    pub fn pass(&self) -> bool {
        self.steps_ok() && self.offending.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let basis = &l10_adjoint().basis;
        json!({
            "script": self.script,
            "verdict": if self.pass() { "pass" } else { "fail" },
            "target": self.target_name,
            "target_form": render_combination(basis, &self.target),
            "result": render_combination(basis, &self.result),
            "offending": self.offending.iter().map(|&k| basis.names[k].clone()).collect::<Vec<_>>(),
            "steps": self.records.iter().map(|r| json!({
                "act": basis.names[r.step.act],
                "s": render_compact(&r.step.s),
                "cancels": r.step.cancels.map(|k| basis.names[k].clone()),
                "cancelled": r.cancelled,
                "vector": render_combination(basis, &r.vector),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_markdown(&self) -> String {
        let basis = &l10_adjoint().basis;
        let mut s = format!(
            "### {} ({})\n\ntarget {}: `{}`\n\n| step | s | claim | result |\n|---|---|---|---|\n",
            self.script,
            if self.pass() { "pass" } else { "fail" },
            self.target_name,
            render_combination(basis, &self.target)
        );
        for r in &self.records {
            let claim = match (r.step.cancels, r.cancelled) {
                (Some(k), Some(true)) => format!("{} cancelled", basis.names[k]),
                (Some(k), _) => format!("{} NOT cancelled", basis.names[k]),
                (None, _) => String::new(),
            };
            s.push_str(&format!(
                "| Ad(exp(s {})) | `{}` | {claim} | `{}` |\n",
                basis.names[r.step.act],
                render_compact(&r.step.s),
                render_combination(basis, &r.vector)
            ));
        }
        s.push_str(&format!("\nfinal: `{}`\n", render_combination(basis, &self.result)));
        s
    }
}

fn vanishes(e: &Expr) -> bool {
    matches!(zero_test(e), ZeroTest::Zero | ZeroTest::ProbablyZero)
}

/// `Ad(exp(s·X_i)) Σ v_j X_j` with the closed-form entries of the adjoint table.
pub fn apply_step(table: &AdjointTable, v: &[Expr], act: usize, s: &Expr) -> Result<Vec<Expr>, ClassifyError> {
    let n = v.len();
    let mut at = Bindings::new();
    at.insert(Expr::sym("s"), s.clone());
    let mut out = vec![Expr::zero(); n];
    for (j, vj) in v.iter().enumerate() {
        if vj.is_zero() {
            continue;
        }
        let entry = table.entry(act, j);
        if !entry.closure.is_closed() {
            return Err(ClassifyError::NotClosed(
                table.basis.names[act].clone(),
                table.basis.names[j].clone(),
            ));
        }
        for (k, c) in entry.as_exprs().iter().enumerate() {
            if !c.is_zero() {
                out[k] = &out[k] + &(vj * &substitute(c, &at));
            }
        }
    }
    Ok(out)
}

pub fn replay_reduction(script: &ReductionScript) -> Result<Replay, ClassifyError> {
    let table = l10_adjoint();
    let mut v = script.start.clone();
    let mut records = Vec::new();
    for step in &script.steps {
        v = apply_step(table, &v, step.act, &step.s)?;
        records.push(StepRecord {
            step: step.clone(),
            cancelled: step.cancels.map(|k| vanishes(&v[k])),
            vector: v.clone(),
        });
    }
    let (target_name, target) = match &script.target {
        Target::Entry(name) => (name.clone(), optimal_entry(name)?.coeffs),
        Target::Form(coeffs) => ("claimed form".to_string(), coeffs.clone()),
    };
    let offending = target
        .iter()
        .zip(&v)
        .enumerate()
        .filter(|(_, (want, got))| {
            if want.is_zero() {
                !vanishes(got)
            } else if want.as_num().is_some() {
                !vanishes(&(*got - *want))
            } else {
                false
            }
        })
        .map(|(k, _)| k)
        .collect();
    Ok(Replay {
        script: script.name.clone(),
        records,
        result: v,
        target,
        target_name,
        offending,
    })
}
