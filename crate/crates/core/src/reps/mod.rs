//! Highest-weight functionals and the unitarity sweep.
//!
//! * integrable: standard Borel, compact `omega`, `Lambda(h_i) = m_i >= 0`;
//! * verma: any rational `Lambda(h_i)`, compact or sign-twisted `omega`;
//! * elementary (`su(n,1)`): natural parabolic, sign-twisted `omega`,
//!   `Lambda(z^k x) = sum_i C_i^k Lambda_i(x)` with `|C_i^k| = 1`;
//! * exceptional (`su(n,1)`): upper-triangular loop parabolic, matrix
//!   `omega`, `Lambda(X) = -sum_k c_k a_00^(k)` for the moments `c_k` of a
//!   measure on the circle.
//!
//! Spec files are JSON objects with a `"type"` field, e.g.
//!
//! ```json
//! {"type": "integrable", "m": [1, 0]}
//! {"type": "verma", "lambda": ["-1"], "omega": "compact"}
//! {"type": "elementary", "n": 1, "weights": [["-2"]], "phases": ["1"]}
//! {"type": "exceptional", "n": 1, "moments": ["1", "0", "0"]}
//! ```

mod report;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::affine::{AffineAlgebra, LoopElement};
use crate::cartan::Gcm;
use crate::catalog::finite_matrix;
use crate::error::{KmxError, Result};
use crate::finite_lie::FiniteAlgebra;
use crate::scalar::{format_rational, int, rational_from_json, scalar_from_json, Rational, Scalar};
use crate::verma::{
    omega_table, psd_verdict, Action, BlockLabel, CartanFunctional, FormContext, Gen, Mode,
    OmegaKind, Route, Token, Verdict, Word,
};

pub use report::{
    block_text, BlockRecord, ConsistencyResult, ContextSummary, Overall, UnitarityReport, CONVENTIONS,
    TEXT_MATRIX_LIMIT,
};

/// Samples used by the consistency check run inside the constructors.
pub const DEFAULT_CONSISTENCY_SAMPLES: usize = 200;
const CONSISTENCY_SEED: u64 = 0x6b6d78;

type PhaseLookup = Arc<dyn Fn(usize, i64) -> Option<Scalar> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OmegaChoice {
    Compact,
    SignTwisted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrableWeight {
    pub m: Vec<i64>,
    pub d_value: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VermaWeight {
    pub lambda: Vec<Rational>,
    pub omega: OmegaChoice,
}

/// `C_i^k`: either a point `C_i` per weight (`C_i^k` is its `k`-th power)
/// or an explicit table keyed by `(i, k)` with `i` 0-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Phases {
    Points(Vec<Scalar>),
    Table(BTreeMap<(usize, i64), Scalar>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementarySpec {
    pub n: usize,
    /// `Lambda_i(h_j)`, one row per weight.
    pub weights: Vec<Vec<Rational>>,
    pub phases: Phases,
    pub c_value: Rational,
    pub d_value: Rational,
}

/// `c_0 .. c_K`; `c_-k = conj(c_k)` and `c_k = 0` for `k > K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    pub n: usize,
    pub moments: Vec<Scalar>,
    pub c_value: Rational,
    pub d_value: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionalSpec {
    Integrable(IntegrableWeight),
    Verma(VermaWeight),
    Elementary(ElementarySpec),
    Exceptional(MomentSequence),
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| KmxError::Parse(format!("spec is missing \"{key}\"")))
}

fn rational_field(obj: &Value, key: &str) -> Result<Rational> {
    obj.get(key).map_or(Ok(int(0)), rational_from_json)
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| KmxError::Parse(format!("\"{what}\" must be an array")))
}

fn usize_field(obj: &Value, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| KmxError::Parse(format!("\"{key}\" must be a nonnegative integer")))
}

impl FunctionalSpec {
    pub fn from_json(v: &Value, eps: f64) -> Result<FunctionalSpec> {
        let ty = field(v, "type")?
            .as_str()
            .ok_or_else(|| KmxError::Parse("\"type\" must be a string".into()))?;
        match ty {
            "integrable" => {
                let m = array(field(v, "m")?, "m")?
                    .iter()
                    .map(|x| {
                        x.as_i64().ok_or_else(|| {
                            KmxError::Rejected(format!(
                                "integrable weights need Lambda(h_i) = m_i in Z+, got {x}"
                            ))
                        })
                    })
                    .collect::<Result<Vec<i64>>>()?;
                Ok(FunctionalSpec::Integrable(IntegrableWeight { m, d_value: rational_field(v, "dValue")? }))
            }
            "verma" => {
                let lambda = array(field(v, "lambda")?, "lambda")?
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<Vec<_>>>()?;
                let omega = match v.get("omega").and_then(Value::as_str) {
                    None | Some("compact") => OmegaChoice::Compact,
                    Some("signTwisted") => OmegaChoice::SignTwisted,
                    Some(other) => {
                        return Err(KmxError::Parse(format!("unknown omega \"{other}\"")))
                    }
                };
                Ok(FunctionalSpec::Verma(VermaWeight { lambda, omega }))
            }
            "elementary" => {
                let n = usize_field(v, "n")?;
                let weights = array(field(v, "weights")?, "weights")?
                    .iter()
                    .map(|row| array(row, "weights")?.iter().map(rational_from_json).collect())
                    .collect::<Result<Vec<Vec<Rational>>>>()?;
                let phases = match (v.get("phases"), v.get("phaseTable")) {
                    (Some(p), None) => Phases::Points(
                        array(p, "phases")?.iter().map(|x| scalar_from_json(x, eps)).collect::<Result<_>>()?,
                    ),
                    (None, Some(t)) => {
                        let mut table = BTreeMap::new();
                        for e in array(t, "phaseTable")? {
                            let i = usize_field(e, "i")?;
                            if i == 0 {
                                return Err(KmxError::Parse("phase table weights are numbered from 1".into()));
                            }
                            let k = field(e, "k")?
                                .as_i64()
                                .ok_or_else(|| KmxError::Parse("\"k\" must be an integer".into()))?;
                            let value = scalar_from_json(field(e, "value")?, eps)?;
                            if table.insert((i - 1, k), value).is_some() {
                                return Err(KmxError::Parse(format!("phase (i={i}, k={k}) given twice")));
                            }
                        }
                        Phases::Table(table)
                    }
                    _ => {
                        return Err(KmxError::Parse(
                            "elementary specs need exactly one of \"phases\" and \"phaseTable\"".into(),
                        ))
                    }
                };
                Ok(FunctionalSpec::Elementary(ElementarySpec {
                    n,
                    weights,
                    phases,
                    c_value: rational_field(v, "cValue")?,
                    d_value: rational_field(v, "dValue")?,
                }))
            }
            "exceptional" => {
                let moments = array(field(v, "moments")?, "moments")?
                    .iter()
                    .map(|x| scalar_from_json(x, eps))
                    .collect::<Result<Vec<_>>>()?;
                Ok(FunctionalSpec::Exceptional(MomentSequence {
                    n: usize_field(v, "n")?,
                    moments,
                    c_value: rational_field(v, "cValue")?,
                    d_value: rational_field(v, "dValue")?,
                }))
            }
            other => Err(KmxError::Parse(format!("unknown functional type \"{other}\""))),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            FunctionalSpec::Integrable(_) => "integrable",
            FunctionalSpec::Verma(_) => "verma",
            FunctionalSpec::Elementary(_) => "elementary",
            FunctionalSpec::Exceptional(_) => "exceptional",
        }
    }
}

/// Records the first loop degree a table-backed functional was asked for
/// outside its table.
#[derive(Clone, Debug, Default)]
struct DegreeProbe {
    bound: i64,
    hit: Arc<Mutex<Option<i64>>>,
}

impl DegreeProbe {
    fn record(&self, k: i64) {
        let mut hit = self.hit.lock().unwrap_or_else(|e| e.into_inner());
        hit.get_or_insert(k);
    }

    fn check(&self) -> Result<()> {
        match *self.hit.lock().unwrap_or_else(|e| e.into_inner()) {
            Some(k) => Err(KmxError::Rejected(format!(
                "phase table covers |k| <= {} but degree {k} was needed",
                self.bound
            ))),
            None => Ok(()),
        }
    }
}

/// A form context together with what it was built from.
#[derive(Clone, Debug)]
pub struct HighestWeightModule {
    pub context: FormContext,
    pub summary: ContextSummary,
    probe: Option<DegreeProbe>,
}

impl HighestWeightModule {
    pub fn check_degrees(&self) -> Result<()> {
        self.probe.as_ref().map_or(Ok(()), DegreeProbe::check)
    }
}

fn is_type_a(gcm: &Gcm) -> bool {
    let n = gcm.n();
    finite_matrix('A', n).is_ok_and(|m| gcm.entries() == m.as_slice())
}

fn su_n1(n: usize) -> Result<Arc<AffineAlgebra>> {
    if n < 1 {
        return Err(KmxError::Rejected("su(n,1) requires n >= 1".into()));
    }
    let alg = FiniteAlgebra::new(&Gcm::new(finite_matrix('A', n)?)?)?;
    Ok(Arc::new(AffineAlgebra::new(alg)?))
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| ((*k).to_string(), v.clone())).collect()
}

fn rationals(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", parts.join(", "))
}

/// Integrable highest-weight module: rejects unless every `m_i >= 0`.
pub fn integrable_functional(algebra: &str, gcm: &Gcm, w: &IntegrableWeight) -> Result<HighestWeightModule> {
    if w.m.len() != gcm.n() {
        return Err(KmxError::Rejected(format!(
            "{algebra} has {} nodes but {} values Lambda(h_i) were given",
            gcm.n(),
            w.m.len()
        )));
    }
    if let Some(i) = w.m.iter().position(|&m| m < 0) {
        return Err(KmxError::Rejected(format!(
            "integrable weights need Lambda(h_i) = m_i in Z+, but m_{i} = {}",
            w.m[i]
        )));
    }
    let lambda = w.m.iter().map(|&m| Scalar::from_int(m)).collect();
    let context = FormContext::generators(gcm.clone(), lambda, vec![1; gcm.n()])?;
    let m: Vec<Rational> = w.m.iter().map(|&m| int(m)).collect();
    Ok(HighestWeightModule {
        context,
        summary: ContextSummary {
            algebra: algebra.to_string(),
            functional: "integrable".into(),
            mode: Mode::StandardBorel,
            omega: "compact".into(),
            parameters: params(&[("m", rationals(&m)), ("dValue", format_rational(&w.d_value))]),
        },
        probe: None,
    })
}

/// Verma module with arbitrary rational `Lambda(h_i)`.
pub fn verma_functional(algebra: &str, gcm: &Gcm, w: &VermaWeight) -> Result<HighestWeightModule> {
    let n = gcm.n();
    if w.lambda.len() != n {
        return Err(KmxError::Rejected(format!(
            "{algebra} has {n} nodes but {} values Lambda(h_i) were given",
            w.lambda.len()
        )));
    }
    let signs = match w.omega {
        OmegaChoice::Compact => vec![1; n],
        OmegaChoice::SignTwisted => {
            if !is_type_a(gcm) {
                return Err(KmxError::Unsupported(
                    "the sign-twisted omega is defined for su(n,1) only".into(),
                ));
            }
            (0..n).map(|i| if i == 0 { -1 } else { 1 }).collect()
        }
    };
    let lambda = w.lambda.iter().cloned().map(Scalar::from_rational).collect();
    let context = FormContext::generators(gcm.clone(), lambda, signs)?;
    let omega = match w.omega {
        OmegaChoice::Compact => "compact",
        OmegaChoice::SignTwisted => "signTwisted",
    };
    Ok(HighestWeightModule {
        context,
        summary: ContextSummary {
            algebra: algebra.to_string(),
            functional: "verma".into(),
            mode: Mode::StandardBorel,
            omega: omega.into(),
            parameters: params(&[("lambda", rationals(&w.lambda))]),
        },
        probe: None,
    })
}

fn is_unit(c: &Scalar) -> bool {
    c.norm_sqr().approx_eq(&Scalar::one())
}

fn reject_central(c_value: &Rational, d_value: &Rational) -> Result<()> {
    if *c_value != int(0) {
        return Err(KmxError::Rejected(format!(
            "Lambda(c) = {} is impossible: c = [z^j h, z^-j h'] / j(h,h') lies in [p, p]",
            format_rational(c_value)
        )));
    }
    if *d_value != int(0) {
        return Err(KmxError::Rejected(
            "Lambda(d) is not defined: d does not act on loop-parabolic modules".into(),
        ));
    }
    Ok(())
}

/// `C^k` for an integer `k`, with `C^-k = conj(C)^k`.
fn power(c: &Scalar, k: i64) -> Scalar {
    let base = if k >= 0 { c.clone() } else { c.conj() };
    let mut v = Scalar::one();
    for _ in 0..k.unsigned_abs() {
        v *= &base;
    }
    v
}

/// Elementary context without the consistency check.
pub fn elementary_context(spec: &ElementarySpec) -> Result<HighestWeightModule> {
    let aff = su_n1(spec.n)?;
    let n = spec.n;
    if spec.weights.is_empty() {
        return Err(KmxError::Rejected("elementary functionals need N >= 1 weights".into()));
    }
    if let Some(row) = spec.weights.iter().find(|r| r.len() != n) {
        return Err(KmxError::Rejected(format!(
            "each weight needs {n} values Lambda_i(h_j), got {}",
            row.len()
        )));
    }
    reject_central(&spec.c_value, &spec.d_value)?;
    let nw = spec.weights.len();
    let bad_phase = |c: &Scalar| {
        KmxError::Rejected(format!("phases need |C_i^k| = 1, but |{c}|^2 = {}", c.norm_sqr()))
    };
    let mut exact = true;
    let (table, probe): (PhaseLookup, Option<DegreeProbe>) =
        match &spec.phases {
            Phases::Points(points) => {
                if points.len() != nw {
                    return Err(KmxError::Rejected(format!(
                        "{nw} weights need {nw} phases, got {}",
                        points.len()
                    )));
                }
                if let Some(c) = points.iter().find(|c| !is_unit(c)) {
                    return Err(bad_phase(c));
                }
                exact &= points.iter().all(Scalar::is_exact);
                let points = points.clone();
                (Arc::new(move |i, k| Some(power(&points[i], k))), None)
            }
            Phases::Table(t) => {
                if let Some(c) = t.values().find(|c| !is_unit(c)) {
                    return Err(bad_phase(c));
                }
                if let Some(&(i, _)) = t.keys().find(|(i, _)| *i >= nw) {
                    return Err(KmxError::Rejected(format!(
                        "phase table names weight {} but only {nw} weights are given",
                        i + 1
                    )));
                }
                exact &= t.values().all(Scalar::is_exact);
                let bound = t.keys().map(|(_, k)| k.abs()).max().unwrap_or(0);
                let t = t.clone();
                let lookup = move |i: usize, k: i64| -> Option<Scalar> {
                    if k == 0 {
                        return Some(t.get(&(i, 0)).cloned().unwrap_or_else(Scalar::one));
                    }
                    t.get(&(i, k)).cloned().or_else(|| t.get(&(i, -k)).map(Scalar::conj))
                };
                (Arc::new(lookup), Some(DegreeProbe { bound, hit: Arc::default() }))
            }
        };
    let weights: Vec<Vec<Scalar>> = spec
        .weights
        .iter()
        .map(|r| r.iter().cloned().map(Scalar::from_rational).collect())
        .collect();
    let probe_in = probe.clone();
    let lam: CartanFunctional = Arc::new(move |k, j| {
        let mut acc = Scalar::zero();
        for (i, w) in weights.iter().enumerate() {
            match table(i, k) {
                Some(c) => acc += &(&c * &w[j]),
                None => {
                    if let Some(p) = &probe_in {
                        p.record(k);
                    }
                }
            }
        }
        acc
    });
    let omega = omega_table(aff.finite(), OmegaKind::SignTwisted)?;
    let context = FormContext::loop_route(
        aff,
        Mode::NaturalParabolic,
        omega,
        lam,
        Scalar::zero(),
        Scalar::zero(),
        exact,
    )?;
    let phases = match &spec.phases {
        Phases::Points(p) => p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
        Phases::Table(t) => t
            .iter()
            .map(|((i, k), c)| format!("C_{}^{k} = {c}", i + 1))
            .collect::<Vec<_>>()
            .join(", "),
    };
    let weights: Vec<String> = spec.weights.iter().map(|r| rationals(r)).collect();
    Ok(HighestWeightModule {
        context,
        summary: ContextSummary {
            algebra: format!("su({n},1)"),
            functional: "elementary".into(),
            mode: Mode::NaturalParabolic,
            omega: "signTwisted".into(),
            parameters: params(&[
                ("weights", format!("[{}]", weights.join(", "))),
                ("phases", format!("[{phases}]")),
                ("cValue", "0".into()),
                ("dValue", "0".into()),
            ]),
        },
        probe,
    })
}

fn consistency_gate(module: HighestWeightModule) -> Result<HighestWeightModule> {
    let r = consistency_check(&module, DEFAULT_CONSISTENCY_SAMPLES, CONSISTENCY_SEED)?;
    match r.counterexample {
        None => Ok(module),
        Some(u) => Err(KmxError::Rejected(format!(
            "Lambda(beta(u)) != conj Lambda(beta(omega u)) for u = {u}"
        ))),
    }
}

/// Elementary module of `su(n,1)`, rejected when the consistency condition
/// fails on a sampled product.
pub fn elementary_functional(spec: &ElementarySpec) -> Result<HighestWeightModule> {
    consistency_gate(elementary_context(spec)?)
}

fn toeplitz(moments: &[Scalar], size: usize) -> Vec<Vec<Scalar>> {
    let c = |k: i64| -> Scalar {
        let a = k.unsigned_abs() as usize;
        match moments.get(a) {
            Some(v) if k >= 0 => v.clone(),
            Some(v) => v.conj(),
            None => Scalar::zero(),
        }
    };
    (0..size).map(|i| (0..size).map(|j| c(i as i64 - j as i64)).collect()).collect()
}

/// Toeplitz matrices `[c_(i-j)]` of sizes `1 ..= K+1` must be psd.
pub fn check_moments(moments: &[Scalar]) -> Result<()> {
    let Some(c0) = moments.first() else {
        return Err(KmxError::Rejected("moment sequences need c_0".into()));
    };
    if c0.real_sign() != Some(std::cmp::Ordering::Greater) {
        return Err(KmxError::Rejected(format!("moments need c_0 real and > 0, got {c0}")));
    }
    for size in 1..=moments.len() {
        let t = toeplitz(moments, size);
        if let Verdict::Indefinite { witness, value } = psd_verdict(&t)? {
            let rows: Vec<String> = t
                .iter()
                .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            let w: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
            return Err(KmxError::Rejected(format!(
                "moments are not those of a positive measure: Toeplitz matrix [{}] of size {size} has x*Tx = {value} at x = [{}]",
                rows.join(", "),
                w.join(", ")
            )));
        }
    }
    Ok(())
}

/// Exceptional module of `su(n,1)` from the moments of a measure on the circle.
pub fn exceptional_functional(mom: &MomentSequence) -> Result<HighestWeightModule> {
    let aff = su_n1(mom.n)?;
    reject_central(&mom.c_value, &mom.d_value)?;
    check_moments(&mom.moments)?;
    let exact = mom.moments.iter().all(Scalar::is_exact);
    let moments = mom.moments.clone();
    // a_00 of z^k h_j is z^k for j = 0 and 0 otherwise.
    let lam: CartanFunctional = Arc::new(move |k, j| {
        if j != 0 {
            return Scalar::zero();
        }
        let a = k.unsigned_abs() as usize;
        match moments.get(a) {
            Some(v) if k >= 0 => -v,
            Some(v) => -&v.conj(),
            None => Scalar::zero(),
        }
    });
    let omega = omega_table(aff.finite(), OmegaKind::Matrix)?;
    let context = FormContext::loop_route(
        aff,
        Mode::ExceptionalParabolic,
        omega,
        lam,
        Scalar::zero(),
        Scalar::zero(),
        exact,
    )?;
    let ms: Vec<String> = mom.moments.iter().map(|c| c.to_string()).collect();
    consistency_gate(HighestWeightModule {
        context,
        summary: ContextSummary {
            algebra: format!("su({},1)", mom.n),
            functional: "exceptional".into(),
            mode: Mode::ExceptionalParabolic,
            omega: "matrix".into(),
            parameters: params(&[
                ("moments", format!("[{}]", ms.join(", "))),
                ("cValue", "0".into()),
                ("dValue", "0".into()),
            ]),
        },
        probe: None,
    })
}

/// Builds a module from a parsed spec. `gcm` is the algebra for the
/// integrable and verma types; for the `su(n,1)` types it is optional and
/// must be `A_n` when given.
pub fn build_module(spec: &FunctionalSpec, algebra: Option<(&str, &Gcm)>) -> Result<HighestWeightModule> {
    let need = || KmxError::Rejected(format!("{} specs need an algebra", spec.type_name()));
    let check_su = |n: usize| -> Result<()> {
        match algebra {
            Some((name, gcm)) if !(is_type_a(gcm) && gcm.n() == n) => Err(KmxError::Rejected(format!(
                "{} specs are defined on su({n},1) = A{n}, not {name}",
                spec.type_name()
            ))),
            _ => Ok(()),
        }
    };
    match spec {
        FunctionalSpec::Integrable(w) => {
            let (name, gcm) = algebra.ok_or_else(need)?;
            integrable_functional(name, gcm, w)
        }
        FunctionalSpec::Verma(w) => {
            let (name, gcm) = algebra.ok_or_else(need)?;
            verma_functional(name, gcm, w)
        }
        FunctionalSpec::Elementary(s) => {
            check_su(s.n)?;
            elementary_functional(s)
        }
        FunctionalSpec::Exceptional(m) => {
            check_su(m.n)?;
            exceptional_functional(m)
        }
    }
}

/// All nonnegative vectors of length `n` with entry sum at most `depth`,
/// ordered by sum and then lexicographically.
pub fn drops_up_to(n: usize, depth: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, depth.max(0), &mut Vec::new(), &mut out);
    out.sort_by_key(|d| (d.iter().sum::<i64>(), d.clone()));
    out
}

/// Worker count from `KMX_THREADS`, if set.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("KMX_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|&n| n > 0)
}

/// Gram blocks for every drop of height `<= depth` (and degree window
/// `window` in the parabolic modes).
pub fn verify_unitarity(
    module: &HighestWeightModule,
    depth: i64,
    window: Option<i64>,
    threads: Option<usize>,
) -> Result<UnitarityReport> {
    if depth < 0 {
        return Err(KmxError::Rejected("depth must be nonnegative".into()));
    }
    let ctx = &module.context;
    let window = match ctx.mode() {
        Mode::StandardBorel => None,
        _ => Some(window.ok_or_else(|| {
            KmxError::Rejected("parabolic modules need a degree window".into())
        })?),
    };
    if let Some(p) = &module.probe {
        let needed = 2 * depth * window.unwrap_or(0);
        if needed > p.bound {
            return Err(KmxError::Rejected(format!(
                "phase table covers |k| <= {} but depth {depth} with window {} needs |k| <= {needed}",
                p.bound,
                window.unwrap_or(0)
            )));
        }
    }
    let labels: Vec<BlockLabel> = drops_up_to(ctx.drop_len(), depth)
        .into_iter()
        .map(|drop| BlockLabel { drop, window })
        .collect();
    let run = || -> Vec<Result<BlockRecord>> {
        labels
            .par_iter()
            .map(|l| ctx.gram_block(l).map(|b| BlockRecord::from_block(ctx, &b)))
            .collect()
    };
    let results = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| KmxError::Internal(e.to_string()))?
            .install(run),
        None => run(),
    };
    module.check_degrees()?;
    let mut blocks = Vec::new();
    let mut resource: Option<String> = None;
    for r in results {
        match r {
            Ok(b) => blocks.push(b),
            Err(e @ KmxError::Resource(_)) => {
                resource.get_or_insert(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let overall = match blocks.iter().find(|b| !b.verdict.is_psd()) {
        Some(b) => {
            let Verdict::Indefinite { witness, value } = &b.verdict else { unreachable!() };
            Overall::NonUnitary {
                drop: b.drop.clone(),
                window: b.window,
                witness: witness.clone(),
                value: value.clone(),
            }
        }
        None => match resource {
            Some(reason) => Overall::Inconclusive { reason },
            None => Overall::UnitaryUpToDepth { depth },
        },
    };
    let exact = ctx.is_exact() && blocks.iter().all(|b| b.exact);
    Ok(UnitarityReport {
        context: module.summary.clone(),
        depth,
        window,
        overall,
        exact,
        consistency: None,
        conventions: CONVENTIONS.into(),
        blocks,
    })
}

/// A random element of `U(g)` as a product of factors, left to right.
fn random_product(
    module: &HighestWeightModule,
    rng: &mut StdRng,
    pool: &[Word],
) -> Result<Vec<Action>> {
    let ctx = &module.context;
    let token = |t: &Token| -> Action {
        match t {
            Token::F(i) => Action::Gen(Gen::F(*i), Scalar::one()),
            Token::Z { deg, basis } => Action::Loop(LoopElement::term(*deg, *basis, Scalar::one())),
        }
    };
    let gaussian = |rng: &mut StdRng| {
        Scalar::gaussian(int(rng.gen_range(-3..=3)), int(rng.gen_range(-3..=3)))
    };
    let cartan = |rng: &mut StdRng| -> Action {
        match ctx.route() {
            Route::Generators(_) => {
                Action::Gen(Gen::H(rng.gen_range(0..ctx.drop_len())), gaussian(rng))
            }
            Route::Loop(_) => {
                let aff = ctx.affine().expect("loop route");
                let alg = aff.finite();
                let deg = rng.gen_range(-1..=1);
                let j = rng.gen_range(0..alg.rank());
                Action::Loop(LoopElement::term(deg, alg.h(j), gaussian(rng)))
            }
        }
    };
    let mut factors = Vec::new();
    if rng.gen_bool(0.2) {
        factors.push(cartan(rng));
        return Ok(factors);
    }
    let w1 = &pool[rng.gen_range(0..pool.len())];
    let same: Vec<&Word> = pool.iter().filter(|w| ctx.word_drop(w) == ctx.word_drop(w1)).collect();
    let w2 = same[rng.gen_range(0..same.len())];
    for t in w2.iter().rev() {
        factors.push(ctx.omega_action(&token(t))?);
    }
    if rng.gen_bool(0.5) {
        factors.push(cartan(rng));
    }
    factors.extend(w1.iter().map(token));
    Ok(factors)
}

fn loop_degree_mass(factors: &[Action]) -> i64 {
    factors
        .iter()
        .map(|a| match a {
            Action::Loop(x) => x.terms().keys().map(|(k, _)| k.abs()).max().unwrap_or(0),
            Action::Gen(..) => 0,
        })
        .sum()
}

fn describe(ctx: &FormContext, factors: &[Action]) -> String {
    let parts: Vec<String> = factors
        .iter()
        .map(|a| match a {
            Action::Gen(g, c) => {
                let name = match g {
                    Gen::E(i) => format!("e{i}"),
                    Gen::F(i) => format!("f{i}"),
                    Gen::H(i) => format!("h{i}"),
                };
                format!("({c}){name}")
            }
            Action::Loop(x) => {
                let aff = ctx.affine().expect("loop route");
                let terms: Vec<String> = x
                    .terms()
                    .iter()
                    .map(|((k, b), c)| format!("({c}) z^{k} {}", aff.finite().basis_name(*b)))
                    .collect();
                format!("[{}]", terms.join(" + "))
            }
        })
        .collect();
    parts.join(" * ")
}

/// Samples products `u` and compares `Lambda(beta(u))` with
/// `conj Lambda(beta(omega u))`.
pub fn consistency_check(module: &HighestWeightModule, samples: usize, seed: u64) -> Result<ConsistencyResult> {
    let ctx = &module.context;
    let mut rng = StdRng::seed_from_u64(seed);
    let window = match ctx.mode() {
        Mode::StandardBorel => None,
        _ => Some(1),
    };
    let mut pool: Vec<Word> = Vec::new();
    for drop in drops_up_to(ctx.drop_len(), 2) {
        pool.extend(ctx.block_words(&BlockLabel { drop, window })?);
    }
    let bound = module.probe.as_ref().map(|p| p.bound);
    let ev = ctx.evaluator();
    for done in 0..samples {
        let mut u = random_product(module, &mut rng, &pool)?;
        if let Some(b) = bound {
            while loop_degree_mass(&u) > b {
                u = random_product(module, &mut rng, &pool)?;
            }
        }
        let omega_u: Vec<Action> =
            u.iter().rev().map(|x| ctx.omega_action(x)).collect::<Result<_>>()?;
        let lhs = ev.lambda_beta(&u)?;
        let rhs = ev.lambda_beta(&omega_u)?.conj();
        if !lhs.approx_eq(&rhs) {
            return Ok(ConsistencyResult {
                samples: done + 1,
                passed: false,
                counterexample: Some(format!(
                    "{} (Lambda(beta(u)) = {lhs}, conj Lambda(beta(omega u)) = {rhs})",
                    describe(ctx, &u)
                )),
            });
        }
    }
    module.check_degrees()?;
    Ok(ConsistencyResult { samples, passed: true, counterexample: None })
}
