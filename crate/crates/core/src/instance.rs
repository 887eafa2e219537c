//! Instance types for the three problem shapes, validation, exact violation
//! reports and the JSON instance format.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rational::{dot_int, Rat};

/// `min { w x : H x = b, l <= x <= u, x integer }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralIp {
    #[serde(rename = "H")]
    pub h: RatMatrix,
    pub b: Vec<Rat>,
    pub w: Vec<Rat>,
    pub l: Vec<i64>,
    pub u: Vec<i64>,
}

/// One block of a configuration-form n-fold instance: the block contributes
/// `D p` to the coupling rows for the chosen configuration `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigBlock {
    #[serde(rename = "D")]
    pub d: RatMatrix,
    pub configs: Vec<Vec<i64>>,
    pub weights: Vec<Rat>,
}

/// `min { sum w^i x^i : sum D^i x^i = b0, x^i in P^i }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NFoldConfigInstance {
    pub blocks: Vec<ConfigBlock>,
    pub b0: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonnegBlock {
    #[serde(rename = "A")]
    pub a: RatMatrix,
    #[serde(rename = "D")]
    pub d: RatMatrix,
    pub bi: Vec<Rat>,
    pub u: Vec<i64>,
    pub w: Vec<Rat>,
}

/// `min { sum w^i x^i : sum D^i x^i = b0, A^i x^i = b^i, 0 <= x <= u }` with
/// nonnegative `A^i`, `D^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NFoldNonnegInstance {
    pub blocks: Vec<NonnegBlock>,
    pub b0: Vec<Rat>,
}

/// Accuracy parameter and solver limits shared by the pipelines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxParams {
    pub epsilon: Rat,
    /// Replaces the closed-form initial discretization width.
    pub delta_override: Option<Rat>,
    /// How many times the width may be halved after a failed exact check.
    pub refinement_limit: u32,
    pub node_limit: u64,
    /// Upper bound on enumerated configurations per block.
    pub config_cap: u64,
    /// Record nonsingularity and rank audits of every vertex solution.
    pub audit: bool,
}

impl ApproxParams {
    pub fn new(epsilon: Rat) -> Self {
        ApproxParams {
            epsilon,
            delta_override: None,
            refinement_limit: 20,
            node_limit: crate::mip::DEFAULT_NODE_LIMIT,
            config_cap: 1_000_000,
            audit: false,
        }
    }

    pub fn with_audit(mut self) -> Self {
        self.audit = true;
        self
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !self.epsilon.is_positive() {
            return Err(Error::InvalidInstance(vec![format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )]));
        }
        if let Some(d) = &self.delta_override {
            if !d.is_positive() {
                return Err(Error::InvalidInstance(vec![format!("delta must be positive, got {d}")]));
            }
        }
        Ok(())
    }
}

/// How a residual is judged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum Tolerance {
    /// `|residual_r| <= bound` for every row.
    Additive(Rat),
    /// `|residual_r| <= epsilon * |target_r|` for every row, i.e. the row value
    /// lies in `[(1-eps) b, (1+eps) b]` for nonnegative `b`.
    Multiplicative(Rat),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub residual: Vec<Rat>,
    pub max_abs_residual: Rat,
    pub bound: Rat,
    pub within_bound: bool,
    pub objective: Rat,
    pub tolerance: Tolerance,
}

impl ViolationReport {
    /// Judges `values - targets` row by row.
    pub fn from_rows(values: &[Rat], targets: &[Rat], tolerance: Tolerance, objective: Rat) -> Self {
        let residual: Vec<Rat> = values.iter().zip(targets).map(|(v, t)| v - t).collect();
        let max_abs_residual = residual.iter().map(Rat::abs).max().unwrap_or_else(Rat::zero);
        let (bound, within_bound) = match &tolerance {
            Tolerance::Additive(bound) => (bound.clone(), max_abs_residual <= *bound),
            Tolerance::Multiplicative(eps) => {
                let ok = residual.iter().zip(targets).all(|(r, t)| r.abs() <= eps * &t.abs());
                (eps.clone(), ok)
            }
        };
        ViolationReport { residual, max_abs_residual, bound, within_bound, objective, tolerance }
    }
}

fn mismatch(what: String) -> Error {
    Error::DimensionMismatch(what)
}

impl GeneralIp {
    pub fn m(&self) -> usize {
        self.h.rows()
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// `‖H‖∞`.
    pub fn delta(&self) -> Rat {
        self.h.inf_norm()
    }

    /// Checks the invariants and returns `Δ = ‖H‖∞` on success.
    pub fn validate(&self) -> std::result::Result<Rat, Vec<String>> {
        let mut issues = Vec::new();
        let (m, n) = (self.m(), self.n());
        if m == 0 {
            issues.push("constraint matrix has no rows (m >= 1 required)".to_string());
        }
        if n == 0 {
            issues.push("constraint matrix has no columns (n >= 1 required)".to_string());
        }
        if self.b.len() != m {
            issues.push(format!("dimension mismatch: b has length {}, H has {m} rows", self.b.len()));
        }
        for (name, len) in [("w", self.w.len()), ("l", self.l.len()), ("u", self.u.len())] {
            if len != n {
                issues.push(format!("dimension mismatch: {name} has length {len}, H has {n} columns"));
            }
        }
        for (j, (l, u)) in self.l.iter().zip(&self.u).enumerate() {
            if l > u {
                issues.push(format!("bounds crossed at variable {j}: l = {l} > u = {u}"));
            }
        }
        if issues.is_empty() {
            Ok(self.delta())
        } else {
            Err(issues)
        }
    }

    pub fn objective(&self, x: &[i64]) -> Rat {
        dot_int(&self.w, x)
    }

    pub fn violation_report(&self, x: &[i64], tolerance: Tolerance) -> Result<ViolationReport> {
        if x.len() != self.n() {
            return Err(mismatch(format!("solution has length {}, expected {}", x.len(), self.n())));
        }
        if let Some(j) = (0..x.len()).find(|&j| x[j] < self.l[j] || x[j] > self.u[j]) {
            return Err(Error::InvalidInstance(vec![format!(
                "solution entry {j} = {} outside [{}, {}]",
                x[j], self.l[j], self.u[j]
            )]));
        }
        let hx = self.h.mul_int_vec(x);
        Ok(ViolationReport::from_rows(&hx, &self.b, tolerance, self.objective(x)))
    }
}

impl NFoldConfigInstance {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn s(&self) -> usize {
        self.b0.len()
    }

    pub fn t(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.d.cols())
    }

    /// `max_i ‖D^i‖∞`.
    pub fn delta(&self) -> Rat {
        self.blocks.iter().map(|b| b.d.inf_norm()).max().unwrap_or_else(Rat::zero)
    }

    /// Largest absolute entry over all configurations.
    pub fn kappa(&self) -> i64 {
        self.blocks
            .iter()
            .flat_map(|b| b.configs.iter().flatten())
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> std::result::Result<Rat, Vec<String>> {
        let mut issues = Vec::new();
        if self.blocks.is_empty() {
            issues.push("instance has no blocks".to_string());
        }
        let (s, t) = (self.s(), self.t());
        for (i, blk) in self.blocks.iter().enumerate() {
            if blk.d.rows() != s {
                issues.push(format!("dimension mismatch: block {i} D has {} rows, b0 has length {s}", blk.d.rows()));
            }
            if blk.d.cols() != t {
                issues.push(format!("dimension mismatch: block {i} D has {} columns, expected {t}", blk.d.cols()));
            }
            if blk.weights.len() != t {
                issues.push(format!("dimension mismatch: block {i} weights have length {}, expected {t}", blk.weights.len()));
            }
            for (p, c) in blk.configs.iter().enumerate() {
                if c.len() != t {
                    issues.push(format!("dimension mismatch: block {i} config {p} has length {}, expected {t}", c.len()));
                }
            }
        }
        if issues.is_empty() {
            Ok(self.delta())
        } else {
            Err(issues)
        }
    }

    /// Sum of `D^i x^i` for a flattened solution (blocks concatenated).
    pub fn coupling(&self, x: &[i64]) -> Result<Vec<Rat>> {
        let t = self.t();
        if x.len() != self.n() * t {
            return Err(mismatch(format!("solution has length {}, expected {}", x.len(), self.n() * t)));
        }
        let mut acc = vec![Rat::zero(); self.s()];
        for (blk, xi) in self.blocks.iter().zip(x.chunks(t.max(1))) {
            for (a, v) in acc.iter_mut().zip(blk.d.mul_int_vec(xi)) {
                *a += v;
            }
        }
        Ok(acc)
    }

    pub fn objective(&self, x: &[i64]) -> Rat {
        let t = self.t().max(1);
        self.blocks.iter().zip(x.chunks(t)).map(|(b, xi)| dot_int(&b.weights, xi)).sum()
    }

    /// Whether every block's part of `x` is one of its configurations.
    pub fn members(&self, x: &[i64]) -> bool {
        let t = self.t();
        x.len() == self.n() * t
            && self
                .blocks
                .iter()
                .zip(x.chunks(t.max(1)))
                .all(|(b, xi)| b.configs.iter().any(|c| c == xi))
    }

    pub fn violation_report(&self, x: &[i64], tolerance: Tolerance) -> Result<ViolationReport> {
        let lhs = self.coupling(x)?;
        Ok(ViolationReport::from_rows(&lhs, &self.b0, tolerance, self.objective(x)))
    }
}

impl NFoldNonnegInstance {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn s_a(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.a.rows())
    }

    pub fn s_d(&self) -> usize {
        self.b0.len()
    }

    pub fn t(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.a.cols())
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut issues = Vec::new();
        if self.blocks.is_empty() {
            issues.push("instance has no blocks".to_string());
        }
        let (sa, sd, t) = (self.s_a(), self.s_d(), self.t());
        for (i, blk) in self.blocks.iter().enumerate() {
            if blk.a.rows() != sa || blk.a.cols() != t {
                issues.push(format!(
                    "dimension mismatch: block {i} A is {}x{}, expected {sa}x{t}",
                    blk.a.rows(),
                    blk.a.cols()
                ));
            }
            if blk.d.rows() != sd || blk.d.cols() != t {
                issues.push(format!(
                    "dimension mismatch: block {i} D is {}x{}, expected {sd}x{t}",
                    blk.d.rows(),
                    blk.d.cols()
                ));
            }
            if blk.bi.len() != sa {
                issues.push(format!("dimension mismatch: block {i} bi has length {}, expected {sa}", blk.bi.len()));
            }
            if blk.u.len() != t || blk.w.len() != t {
                issues.push(format!("dimension mismatch: block {i} u/w lengths must equal {t}"));
            }
            if blk.a.entries().any(Rat::is_negative) {
                issues.push(format!("block {i} A has a negative entry"));
            }
            if blk.d.entries().any(Rat::is_negative) {
                issues.push(format!("block {i} D has a negative entry"));
            }
            if let Some(j) = blk.u.iter().position(|&u| u < 0) {
                issues.push(format!("block {i} upper bound u[{j}] is negative"));
            }
            if blk.bi.iter().any(Rat::is_negative) {
                issues.push(format!("block {i} has a negative right-hand side"));
            }
        }
        if self.b0.iter().any(Rat::is_negative) {
            issues.push("b0 has a negative entry".to_string());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    fn check_solution(&self, x: &[i64]) -> Result<()> {
        let t = self.t();
        if x.len() != self.n() * t {
            return Err(mismatch(format!("solution has length {}, expected {}", x.len(), self.n() * t)));
        }
        for (i, (blk, xi)) in self.blocks.iter().zip(x.chunks(t.max(1))).enumerate() {
            if let Some(j) = (0..t).find(|&j| xi[j] < 0 || xi[j] > blk.u[j]) {
                return Err(Error::InvalidInstance(vec![format!(
                    "block {i} entry {j} = {} outside [0, {}]",
                    xi[j], blk.u[j]
                )]));
            }
        }
        Ok(())
    }

    pub fn objective(&self, x: &[i64]) -> Rat {
        let t = self.t().max(1);
        self.blocks.iter().zip(x.chunks(t)).map(|(b, xi)| dot_int(&b.w, xi)).sum()
    }

    /// Row values and targets: the coupling rows first, then every block's
    /// local rows in block order.
    pub fn rows(&self, x: &[i64]) -> Result<(Vec<Rat>, Vec<Rat>)> {
        self.check_solution(x)?;
        let t = self.t().max(1);
        let mut values = vec![Rat::zero(); self.s_d()];
        let mut targets = self.b0.clone();
        let mut local = Vec::new();
        for (blk, xi) in self.blocks.iter().zip(x.chunks(t)) {
            for (a, v) in values.iter_mut().zip(blk.d.mul_int_vec(xi)) {
                *a += v;
            }
            local.extend(blk.a.mul_int_vec(xi));
            targets.extend(blk.bi.iter().cloned());
        }
        values.extend(local);
        Ok((values, targets))
    }

    pub fn violation_report(&self, x: &[i64], tolerance: Tolerance) -> Result<ViolationReport> {
        let (values, targets) = self.rows(x)?;
        Ok(ViolationReport::from_rows(&values, &targets, tolerance, self.objective(x)))
    }
}

/// Scheduling instance for `Rm||Cmax` and its cost variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleInstance {
    pub jobs: Vec<Vec<Rat>>,
    pub cmax: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<Vec<Rat>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Rat>,
}

/// Any instance accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceFile {
    General(GeneralIp),
    NFoldConfig(NFoldConfigInstance),
    NFoldNonneg(NFoldNonnegInstance),
    Schedule(ScheduleInstance),
}

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ParseError {
    /// JSON path of the offending value, `$` for the document root.
    pub path: String,
    pub message: String,
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError { path: path.into(), message: message.into() }
}

fn join_path(path: &serde_path_to_error::Path) -> String {
    let p = path.to_string();
    if p == "." || p.is_empty() {
        "$".to_string()
    } else {
        format!("$.{p}")
    }
}

fn typed<T: serde::de::DeserializeOwned>(value: Value) -> std::result::Result<T, ParseError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = join_path(e.path());
        parse_err(path, e.into_inner().to_string())
    })
}

/// Variable bounds must be JSON integers; `null`, strings such as `"inf"` and
/// floats are rejected with the path of the entry.
fn check_bounds(value: &Value, pointer: &str, label: &str) -> std::result::Result<(), ParseError> {
    let Some(arr) = value.pointer(pointer).and_then(Value::as_array) else {
        return Ok(());
    };
    for (j, v) in arr.iter().enumerate() {
        if v.as_i64().is_none() {
            let path = format!("$.{label}[{j}]");
            let msg = match v {
                Value::Null => "infinite bound (bounds must be finite integers)".to_string(),
                Value::String(s) if s.to_ascii_lowercase().contains("inf") => {
                    "infinite bound (bounds must be finite integers)".to_string()
                }
                other => format!("ill-formed bound {other} (expected an integer)"),
            };
            return Err(parse_err(path, msg));
        }
    }
    Ok(())
}

impl InstanceFile {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceFile::General(_) => "general",
            InstanceFile::NFoldConfig(_) => "nfold_config",
            InstanceFile::NFoldNonneg(_) => "nfold_nonneg",
            InstanceFile::Schedule(_) => "schedule",
        }
    }

    pub fn from_json_str(s: &str) -> std::result::Result<Self, ParseError> {
        let value: Value = serde_json::from_str(s).map_err(|e| parse_err("$", e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(mut value: Value) -> std::result::Result<Self, ParseError> {
        let Some(obj) = value.as_object_mut() else {
            return Err(parse_err("$", "instance must be a JSON object"));
        };
        let kind = match obj.remove("kind") {
            Some(Value::String(k)) => k,
            Some(other) => return Err(parse_err("$.kind", format!("expected a string, got {other}"))),
            None if obj.contains_key("jobs") => "schedule".to_string(),
            None => return Err(parse_err("$.kind", "missing field")),
        };
        match obj.remove("format") {
            Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(parse_err("$.format", format!("unsupported format version {v}, expected {FORMAT_VERSION}")))
            }
            None if kind == "schedule" => {}
            None => return Err(parse_err("$.format", "missing field")),
        }
        match kind.as_str() {
            "general" => {
                check_bounds(&value, "/l", "l")?;
                check_bounds(&value, "/u", "u")?;
                Ok(InstanceFile::General(typed(value)?))
            }
            "nfold_config" => Ok(InstanceFile::NFoldConfig(typed(value)?)),
            "nfold_nonneg" => {
                if let Some(blocks) = value.pointer("/blocks").and_then(Value::as_array) {
                    for (i, _) in blocks.iter().enumerate() {
                        check_bounds(&value, &format!("/blocks/{i}/u"), &format!("blocks[{i}].u"))?;
                    }
                }
                Ok(InstanceFile::NFoldNonneg(typed(value)?))
            }
            "schedule" => Ok(InstanceFile::Schedule(typed(value)?)),
            other => Err(parse_err("$.kind", format!("unknown kind {other:?}"))),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let (kind, mut v) = match self {
            InstanceFile::General(g) => ("general", serde_json::to_value(g)),
            InstanceFile::NFoldConfig(c) => ("nfold_config", serde_json::to_value(c)),
            InstanceFile::NFoldNonneg(c) => ("nfold_nonneg", serde_json::to_value(c)),
            InstanceFile::Schedule(s) => return serde_json::to_value(s).expect("serializable"),
        };
        let mut out = serde_json::Map::new();
        out.insert("format".into(), Value::from(FORMAT_VERSION));
        out.insert("kind".into(), Value::from(kind));
        if let Ok(Value::Object(fields)) = v.as_mut().map(std::mem::take) {
            out.extend(fields);
        }
        Value::Object(out)
    }

    /// Runs the kind-specific validation, returning the list of issues.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        match self {
            InstanceFile::General(g) => g.validate().map(|_| ()),
            InstanceFile::NFoldConfig(c) => c.validate().map(|_| ()),
            InstanceFile::NFoldNonneg(c) => c.validate(),
            InstanceFile::Schedule(s) => crate::apps::validate_schedule(s),
        }
    }
}
