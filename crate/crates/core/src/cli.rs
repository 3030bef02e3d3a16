//! Request model behind the `gft` command line: document loading, command
//! dispatch, exit statuses and report artifacts.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{random_corpus, AnalyticFunction, CoeffList, FunctionSpec, SchwarzFunction};
use crate::criteria::{criterion, ClassId, CriterionSpec, Quantity};
use crate::harness::{
    check_conclusion, check_hypothesis, corpus_run, jack_probe, standard_sweep_criteria, verify_implication,
    Consistency, Outcome, Verdict,
};
use crate::report::{grid_dump, write_grid_csv};
use crate::scanner::ScanConfig;
use crate::series::DEFAULT_ORDER;

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_SATISFIED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NOT_APPLICABLE: u8 = 3;

/// A usage or document error, reported with exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Conclusion,
    Implication,
    Jack,
    Corpus,
    Grid,
}

/// Everything one invocation needs. This is also the `input` echo of
/// every report, so a report can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<CriterionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<CriterionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<CoeffList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl RunRequest {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            functions: Vec::new(),
            criteria: Vec::new(),
            class: None,
            w: None,
            r: None,
            scan: ScanConfig::default(),
            seed: None,
            count: None,
            rho: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Json(String),
    Csv(String),
}

impl Artifact {
    pub fn text(&self) -> &str {
        match self {
            Artifact::Json(s) | Artifact::Csv(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: u8,
    pub artifact: Artifact,
}

/// Reads a document argument: inline JSON when it starts with `{` or `[`,
/// otherwise a file path. Parse errors carry `source:line:column`.
pub fn load_document(arg: &str) -> Result<Value, UsageError> {
    let trimmed = arg.trim_start();
    let (source, text) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        ("<inline>".to_string(), arg.to_string())
    } else {
        let path = Path::new(arg);
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{arg}: {e}")))?;
        (arg.to_string(), text)
    };
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("{source}:{}:{}: {e}", e.line(), e.column())))
}

fn decode<T: serde::de::DeserializeOwned>(what: &str, v: Value) -> Result<T, UsageError> {
    serde_json::from_value(v).map_err(|e| usage(format!("invalid {what} document: {e}")))
}

/// One document or an array of them.
fn decode_many<T: serde::de::DeserializeOwned>(what: &str, v: Value) -> Result<Vec<T>, UsageError> {
    match v {
        Value::Array(items) => items.into_iter().map(|x| decode(what, x)).collect(),
        other => Ok(vec![decode(what, other)?]),
    }
}

pub fn parse_functions(arg: &str) -> Result<Vec<FunctionSpec>, UsageError> {
    decode_many("function", load_document(arg)?)
}

/// Criterion documents, or a bare selector name (`reG`, `t2_minus`,
/// `memb_Sstar`, ...) which takes default parameters.
pub fn parse_criteria(arg: &str) -> Result<Vec<CriterionSpec>, UsageError> {
    let t = arg.trim();
    let bare = !t.is_empty() && t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !Path::new(t).exists();
    if bare {
        return Ok(vec![default_spec(t)]);
    }
    decode_many("criterion", load_document(arg)?)
}

/// Parameters used for bare selector names: β = γ = δ = 1, α = 0 (1 for
/// T4), λ = 1, μ = 1.
pub fn default_spec(kind: &str) -> CriterionSpec {
    let lower = kind.to_ascii_lowercase();
    let alpha = if lower == "t4" { 1.0 } else { 0.0 };
    let mut s = CriterionSpec::new(kind);
    match lower.as_str() {
        "t1" => s = CriterionSpec { kind: kind.into(), ..CriterionSpec::t1(1.0, 1.0, 1.0) },
        "c1" => s.lambda = Some(1.0),
        "c2" | "t2_minus" | "t2_plus" => {
            s.beta = Some(1.0);
            s.gamma = Some(1.0);
        }
        "t3" => s = CriterionSpec { kind: kind.into(), ..CriterionSpec::t3(alpha, 1.0, 1.0) },
        "t4" => s = CriterionSpec { kind: kind.into(), ..CriterionSpec::t4(alpha, 1.0) },
        "memb_c" | "memb_sstar" => s.alpha = Some(0.0),
        "memb_sts" => s.mu = Some(1.0),
        _ => {}
    }
    s
}

pub fn parse_scan(arg: &str) -> Result<ScanConfig, UsageError> {
    let cfg: ScanConfig = decode("scan", load_document(arg)?)?;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

pub fn parse_schwarz(arg: &str) -> Result<CoeffList, UsageError> {
    decode("Schwarz function", load_document(arg)?)
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    input: &'a RunRequest,
    result: T,
}

fn to_json<T: Serialize>(req: &RunRequest, result: T) -> Result<String, UsageError> {
    serde_json::to_string_pretty(&Report { input: req, result }).map_err(|e| usage(e.to_string()))
}

fn single_function(req: &RunRequest) -> Result<AnalyticFunction, UsageError> {
    match req.functions.as_slice() {
        [spec] => AnalyticFunction::with_order(spec, DEFAULT_ORDER).map_err(|e| usage(format!("function: {e}"))),
        [] => Err(usage("--function is required")),
        _ => Err(usage("expected exactly one function document")),
    }
}

fn single_criterion(req: &RunRequest) -> Result<&CriterionSpec, UsageError> {
    match req.criteria.as_slice() {
        [spec] => Ok(spec),
        [] => Err(usage("--criterion is required")),
        _ => Err(usage("expected exactly one criterion document")),
    }
}

fn verdict_status(v: &Verdict) -> u8 {
    match v.outcome {
        Outcome::Holds => EXIT_OK,
        Outcome::Fails => EXIT_NOT_SATISFIED,
        Outcome::NotApplicable => EXIT_NOT_APPLICABLE,
    }
}

/// Executes a request. Usage and document errors come back as `Err` and map
/// to exit status 2.
pub fn run(req: &RunRequest) -> Result<RunOutcome, UsageError> {
    req.scan.validate().map_err(|e| usage(e.to_string()))?;
    let cfg = &req.scan;
    let json = |status: u8, text: String| Ok(RunOutcome { status, artifact: Artifact::Json(text) });
    match req.command {
        Command::Check => {
            let f = single_function(req)?;
            let c = criterion(single_criterion(req)?).map_err(|e| usage(e.to_string()))?;
            let v = check_hypothesis(&f, c.as_ref(), cfg);
            json(verdict_status(&v), to_json(req, &v)?)
        }
        Command::Conclusion => {
            let f = single_function(req)?;
            let spec = req.class.as_ref().or(req.criteria.first()).ok_or_else(|| usage("--class is required"))?;
            let class = ClassId::from_spec(spec).map_err(|e| usage(e.to_string()))?;
            let v = check_conclusion(&f, class, cfg);
            json(verdict_status(&v), to_json(req, &v)?)
        }
        Command::Implication => {
            let f = single_function(req)?;
            let c = criterion(single_criterion(req)?).map_err(|e| usage(e.to_string()))?;
            let report = verify_implication(&f, c.as_ref(), cfg);
            let status = match report.status {
                Consistency::Inconsistent => EXIT_NOT_SATISFIED,
                Consistency::NotApplicable => EXIT_NOT_APPLICABLE,
                Consistency::Consistent | Consistency::Marginal => EXIT_OK,
            };
            json(status, to_json(req, &report)?)
        }
        Command::Jack => {
            let w = req.w.as_ref().ok_or_else(|| usage("--w is required"))?;
            let r = req.r.ok_or_else(|| usage("--r is required"))?;
            if !(r > 0.0 && r < 1.0) {
                return Err(usage(format!("--r {r} outside (0, 1)")));
            }
            let w = SchwarzFunction::from_coeffs(&w.coeffs, DEFAULT_ORDER).map_err(|e| usage(e.to_string()))?;
            match jack_probe(&w, r, cfg) {
                Ok(j) => json(if j.satisfies_lemma { EXIT_OK } else { EXIT_NOT_SATISFIED }, to_json(req, j)?),
                Err(e) => json(EXIT_NOT_APPLICABLE, to_json(req, serde_json::json!({ "error": e.to_string() }))?),
            }
        }
        Command::Corpus => {
            let corpus = if req.functions.is_empty() {
                let count = req.count.unwrap_or(500);
                let rho = req.rho.unwrap_or(0.2);
                let seed = req.seed.unwrap_or(0);
                random_corpus(count, rho, seed)
            } else {
                req.functions.clone()
            };
            let criteria = if req.criteria.is_empty() { standard_sweep_criteria() } else { req.criteria.clone() };
            let report = corpus_run(&corpus, &criteria, cfg).map_err(|e| usage(e.to_string()))?;
            let status = if report.aggregate.inconsistent > 0 { EXIT_NOT_SATISFIED } else { EXIT_OK };
            json(status, to_json(req, &report)?)
        }
        Command::Grid => {
            let f = single_function(req)?;
            let spec = req.criteria.first().or(req.class.as_ref()).ok_or_else(|| usage("--criterion is required"))?;
            let q = Quantity::from_spec(spec).map_err(|e| usage(e.to_string()))?;
            let rows = grid_dump(&f, &q, cfg);
            let mut buf = Vec::new();
            write_grid_csv(&mut buf, &rows).map_err(|e| usage(e.to_string()))?;
            Ok(RunOutcome { status: EXIT_OK, artifact: Artifact::Csv(String::from_utf8(buf).expect("ascii csv")) })
        }
    }
}

/// Reconstructs the request echoed in a JSON report.
pub fn request_from_report(report: &str) -> Result<RunRequest, UsageError> {
    let v: Value = serde_json::from_str(report).map_err(|e| usage(e.to_string()))?;
    let input = v.get("input").cloned().ok_or_else(|| usage("report has no input echo"))?;
    decode("input", input)
}
