//! Command implementations behind the binary: eliminate, decide and check.
//!
//! Exit codes are stable: 0 success (or a true verdict), 1 a false verdict,
//! 2 parse or configuration errors, 3 resource limits, 4 unbound constants,
//! 5 suite failures.  Identical inputs under identical configurations
//! produce byte-identical output.

use std::collections::BTreeMap;

use crate::config::EngineConfig;
use crate::error::Error;
use crate::model::{snapshot_from_json, ModelHandle};
use crate::parse::parse_formula;
use crate::qe::{decide_sentence, eliminate_all, QeConfig};
use crate::suites::run_suite;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_UNBOUND: i32 = 4;
pub const EXIT_SUITE: i32 = 5;

#[derive(Debug, Default)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> CommandOutput {
        CommandOutput { stdout, stderr: String::new(), code: EXIT_TRUE }
    }
}

fn error_output(err: &Error, source_text: Option<&str>) -> CommandOutput {
    let mut stderr = format!("error: {err}\n");
    let code = match err {
        Error::Syntax { position, .. } => {
            if let Some(text) = source_text {
                stderr.push_str(&format!("  {text}\n  {}^\n", " ".repeat(*position)));
            }
            EXIT_PARSE
        }
        Error::DependentTuple(_) | Error::Config(_) => EXIT_PARSE,
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        Error::UnboundConstant(_) | Error::UnboundVariable(_) => EXIT_UNBOUND,
        _ => EXIT_PARSE,
    };
    CommandOutput { stdout: String::new(), stderr, code }
}

fn load_model(cfg: &EngineConfig, path: Option<&str>) -> Result<Option<ModelHandle>, CommandOutput> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| CommandOutput {
        stdout: String::new(),
        stderr: format!("error: cannot read model snapshot {path}: {e}\n"),
        code: EXIT_PARSE,
    })?;
    let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| CommandOutput {
        stdout: String::new(),
        stderr: format!("error: invalid snapshot JSON: {e}\n"),
        code: EXIT_PARSE,
    })?;
    match snapshot_from_json(&json) {
        Ok(m) => {
            let _ = cfg;
            Ok(Some(m))
        }
        Err(e) => Err(error_output(&e, None)),
    }
}

/// Eliminate the quantifiers of a formula and print the result in grammar
/// syntax; with `trace` the elimination audit is attached.
pub fn cmd_eliminate(cfg: &EngineConfig, formula: &str, trace: bool, json: bool) -> CommandOutput {
    let parsed = match parse_formula(formula, &cfg.field) {
        Ok(f) => f,
        Err(e) => return error_output(&e, Some(formula)),
    };
    let qe_cfg = QeConfig::from_engine(cfg);
    match eliminate_all(&parsed, &qe_cfg) {
        Ok((out, tr)) => {
            if json {
                let mut doc = serde_json::json!({
                    "input": formula,
                    "result": out.to_string(),
                    "ast": crate::formula::formula_to_json(&out),
                });
                if trace {
                    doc["trace"] = tr.to_json();
                }
                CommandOutput::ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
            } else {
                let mut text = format!("{out}\n");
                if trace {
                    text.push_str(&format!(
                        "{}\n",
                        serde_json::to_string_pretty(&tr.to_json()).unwrap()
                    ));
                }
                CommandOutput::ok(text)
            }
        }
        Err(e) => error_output(&e, Some(formula)),
    }
}

/// Decide a sentence; the verdict is printed and encoded in the exit code
/// (0 true, 1 false) so shell harnesses can branch on it.
pub fn cmd_decide(
    cfg: &EngineConfig,
    sentence: &str,
    model_path: Option<&str>,
    trace: bool,
    json: bool,
) -> CommandOutput {
    let parsed = match parse_formula(sentence, &cfg.field) {
        Ok(f) => f,
        Err(e) => return error_output(&e, Some(sentence)),
    };
    let model = match load_model(cfg, model_path) {
        Ok(m) => m,
        Err(out) => return out,
    };
    let qe_cfg = QeConfig::from_engine(cfg);
    match decide_sentence(&parsed, &qe_cfg, model.as_ref()) {
        Ok((verdict, tr)) => {
            let body = if json {
                let mut doc = serde_json::json!({
                    "input": sentence,
                    "verdict": verdict,
                });
                if trace {
                    doc["trace"] = tr.to_json();
                }
                format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
            } else {
                let mut text = format!("{verdict}\n");
                if trace {
                    text.push_str(&format!(
                        "{}\n",
                        serde_json::to_string_pretty(&tr.to_json()).unwrap()
                    ));
                }
                text
            };
            CommandOutput {
                stdout: body,
                stderr: String::new(),
                code: if verdict { EXIT_TRUE } else { EXIT_FALSE },
            }
        }
        Err(e) => error_output(&e, Some(sentence)),
    }
}

/// Run a named property suite and emit a JSON report.
pub fn cmd_check(
    cfg: &EngineConfig,
    suite: &str,
    bounds: &BTreeMap<String, String>,
    json: bool,
) -> CommandOutput {
    match run_suite(cfg, suite, bounds) {
        Ok(report) => {
            let stdout = if json {
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::to_value(&report).unwrap()).unwrap()
                )
            } else {
                match &report.first_counterexample {
                    Some(ce) => format!(
                        "suite {}: {} cases, {} failures\nfirst counterexample: {}\n",
                        report.suite, report.cases, report.failures, ce
                    ),
                    None => format!(
                        "suite {}: {} cases, {} failures\n",
                        report.suite, report.cases, report.failures
                    ),
                }
            };
            CommandOutput {
                stdout,
                stderr: String::new(),
                code: if report.ok() { EXIT_TRUE } else { EXIT_SUITE },
            }
        }
        Err(e) => error_output(&e, None),
    }
}

/// Parse `k=v,k=v` bound lists.
pub fn parse_bounds(spec: Option<&str>) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    if let Some(s) = spec {
        for part in s.split(',') {
            if let Some((k, v)) = part.split_once('=') {
                out.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
    }
    out
}
