//! Output records with stable field names, plus JSON/CSV/pretty rendering.
//!
//! All rendering is deterministic: rerunning a command with the same flags
//! and seed reproduces stdout byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use ghz_core::analyzer::AnalysisRecord;
use ghz_core::ghz::identify_ghz;
use ghz_core::oracle::{SweepFailure, SweepReport};
use ghz_core::{GhzSign, HybridState, PhotonBasisState};

use crate::Format;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StepJson {
    pub step: usize,
    pub injected: String,
    pub detected: String,
    pub classification: String,
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DecodedJson {
    pub index: usize,
    pub sign: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AnalysisJson {
    pub n: usize,
    pub input: Option<String>,
    pub steps: Vec<StepJson>,
    pub decoded: DecodedJson,
    pub post_fidelity: f64,
    /// Up-spin parity of the surviving terms at the final detection;
    /// emitted by `table`, absent from `analyze` records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PrepareJson {
    pub n: usize,
    pub outcomes: [String; 2],
    pub group: usize,
    pub probability: f64,
    /// GHZ label of the conditioned register, when it is one.
    pub state_label: Option<String>,
    /// Conditioned amplitudes as `[re, im]` pairs; absent for dead branches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FailureJson {
    pub case: String,
    pub reason: String,
    pub diagnostics: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportJson {
    pub check: String,
    pub n: Option<usize>,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<FailureJson>,
}

/// Up-spin parity read off the final detection: `Rv` means an even number
/// of down spins survives, so the up-count parity follows the register size.
pub fn up_parity(n: usize, final_detection: PhotonBasisState) -> &'static str {
    let down_parity = usize::from(final_detection != PhotonBasisState::R_DOWN);
    if (n - down_parity) % 2 == 1 {
        "odd"
    } else {
        "even"
    }
}

pub fn analysis_json(
    record: &AnalysisRecord,
    input: Option<String>,
    with_parity: bool,
) -> AnalysisJson {
    let n = record.n_spins();
    let steps = record
        .outcomes
        .iter()
        .zip(&record.outcome_probabilities)
        .map(|(outcome, &probability)| StepJson {
            step: outcome.step,
            injected: ghz_core::analyzer::injected_probe(outcome.step, n)
                .ascii()
                .to_string(),
            detected: outcome.detected.ascii().to_string(),
            classification: outcome.classification.as_str().to_string(),
            probability,
        })
        .collect();
    let final_detection = record.outcomes[n - 1].detected;
    AnalysisJson {
        n,
        input,
        steps,
        decoded: DecodedJson {
            index: record.decoded.index(),
            sign: match record.decoded.sign() {
                GhzSign::Plus => "+".to_string(),
                GhzSign::Minus => "-".to_string(),
            },
        },
        post_fidelity: record.post_fidelity(),
        parity: with_parity.then(|| up_parity(n, final_detection).to_string()),
    }
}

pub fn prepare_json(
    outcomes: (PhotonBasisState, PhotonBasisState),
    group: usize,
    probability: f64,
    state: Option<&HybridState>,
) -> PrepareJson {
    PrepareJson {
        n: 3,
        outcomes: [outcomes.0.ascii().to_string(), outcomes.1.ascii().to_string()],
        group,
        probability,
        state_label: state.and_then(identify_ghz).map(|l| l.text()),
        amplitudes: state.map(|s| {
            s.amplitudes().iter().map(|a| [a.re, a.im]).collect()
        }),
    }
}

pub fn report_json(report: &SweepReport) -> ReportJson {
    ReportJson {
        check: report.check.clone(),
        n: report.n_spins,
        cases: report.cases,
        passed: report.passed,
        failures: report
            .failures
            .iter()
            .map(|f: &SweepFailure| FailureJson {
                case: f.case.clone(),
                reason: f.reason.clone(),
                diagnostics: f.diagnostics.clone(),
            })
            .collect(),
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn arrows(ascii: &str) -> &'static str {
    PhotonBasisState::parse_ascii(ascii)
        .map(|p| p.arrows())
        .unwrap_or("?")
}

fn decoded_text(record: &AnalysisJson) -> String {
    let sign = if record.decoded.sign == "+" {
        GhzSign::Plus
    } else {
        GhzSign::Minus
    };
    ghz_core::GhzLabel::new(record.n, record.decoded.index, sign)
        .map(|l| l.text())
        .unwrap_or_else(|_| format!("ghz:{}:{}:{}", record.n, record.decoded.index, record.decoded.sign))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("records serialize");
    out.push('\n');
    out
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).expect("in-memory CSV write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory CSV flush"))
        .expect("CSV output is UTF-8")
}

// --- analyze ---------------------------------------------------------------

pub fn analyze_output(record: &AnalysisJson, format: Format) -> String {
    match format {
        Format::Json => to_json(record),
        Format::Csv => {
            let mut rows = vec![vec![
                "n".to_string(),
                "input".to_string(),
                "step".to_string(),
                "injected".to_string(),
                "detected".to_string(),
                "classification".to_string(),
                "probability".to_string(),
                "decoded".to_string(),
                "post_fidelity".to_string(),
            ]];
            for step in &record.steps {
                rows.push(vec![
                    record.n.to_string(),
                    record.input.clone().unwrap_or_default(),
                    step.step.to_string(),
                    step.injected.clone(),
                    step.detected.clone(),
                    step.classification.clone(),
                    fmt_f64(step.probability),
                    decoded_text(record),
                    fmt_f64(record.post_fidelity),
                ]);
            }
            csv_string(rows)
        }
        Format::Pretty => {
            let mut out = String::new();
            let input = record.input.as_deref().unwrap_or("(product register)");
            let _ = writeln!(out, "input: {} ({} spins)", input, record.n);
            for step in &record.steps {
                let _ = writeln!(
                    out,
                    "step {}: injected {}, detected {} ({}), probability {}",
                    step.step,
                    arrows(&step.injected),
                    arrows(&step.detected),
                    step.classification,
                    fmt_f64(step.probability)
                );
            }
            let _ = writeln!(out, "decoded: {}", decoded_text(record));
            let _ = writeln!(out, "post-state fidelity: {}", fmt_f64(record.post_fidelity));
            out
        }
    }
}

// --- table -----------------------------------------------------------------

pub fn table_output(records: &[AnalysisJson], format: Format) -> String {
    match format {
        Format::Json => to_json(&records),
        Format::Csv => {
            let n = records.first().map(|r| r.n).unwrap_or(0);
            let mut header = vec!["state".to_string()];
            header.extend((1..=n).map(|j| format!("step_{j}")));
            header.push("parity".to_string());
            let mut rows = vec![header];
            for record in records {
                let mut row = vec![record.input.clone().unwrap_or_default()];
                row.extend(record.steps.iter().map(|s| s.detected.clone()));
                row.push(record.parity.clone().unwrap_or_default());
                rows.push(row);
            }
            csv_string(rows)
        }
        Format::Pretty => {
            let n = records.first().map(|r| r.n).unwrap_or(0);
            let label_width = records
                .iter()
                .map(|r| r.input.as_deref().unwrap_or("").len())
                .max()
                .unwrap_or(5)
                .max(5);
            let mut out = String::new();
            let _ = write!(out, "{:<label_width$}", "state");
            for j in 1..=n {
                let _ = write!(out, "  step {j}");
            }
            let _ = writeln!(out, "  parity");
            for record in records {
                let _ = write!(
                    out,
                    "{:<label_width$}",
                    record.input.as_deref().unwrap_or("")
                );
                for (j, step) in record.steps.iter().enumerate() {
                    let width = format!("step {}", j + 1).len();
                    let _ = write!(out, "  {:<width$}", arrows(&step.detected));
                }
                let parity = record.parity.as_deref().unwrap_or("");
                let _ = writeln!(out, "  {parity} |↑⟩");
            }
            out
        }
    }
}

// --- prepare ----------------------------------------------------------------

pub fn prepare_output(records: &[PrepareJson], sampled: bool, format: Format) -> String {
    match format {
        Format::Json => {
            if sampled {
                to_json(&records[0])
            } else {
                to_json(&records)
            }
        }
        Format::Csv => {
            let mut rows = vec![vec![
                "outcome_1".to_string(),
                "outcome_2".to_string(),
                "group".to_string(),
                "probability".to_string(),
                "state_label".to_string(),
            ]];
            for record in records {
                rows.push(vec![
                    record.outcomes[0].clone(),
                    record.outcomes[1].clone(),
                    record.group.to_string(),
                    fmt_f64(record.probability),
                    record.state_label.clone().unwrap_or_default(),
                ]);
            }
            csv_string(rows)
        }
        Format::Pretty => {
            let mut out = String::new();
            if !sampled {
                let _ = writeln!(out, "exact outcome distribution:");
            }
            for record in records {
                let _ = writeln!(
                    out,
                    "outcomes {} {} (group {}): probability {}, state {}",
                    arrows(&record.outcomes[0]),
                    arrows(&record.outcomes[1]),
                    record.group,
                    fmt_f64(record.probability),
                    record.state_label.as_deref().unwrap_or(match &record.amplitudes {
                        Some(_) => "(not a GHZ basis state)",
                        None => "(dead branch)",
                    })
                );
            }
            out
        }
    }
}

// --- sweep / verify ----------------------------------------------------------

fn report_line(report: &ReportJson) -> String {
    let scope = match report.n {
        Some(n) if report.check == "discrimination" => format!("{} n={}", report.check, n),
        _ => report.check.clone(),
    };
    let status = if report.failures.is_empty() && report.passed == report.cases {
        "ok"
    } else {
        "FAIL"
    };
    format!(
        "{scope}: {}/{} {status}",
        report.passed, report.cases
    )
}

pub fn reports_output(reports: &[ReportJson], single: bool, format: Format) -> String {
    match format {
        Format::Json => {
            if single {
                to_json(&reports[0])
            } else {
                to_json(&reports)
            }
        }
        Format::Csv => {
            let mut rows = vec![vec![
                "check".to_string(),
                "n".to_string(),
                "cases".to_string(),
                "passed".to_string(),
                "failed".to_string(),
            ]];
            for report in reports {
                rows.push(vec![
                    report.check.clone(),
                    report.n.map(|n| n.to_string()).unwrap_or_default(),
                    report.cases.to_string(),
                    report.passed.to_string(),
                    (report.cases - report.passed).to_string(),
                ]);
            }
            csv_string(rows)
        }
        Format::Pretty => {
            let mut out = String::new();
            for report in reports {
                let _ = writeln!(out, "{}", report_line(report));
            }
            if !single {
                let total_cases: usize = reports.iter().map(|r| r.cases).sum();
                let failed = reports
                    .iter()
                    .filter(|r| !r.failures.is_empty() || r.passed != r.cases)
                    .count();
                if failed == 0 {
                    let _ = writeln!(
                        out,
                        "all {} checks passed ({} cases)",
                        reports.len(),
                        total_cases
                    );
                } else {
                    let _ = writeln!(out, "{failed} of {} checks FAILED", reports.len());
                }
            }
            out
        }
    }
}

/// Failure details for stderr, one block per failing case.
pub fn failure_details(reports: &[ReportJson]) -> String {
    let mut out = String::new();
    for report in reports {
        for failure in &report.failures {
            let _ = writeln!(
                out,
                "FAIL {} / {}: {}",
                report.check, failure.case, failure.reason
            );
            if !failure.diagnostics.is_empty() {
                let _ = writeln!(out, "  state: {}", failure.diagnostics);
            }
        }
    }
    out
}
