//! Report assembly and the two renderers. The machine-readable form must
//! survive a parse round trip bit-for-bit; the text form is line-oriented
//! with one TASK header per entry.

use std::fmt::Write as _;

use gaussmap_core::{DEFAULT_SEED, DEFAULT_TOL};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::document::AnalysisDocument;
use crate::error::CliError;
use crate::tasks::{effective_tasks, run_task, TaskContext, TaskEntry, DEFAULT_LAMBDA};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub input: InputEcho,
    pub reports: Vec<TaskEntry>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct InputEcho {
    pub dim: usize,
    pub metric_fingerprint: String,
    pub tolerance: f64,
    pub seed: u64,
    pub lambda: f64,
    pub tasks: Vec<String>,
}

/// FNV-1a over the bit patterns of the metric entries in storage order.
pub fn metric_fingerprint(g: &DMatrix<f64>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in g.iter() {
        for b in v.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Build the metric algebra, run every effective task in order, and wrap
/// the entries with the input echo. Resolution of tolerance, seed, and
/// lambda from the document happens here; command-line overrides are
/// already merged into the document by the caller.
pub fn run_report(doc: &AnalysisDocument) -> Result<ReportDocument, CliError> {
    let m = doc.build_metric_algebra()?;
    let tol = doc.tolerance.unwrap_or(DEFAULT_TOL);
    let seed = doc.seed.unwrap_or(DEFAULT_SEED);
    let lambda = doc.lambda.unwrap_or(DEFAULT_LAMBDA);
    let tasks = effective_tasks(doc);
    let ctx = TaskContext { doc, m: &m, tol, seed, lambda };
    let reports = tasks.iter().map(|t| run_task(t, &ctx)).collect();
    Ok(ReportDocument {
        input: InputEcho {
            dim: m.dim(),
            metric_fingerprint: metric_fingerprint(m.inner().matrix()),
            tolerance: tol,
            seed,
            lambda,
            tasks,
        },
        reports,
    })
}

pub fn render_json(report: &ReportDocument) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serializes");
    out.push('\n');
    out
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("detail value serializes")
}

pub fn render_text(report: &ReportDocument) -> String {
    let mut out = String::new();
    let i = &report.input;
    let _ = writeln!(
        out,
        "# dim = {}, metric = {}, tol = {}, seed = {}, lambda = {}",
        i.dim,
        i.metric_fingerprint,
        compact(&Value::from(i.tolerance)),
        i.seed,
        compact(&Value::from(i.lambda)),
    );
    for e in &report.reports {
        if e.status == "ok" {
            let _ = writeln!(out, "TASK {}: {}", e.task, e.verdict.as_deref().unwrap_or("ok"));
        } else {
            let _ = writeln!(out, "TASK {}: error ({})", e.task, e.error.as_deref().unwrap_or("unknown"));
        }
        if let Some(Value::Object(map)) = &e.details {
            for (k, v) in map {
                render_detail(&mut out, k, v);
            }
        }
        for w in &e.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
    }
    out
}

fn render_detail(out: &mut String, key: &str, v: &Value) {
    let residual_label = match key {
        "residual" => Some(""),
        "residual_normal_form" => Some("normal "),
        "residual_tangent_form" => Some("tangent "),
        _ => None,
    };
    if let (Some(prefix), Value::Array(rows)) = (residual_label, v) {
        // Normal frame indices continue the tangent numbering, so the
        // columns are labelled n+1 .. n+q.
        let n = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if let Value::Array(cols) = row {
                for (c, val) in cols.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  {prefix}r[{}][{}] = {}",
                        r + 1,
                        n + c + 1,
                        compact(val)
                    );
                }
            }
        }
        return;
    }
    if key == "witness_metric" {
        if let Value::Array(rows) = v {
            for (r, row) in rows.iter().enumerate() {
                let _ = writeln!(out, "  witness_metric[{r}] = {}", compact(row));
            }
            return;
        }
    }
    match v {
        Value::String(s) => {
            let _ = writeln!(out, "  {key} = {s}");
        }
        other => {
            let _ = writeln!(out, "  {key} = {}", compact(other));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_document;

    #[test]
    fn fingerprint_separates_metrics_and_stays_put() {
        let id = DMatrix::identity(3, 3);
        let mut other = id.clone();
        other[(2, 2)] = 2.0;
        assert_eq!(metric_fingerprint(&id), metric_fingerprint(&id.clone()));
        assert_ne!(metric_fingerprint(&id), metric_fingerprint(&other));
        assert_eq!(metric_fingerprint(&id).len(), 16);
    }

    #[test]
    fn json_report_round_trips_and_is_deterministic() {
        let doc = builtin_document("so3xso3", &[("a".to_string(), 2.0)]).unwrap();
        let r1 = run_report(&doc).unwrap();
        let r2 = run_report(&doc).unwrap();
        assert_eq!(render_json(&r1), render_json(&r2));
        let back: ReportDocument = serde_json::from_str(&render_json(&r1)).unwrap();
        assert_eq!(back, r1);
    }

    #[test]
    fn text_report_prints_headers_and_residual_rows() {
        let mut doc = builtin_document("so3xso3", &[("a".to_string(), 2.0)]).unwrap();
        doc.tasks = vec!["harmonicity_tg".to_string()];
        let text = render_text(&run_report(&doc).unwrap());
        assert!(text.starts_with("# dim = 6, metric = "), "{text}");
        assert!(text.contains("TASK harmonicity_tg: not harmonic"), "{text}");
        assert!(text.contains("  r[1][4] = 0.0959"), "{text}");
        assert!(text.contains("  max_abs = 0.0959"), "{text}");
    }

    #[test]
    fn defaults_appear_in_the_echo() {
        let doc = builtin_document("so3", &[]).unwrap();
        let r = run_report(&doc).unwrap();
        assert_eq!(r.input.tolerance, DEFAULT_TOL);
        assert_eq!(r.input.seed, DEFAULT_SEED);
        assert_eq!(r.input.lambda, DEFAULT_LAMBDA);
        assert_eq!(r.input.tasks, vec!["validate", "classify_structure"]);
    }

    #[test]
    fn error_entries_render_with_their_message() {
        let mut doc = builtin_document("so3", &[]).unwrap();
        doc.tasks = vec!["nilpotent_geodesic".to_string()];
        let r = run_report(&doc).unwrap();
        let text = render_text(&r);
        assert!(text.contains("TASK nilpotent_geodesic: error ("), "{text}");
    }
}
