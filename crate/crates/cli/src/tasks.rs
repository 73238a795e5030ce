//! Task dispatch. Each task reads only the shared immutable inputs, owns its
//! RNG (reseeded per task so reordering cannot change results), and reports
//! either an ok entry with a verdict or a contained error entry.

use gaussmap_core::harmonicity::{self, HarmonicityReport, ImmersionPointData};
use gaussmap_core::nilpotent::NilpotentStructure;
use gaussmap_core::structure;
use gaussmap_core::{Error as CoreError, MetricLieAlgebra, Subspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::document::{matrix_to_rows, AnalysisDocument};
use crate::error::CliError;

pub const TASK_NAMES: [&str; 8] = [
    "validate",
    "classify_structure",
    "harmonicity_general",
    "harmonicity_tg",
    "harmonicity_biinv",
    "classify_harmonicity",
    "witness",
    "nilpotent_geodesic",
];

pub const DEFAULT_LAMBDA: f64 = 1.0;
/// Unit samples drawn by the nonsingularity probe when no exact test applies.
const PROBE_SAMPLES: usize = 1000;

pub struct TaskContext<'a> {
    pub doc: &'a AnalysisDocument,
    pub m: &'a MetricLieAlgebra,
    pub tol: f64,
    pub seed: u64,
    pub lambda: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TaskEntry {
    pub task: String,
    /// "ok" when the task ran to completion; its verdict may still be
    /// negative. "error" when a precondition or numerical failure stopped it.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

struct TaskOutput {
    verdict: String,
    details: Value,
    warnings: Vec<String>,
}

type TaskResult = gaussmap_core::Result<TaskOutput>;

pub fn effective_tasks(doc: &AnalysisDocument) -> Vec<String> {
    if doc.tasks.is_empty() {
        vec!["validate".to_string()]
    } else {
        doc.tasks.clone()
    }
}

pub fn run_task(name: &str, ctx: &TaskContext) -> TaskEntry {
    let result = match name {
        "validate" => validate(ctx),
        "classify_structure" => classify_structure(ctx),
        "harmonicity_general" => harmonicity_general(ctx),
        "harmonicity_tg" => harmonicity_tg(ctx),
        "harmonicity_biinv" => harmonicity_biinv(ctx),
        "classify_harmonicity" => classify_harmonicity_task(ctx),
        "witness" => witness(ctx),
        "nilpotent_geodesic" => nilpotent_geodesic(ctx),
        other => Err(CoreError::DimensionMismatch(format!("unknown task '{other}'"))),
    };
    match result {
        Ok(out) => TaskEntry {
            task: name.to_string(),
            status: "ok".to_string(),
            verdict: Some(out.verdict),
            error: None,
            error_kind: None,
            details: Some(out.details),
            warnings: out.warnings,
        },
        Err(e) => TaskEntry {
            task: name.to_string(),
            status: "error".to_string(),
            verdict: None,
            error_kind: Some(
                if e.is_precondition() { "precondition" } else { "internal" }.to_string(),
            ),
            error: Some(e.to_string()),
            details: None,
            warnings: Vec::new(),
        },
    }
}

/// Worst exit code over all entries: 4 for any internal failure, else 3 for
/// any precondition failure, else 0. Verdicts do not affect the code.
pub fn exit_code(entries: &[TaskEntry]) -> i32 {
    entries.iter().fold(0, |worst, e| {
        let code = match (e.status.as_str(), e.error_kind.as_deref()) {
            ("error", Some("internal")) => 4,
            ("error", _) => 3,
            _ => 0,
        };
        worst.max(code)
    })
}

fn build_subspace(ctx: &TaskContext) -> gaussmap_core::Result<Option<Subspace>> {
    ctx.doc.build_subspace(ctx.m.dim()).map_err(|e| match e {
        CliError::Core(c) => c,
        other => CoreError::DimensionMismatch(other.to_string()),
    })
}

fn require_subspace(ctx: &TaskContext, task: &str) -> gaussmap_core::Result<Subspace> {
    build_subspace(ctx)?
        .ok_or_else(|| CoreError::DimensionMismatch(format!("task {task} requires a subspace")))
}

/// Point data for the residual tasks: an explicit immersion block wins,
/// otherwise a subspace is treated as a totally geodesic tangent space.
fn immersion_or_tg(ctx: &TaskContext, task: &str) -> gaussmap_core::Result<ImmersionPointData> {
    if ctx.doc.immersion.is_some() {
        let data = ctx.doc.build_immersion(ctx.m)?;
        return Ok(data.expect("immersion block present"));
    }
    match build_subspace(ctx)? {
        Some(s) => ImmersionPointData::totally_geodesic(ctx.m, &s),
        None => Err(CoreError::DimensionMismatch(format!(
            "task {task} requires an immersion block or a subspace"
        ))),
    }
}

fn fmt_max(v: f64) -> String {
    format!("{v:.3e}")
}

fn residual_verdict(rep: &HarmonicityReport) -> String {
    if rep.harmonic {
        format!("harmonic (max |r| = {})", fmt_max(rep.max_abs))
    } else {
        format!("not harmonic (max |r| = {})", fmt_max(rep.max_abs))
    }
}

fn residual_details(rep: &HarmonicityReport) -> Value {
    json!({
        "criterion": rep.criterion.as_str(),
        "harmonic": rep.harmonic,
        "max_abs": rep.max_abs,
        "residual": matrix_to_rows(&rep.residual),
    })
}

const DH_WARNING: &str =
    "dH not provided; the mean curvature is assumed stationary (dH = 0)";

fn dh_warnings(rep: &HarmonicityReport) -> Vec<String> {
    if rep.dh_defaulted {
        vec![DH_WARNING.to_string()]
    } else {
        Vec::new()
    }
}

fn validate(ctx: &TaskContext) -> TaskResult {
    let alg = ctx.m.algebra();
    let jac = alg.jacobi_residual();
    let mut reasons = Vec::new();
    if jac > ctx.tol {
        reasons.push(format!("jacobi residual {} exceeds tolerance", fmt_max(jac)));
    }
    let mut details = json!({
        "dim": alg.dim(),
        "jacobi_residual": jac,
        "biinvariance_residual": ctx.m.biinvariance_residual(),
        "center_dim": alg.center().rank(),
        "derived_dim": alg.derived_subalgebra().rank(),
    });
    let obj = details.as_object_mut().expect("object literal");
    match build_subspace(ctx) {
        Ok(Some(s)) => {
            obj.insert("subspace_rank".to_string(), json!(s.rank()));
        }
        Ok(None) => {}
        Err(e) => reasons.push(format!("subspace: {e}")),
    }
    if ctx.doc.immersion.is_some() {
        match ctx.doc.build_immersion(ctx.m) {
            Ok(Some(data)) => {
                obj.insert(
                    "immersion".to_string(),
                    json!({"n": data.n(), "q": data.q(), "dh_defaulted": data.dh_defaulted()}),
                );
            }
            Ok(None) => {}
            Err(e) => reasons.push(format!("immersion: {e}")),
        }
    }
    let verdict = if reasons.is_empty() {
        "valid".to_string()
    } else {
        format!("invalid ({})", reasons.join("; "))
    };
    Ok(TaskOutput { verdict, details, warnings: Vec::new() })
}

fn classify_structure(ctx: &TaskContext) -> TaskResult {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let alg = ctx.m.algebra();
    let mut details = json!({});
    let obj = details.as_object_mut().expect("object literal");
    let target = match build_subspace(ctx)? {
        Some(s) => {
            let generated = structure::generated_subalgebra(alg, &s, ctx.tol)?;
            obj.insert("subspace_rank".to_string(), json!(s.rank()));
            obj.insert("generated_dim".to_string(), json!(generated.rank()));
            generated
        }
        None => Subspace::whole(alg.dim()),
    };
    let split = structure::compact_split(ctx.m, &target, ctx.tol)?;
    let ideals = structure::simple_ideals(ctx.m, &split.semisimple_part, ctx.tol, &mut rng)?;
    obj.insert("target_dim".to_string(), json!(target.rank()));
    obj.insert("abelian_dim".to_string(), json!(split.abelian_part.rank()));
    obj.insert("semisimple_dim".to_string(), json!(split.semisimple_part.rank()));
    obj.insert(
        "ideal_dims".to_string(),
        json!(ideals.ideals.iter().map(|i| i.subspace.rank()).collect::<Vec<_>>()),
    );
    obj.insert(
        "killing_multipliers".to_string(),
        json!(ideals.ideals.iter().map(|i| i.killing_multiplier).collect::<Vec<_>>()),
    );
    let verdict = format!(
        "abelian dim {} + semisimple dim {} ({} simple ideal{})",
        split.abelian_part.rank(),
        split.semisimple_part.rank(),
        ideals.len(),
        if ideals.len() == 1 { "" } else { "s" },
    );
    Ok(TaskOutput { verdict, details, warnings: Vec::new() })
}

fn harmonicity_general(ctx: &TaskContext) -> TaskResult {
    let data = immersion_or_tg(ctx, "harmonicity_general")?;
    let rep = harmonicity::residual_general(ctx.m, &data, ctx.tol)?;
    Ok(TaskOutput {
        verdict: residual_verdict(&rep),
        warnings: dh_warnings(&rep),
        details: residual_details(&rep),
    })
}

fn harmonicity_tg(ctx: &TaskContext) -> TaskResult {
    let s = require_subspace(ctx, "harmonicity_tg")?;
    let rep = harmonicity::residual_totally_geodesic(ctx.m, &s, ctx.tol)?;
    Ok(TaskOutput {
        verdict: residual_verdict(&rep),
        details: residual_details(&rep),
        warnings: Vec::new(),
    })
}

fn harmonicity_biinv(ctx: &TaskContext) -> TaskResult {
    let data = immersion_or_tg(ctx, "harmonicity_biinv")?;
    let rep = harmonicity::residual_biinvariant(ctx.m, &data, ctx.tol)?;
    Ok(TaskOutput {
        verdict: residual_verdict(&rep),
        warnings: dh_warnings(&rep),
        details: residual_details(&rep),
    })
}

fn classify_harmonicity_task(ctx: &TaskContext) -> TaskResult {
    let s = require_subspace(ctx, "classify_harmonicity")?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let cls = harmonicity::classify_harmonicity(ctx.m, &s, ctx.tol, &mut rng)?;
    let (normal, tangential) = harmonicity::residual_biinvariant_tg(ctx.m, &s, ctx.tol)?;
    let mut details = json!({
        "generated_dim": cls.generated.rank(),
        "abelian_dim": cls.split.abelian_part.rank(),
        "semisimple_dim": cls.split.semisimple_part.rank(),
        "reduced_dim": cls.reduced_semisimple.rank(),
        "ideal_dims": cls.ideals.ideals.iter().map(|i| i.subspace.rank()).collect::<Vec<_>>(),
        "killing_multipliers": cls.ideals.ideals.iter().map(|i| i.killing_multiplier).collect::<Vec<_>>(),
        "ideal_projection_dims": cls.ideal_projections.iter().map(Subspace::rank).collect::<Vec<_>>(),
        "killing_proportional": cls.killing_proportional,
        "harmonic_for_all_biinvariant": cls.harmonic_for_all_biinvariant,
        "nonharmonic_metric_exists": cls.nonharmonic_metric_exists,
        "witness_ideal": cls.witness_ideal,
        "harmonic_here": normal.harmonic,
        "max_abs": normal.max_abs,
        "residual_normal_form": matrix_to_rows(&normal.residual),
        "residual_tangent_form": matrix_to_rows(&tangential.residual),
    });
    // The nonexistence half of the classification is constructive: exhibit
    // the metric whenever the verdict says one exists.
    if cls.nonharmonic_metric_exists {
        let ip = harmonicity::witness_metric(ctx.m, &cls, ctx.lambda, ctx.tol)?;
        let m2 = MetricLieAlgebra::new(ctx.m.algebra().clone(), ip.clone())?;
        let (wn, _) = harmonicity::residual_biinvariant_tg(&m2, &s, ctx.tol)?;
        let obj = details.as_object_mut().expect("object literal");
        obj.insert("witness_metric".to_string(), json!(matrix_to_rows(ip.matrix())));
        obj.insert("witness_lambda".to_string(), json!(ctx.lambda));
        obj.insert("residual_max_under_witness".to_string(), json!(wn.max_abs));
    }
    let verdict = if cls.harmonic_for_all_biinvariant {
        "harmonic for every biinvariant metric".to_string()
    } else {
        "some biinvariant metric makes the Gauss map non-harmonic".to_string()
    };
    Ok(TaskOutput { verdict, details, warnings: Vec::new() })
}

fn witness(ctx: &TaskContext) -> TaskResult {
    let s = require_subspace(ctx, "witness")?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let cls = harmonicity::classify_harmonicity(ctx.m, &s, ctx.tol, &mut rng)?;
    let ip = harmonicity::witness_metric(ctx.m, &cls, ctx.lambda, ctx.tol)?;
    let m2 = MetricLieAlgebra::new(ctx.m.algebra().clone(), ip.clone())?;
    let (normal, tangential) = harmonicity::residual_biinvariant_tg(&m2, &s, ctx.tol)?;
    let details = json!({
        "lambda": ctx.lambda,
        "witness_ideal": cls.witness_ideal,
        "witness_metric": matrix_to_rows(ip.matrix()),
        "residual_max_under_witness": normal.max_abs,
        "residual_normal_form": matrix_to_rows(&normal.residual),
        "residual_tangent_form": matrix_to_rows(&tangential.residual),
    });
    Ok(TaskOutput {
        verdict: format!(
            "nonharmonic biinvariant metric produced (max |r| = {})",
            fmt_max(normal.max_abs)
        ),
        details,
        warnings: Vec::new(),
    })
}

fn nilpotent_geodesic(ctx: &TaskContext) -> TaskResult {
    let s = require_subspace(ctx, "nilpotent_geodesic")?;
    let ns = NilpotentStructure::new(ctx.m.clone(), ctx.tol)?;
    let mut directions = Vec::new();
    let mut harmonic_count = 0usize;
    for g in s.generators() {
        let v = ns.geodesic_verdict(g)?;
        if v.harmonic {
            harmonic_count += 1;
        }
        directions.push(json!({
            "direction": g.iter().copied().collect::<Vec<f64>>(),
            "jzx_norm": v.jzx_norm,
            "residual_norm": v.residual_norm,
            "harmonic": v.harmonic,
            "one_parameter": v.one_parameter,
        }));
    }
    let probe = ns.nonsingular_probe(PROBE_SAMPLES, ctx.seed)?;
    let mut warnings = Vec::new();
    if probe.probabilistic {
        warnings.push(format!(
            "nonsingularity probe is probabilistic ({} samples, no singular direction found)",
            probe.samples_used
        ));
    }
    let details = json!({
        "center_dim": ns.center().rank(),
        "complement_dim": ns.complement().rank(),
        "directions": directions,
        "probe": {
            "nonsingular_witnessed": probe.nonsingular_witnessed,
            "probabilistic": probe.probabilistic,
            "samples_used": probe.samples_used,
            "singular_z": probe.singular_z.as_ref().map(|z| z.iter().copied().collect::<Vec<f64>>()),
        },
    });
    let total = s.generators().len();
    let verdict = if total == 1 {
        if harmonic_count == 1 { "harmonic".to_string() } else { "not harmonic".to_string() }
    } else {
        format!("{harmonic_count} of {total} directions harmonic")
    };
    Ok(TaskOutput { verdict, details, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_document;
    use gaussmap_core::{DEFAULT_SEED, DEFAULT_TOL};

    fn run_doc(doc: &AnalysisDocument) -> Vec<TaskEntry> {
        let m = doc.build_metric_algebra().unwrap();
        let ctx = TaskContext {
            doc,
            m: &m,
            tol: doc.tolerance.unwrap_or(DEFAULT_TOL),
            seed: doc.seed.unwrap_or(DEFAULT_SEED),
            lambda: doc.lambda.unwrap_or(DEFAULT_LAMBDA),
        };
        effective_tasks(doc).iter().map(|t| run_task(t, &ctx)).collect()
    }

    #[test]
    fn validate_reports_the_basic_diagnostics() {
        let doc = builtin_document("so3", &[]).unwrap();
        let entries = run_doc(&doc);
        let v = &entries[0];
        assert_eq!(v.status, "ok");
        assert_eq!(v.verdict.as_deref(), Some("valid"));
        let d = v.details.as_ref().unwrap();
        assert_eq!(d["jacobi_residual"], json!(0.0));
        assert_eq!(d["center_dim"], json!(0));
        assert_eq!(d["derived_dim"], json!(3));
    }

    #[test]
    fn a_failing_task_does_not_disturb_its_neighbours() {
        let mut doc = builtin_document("so3", &[]).unwrap();
        doc.tasks = vec!["nilpotent_geodesic".to_string(), "validate".to_string()];
        let entries = run_doc(&doc);
        assert_eq!(entries[0].status, "error");
        assert_eq!(entries[0].error_kind.as_deref(), Some("precondition"));
        assert_eq!(entries[1].status, "ok");
        assert_eq!(exit_code(&entries), 3);
    }

    #[test]
    fn heisenberg_line_is_reported_nonharmonic_with_the_known_residual() {
        let doc = builtin_document("heisenberg3", &[]).unwrap();
        let entries = run_doc(&doc);
        let geo = entries.iter().find(|e| e.task == "nilpotent_geodesic").unwrap();
        assert_eq!(geo.verdict.as_deref(), Some("not harmonic"));
        let d = geo.details.as_ref().unwrap();
        let dir = &d["directions"][0];
        assert!((dir["residual_norm"].as_f64().unwrap() - 0.25).abs() <= 1e-12);
        assert!((dir["jzx_norm"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
        assert_eq!(d["probe"]["nonsingular_witnessed"], json!(true));
        assert_eq!(d["probe"]["probabilistic"], json!(false));
        assert!(geo.warnings.is_empty());
    }

    #[test]
    fn classification_at_a_2_produces_the_witness_inline() {
        let doc = builtin_document("so3xso3", &[("a".to_string(), 2.0)]).unwrap();
        let entries = run_doc(&doc);
        let tg = entries.iter().find(|e| e.task == "harmonicity_tg").unwrap();
        assert!(tg.verdict.as_deref().unwrap().starts_with("not harmonic"));
        let cls = entries.iter().find(|e| e.task == "classify_harmonicity").unwrap();
        assert_eq!(cls.status, "ok");
        let d = cls.details.as_ref().unwrap();
        assert_eq!(d["nonharmonic_metric_exists"], json!(true));
        assert_eq!(d["killing_proportional"], json!(false));
        assert!(d["residual_max_under_witness"].as_f64().unwrap() > DEFAULT_TOL);
        assert_eq!(d["witness_metric"].as_array().unwrap().len(), 6);
        assert_eq!(exit_code(&entries), 0);
    }

    #[test]
    fn classification_at_a_1_is_harmonic_here_but_not_for_every_metric() {
        let doc = builtin_document("so3xso3", &[("a".to_string(), 1.0)]).unwrap();
        let entries = run_doc(&doc);
        let tg = entries.iter().find(|e| e.task == "harmonicity_tg").unwrap();
        assert!(tg.verdict.as_deref().unwrap().starts_with("harmonic"));
        let cls = entries.iter().find(|e| e.task == "classify_harmonicity").unwrap();
        assert_eq!(
            cls.verdict.as_deref(),
            Some("some biinvariant metric makes the Gauss map non-harmonic")
        );
        let d = cls.details.as_ref().unwrap();
        assert_eq!(d["harmonic_here"], json!(true));
        assert_eq!(d["killing_proportional"], json!(true));
        assert!((d["witness_metric"][0][0].as_f64().unwrap() - 4.0).abs() <= 1e-12);
        assert!((d["witness_metric"][5][5].as_f64().unwrap() - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn coordinate_planes_carry_no_witness() {
        let mut doc = builtin_document("so3xso3", &[("a".to_string(), 2.0)]).unwrap();
        doc.subspace = Some(vec![
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        ]);
        doc.tasks = vec!["classify_harmonicity".to_string(), "witness".to_string()];
        let entries = run_doc(&doc);
        assert_eq!(
            entries[0].verdict.as_deref(),
            Some("harmonic for every biinvariant metric")
        );
        assert_eq!(entries[0].details.as_ref().unwrap()["witness_metric"], Value::Null);
        assert_eq!(entries[1].status, "error");
        assert_eq!(entries[1].error_kind.as_deref(), Some("precondition"));
        assert_eq!(exit_code(&entries), 3);
    }

    #[test]
    fn witness_task_matches_the_inline_construction() {
        let mut doc = builtin_document("so3xso3", &[("a".to_string(), 2.0)]).unwrap();
        doc.tasks = vec!["witness".to_string()];
        let entries = run_doc(&doc);
        let w = &entries[0];
        assert_eq!(w.status, "ok");
        let d = w.details.as_ref().unwrap();
        assert!(d["residual_max_under_witness"].as_f64().unwrap() > DEFAULT_TOL);
        assert_eq!(d["witness_ideal"], json!(0));
    }

    #[test]
    fn immersion_block_feeds_the_general_criterion() {
        let text = r#"{
            "algebra": {"dim": 3},
            "metric": "identity",
            "immersion": {
                "tangent_frame": [[1,0,0],[0,1,0]],
                "normal_frame": [[0,0,1]],
                "b": [[[0],[0]],[[0],[0]]]
            },
            "tasks": ["harmonicity_general"]
        }"#;
        let doc = crate::document::parse_document(text).unwrap();
        let entries = run_doc(&doc);
        assert_eq!(entries[0].status, "ok");
        assert_eq!(entries[0].warnings.len(), 1, "defaulted dH warns");
        assert!(entries[0].verdict.as_deref().unwrap().starts_with("harmonic"));
    }

    #[test]
    fn missing_inputs_are_precondition_errors() {
        let mut doc = builtin_document("euclidean", &[("n".to_string(), 3.0)]).unwrap();
        doc.tasks = vec!["harmonicity_tg".to_string()];
        let entries = run_doc(&doc);
        assert_eq!(entries[0].status, "error");
        assert_eq!(entries[0].error_kind.as_deref(), Some("precondition"));
        assert_eq!(exit_code(&entries), 3);
    }
}
