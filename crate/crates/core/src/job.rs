//! Job parsing and the certificate-emitting pipeline.
//!
//! A job is a TOML document naming a group, a triangle signature, generator
//! images (explicit or `"search"`), the stages to run, and options (seed,
//! tolerances, enumeration bound). Running a job executes the stages in
//! dependency order and emits a canonical certificate. Mathematical
//! verification failures are not process errors: the certificate records the
//! failure transcript and the run reports a nonzero verdict.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::census::{boundary_census, corollary_constructions, orientability_3d, BoundaryClassReport, CorollaryRecord};
use crate::certificate::{emit_certificate, permutation_value, rational_value, SCHEMA_VERSION};
use crate::coxeter::LabeledPolyhedron;
use crate::error::Error;
use crate::extend::{extend_thm1_all, extend_thm2, select_extension, ExtensionResult, Theorem};
use crate::lorentz::{
    classify_and_realize, gram_tetrahedron, solve_double_cone_gram, validate_realization,
    GramMatrix, PolyhedronRealization, RealizationReport, SolveOptions, SolveReport,
    EIGEN_ZERO_TOL, ORTHOGONALITY_TOL, SOLVE_TOL, VALIDATION_TOL,
};
use crate::permgroup::{projective_group, GeneratedGroup, Permutation, ProjectiveKind, DEFAULT_PRIME_BOUND};
use crate::surface::{
    lift_double_cover, search_epimorphisms, validate_action, SurfaceAction, TriangleSignature,
};
use crate::{Result, DEFAULT_ENUMERATION_BOUND};

/// Pipeline stages, in dependency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Validate,
    ExtendT1,
    ExtendT2,
    Realize,
    Census,
    Corollaries,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::ExtendT1 => "extend_t1",
            Stage::ExtendT2 => "extend_t2",
            Stage::Realize => "realize",
            Stage::Census => "census",
            Stage::Corollaries => "corollaries",
        }
    }

    pub fn parse(s: &str) -> Result<Stage> {
        Ok(match s {
            "validate" => Stage::Validate,
            "extend_t1" => Stage::ExtendT1,
            "extend_t2" => Stage::ExtendT2,
            "realize" => Stage::Realize,
            "census" => Stage::Census,
            "corollaries" => Stage::Corollaries,
            other => return Err(Error::Job(format!("unknown stage {other:?}"))),
        })
    }
}

/// How to obtain the acting group.
#[derive(Clone, Debug)]
pub enum GroupSpec {
    Permutation {
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    Projective {
        q: u64,
        kind: ProjectiveKind,
    },
    /// Direct product of a base group with a two-element group, on the
    /// disjoint union of two copies of the base point set.
    DirectProductZ2 {
        base: Box<GroupSpec>,
    },
}

impl GroupSpec {
    fn kind_str(&self) -> &'static str {
        match self {
            GroupSpec::Permutation { .. } => "permutation",
            GroupSpec::Projective { kind, .. } => kind.as_str(),
            GroupSpec::DirectProductZ2 { .. } => "direct_product",
        }
    }

    fn build(&self, bound: usize) -> Result<GeneratedGroup> {
        match self {
            GroupSpec::Permutation { degree, generators } => {
                let gens = generators
                    .iter()
                    .map(|images| {
                        if images.len() != *degree {
                            return Err(Error::Job(format!(
                                "group.generators: permutation of length {} for degree {degree}",
                                images.len()
                            )));
                        }
                        Permutation::from_images(images)
                    })
                    .collect::<Result<Vec<_>>>()?;
                GeneratedGroup::generate(*degree, gens, bound)
            }
            GroupSpec::Projective { q, kind } => {
                projective_group(*q, *kind, DEFAULT_PRIME_BOUND, bound)
            }
            GroupSpec::DirectProductZ2 { base } => base.build(bound)?.direct_product_with_z2(bound),
        }
    }
}

/// Generator images: search exhaustively or take them verbatim.
#[derive(Clone, Debug)]
pub enum ImagesSpec {
    Search,
    Explicit([Vec<usize>; 3]),
}

/// Runtime options of a job.
#[derive(Clone, Debug)]
pub struct JobOptions {
    pub seed: u64,
    pub solve_tol: f64,
    pub max_group_order: usize,
    pub max_restarts: usize,
    pub out: Option<String>,
}

impl Default for JobOptions {
    fn default() -> Self {
        JobOptions {
            seed: 42,
            solve_tol: SOLVE_TOL,
            max_group_order: DEFAULT_ENUMERATION_BOUND,
            max_restarts: 32,
            out: None,
        }
    }
}

/// A parsed, validated job.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub group: GroupSpec,
    pub signature: TriangleSignature,
    pub images: ImagesSpec,
    pub lift: bool,
    pub stages: Vec<Stage>,
    pub options: JobOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobFile {
    group: GroupSection,
    action: ActionSection,
    #[serde(default)]
    stages: Vec<String>,
    #[serde(default)]
    options: OptionsSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSection {
    kind: String,
    q: Option<u64>,
    degree: Option<usize>,
    generators: Option<Vec<Vec<usize>>>,
    base: Option<Box<GroupSection>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionSection {
    signature: [u32; 3],
    images: ImagesField,
    #[serde(default)]
    lift: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ImagesField {
    Mode(String),
    Explicit(Vec<Vec<usize>>),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OptionsSection {
    seed: Option<u64>,
    solve_tol: Option<f64>,
    max_group_order: Option<usize>,
    max_restarts: Option<usize>,
    out: Option<String>,
}

fn group_spec_from_section(section: &GroupSection) -> Result<GroupSpec> {
    match section.kind.as_str() {
        "permutation" => {
            let degree = section
                .degree
                .ok_or_else(|| Error::Job("group.degree is required for kind \"permutation\"".into()))?;
            let generators = section
                .generators
                .clone()
                .ok_or_else(|| Error::Job("group.generators is required for kind \"permutation\"".into()))?;
            Ok(GroupSpec::Permutation { degree, generators })
        }
        "psl2" | "pgl2" => {
            let q = section
                .q
                .ok_or_else(|| Error::Job(format!("group.q is required for kind {:?}", section.kind)))?;
            let kind = if section.kind == "psl2" {
                ProjectiveKind::Psl
            } else {
                ProjectiveKind::Pgl
            };
            Ok(GroupSpec::Projective { q, kind })
        }
        "direct_product" => {
            let base = section
                .base
                .as_ref()
                .ok_or_else(|| Error::Job("group.base is required for kind \"direct_product\"".into()))?;
            Ok(GroupSpec::DirectProductZ2 {
                base: Box::new(group_spec_from_section(base)?),
            })
        }
        other => Err(Error::Job(format!("unknown group kind {other:?}"))),
    }
}

/// Parses and validates a TOML job document.
///
/// Stage lists must name each stage once, contain at most one extension
/// stage, and respect dependencies (extension requires validation; the census
/// requires extension and realization). An empty stage list defaults to the
/// full pipeline with the extension stage chosen by the signature.
pub fn parse_job(text: &str) -> Result<JobSpec> {
    let file: JobFile = toml::from_str(text).map_err(|e| Error::Job(format!("parse error: {e}")))?;
    let group = group_spec_from_section(&file.group)?;
    let [p, q, r] = file.action.signature;
    let signature = TriangleSignature::new(p, q, r)
        .map_err(|e| Error::Job(format!("action.signature: {e}")))?;
    let images = match file.action.images {
        ImagesField::Mode(mode) if mode == "search" => ImagesSpec::Search,
        ImagesField::Mode(other) => {
            return Err(Error::Job(format!(
                "action.images must be \"search\" or three permutations, got {other:?}"
            )))
        }
        ImagesField::Explicit(perms) => {
            let arr: [Vec<usize>; 3] = perms
                .try_into()
                .map_err(|_| Error::Job("action.images must list exactly three permutations".into()))?;
            ImagesSpec::Explicit(arr)
        }
    };
    let mut stages = if file.stages.is_empty() {
        let extend = if signature.is_237() { Stage::ExtendT1 } else { Stage::ExtendT2 };
        vec![Stage::Validate, extend, Stage::Realize, Stage::Census, Stage::Corollaries]
    } else {
        file.stages.iter().map(|s| Stage::parse(s)).collect::<Result<Vec<_>>>()?
    };
    stages.sort_unstable();
    stages.dedup();
    let has = |s: Stage| stages.contains(&s);
    if has(Stage::ExtendT1) && has(Stage::ExtendT2) {
        return Err(Error::Job("stages request both extension constructions".into()));
    }
    let has_extend = has(Stage::ExtendT1) || has(Stage::ExtendT2);
    if has_extend && !has(Stage::Validate) {
        return Err(Error::Job("extension requires the validate stage".into()));
    }
    if has(Stage::Realize) && !has_extend {
        return Err(Error::Job("realization requires an extension stage".into()));
    }
    if has(Stage::Census) && !(has_extend && has(Stage::Realize)) {
        return Err(Error::Job("census requires extension and realization stages".into()));
    }
    if has(Stage::Corollaries) && !has(Stage::Validate) {
        return Err(Error::Job("corollary constructions require the validate stage".into()));
    }
    if has(Stage::ExtendT1) && !signature.is_237() {
        return Err(Error::Job(format!(
            "the tetrahedral extension applies only to signature [2,3,7], not {signature}"
        )));
    }
    let options = JobOptions {
        seed: file.options.seed.unwrap_or(42),
        solve_tol: file.options.solve_tol.unwrap_or(SOLVE_TOL),
        max_group_order: file.options.max_group_order.unwrap_or(DEFAULT_ENUMERATION_BOUND),
        max_restarts: file.options.max_restarts.unwrap_or(32),
        out: file.options.out.clone(),
    };
    Ok(JobSpec {
        group,
        signature,
        images,
        lift: file.action.lift,
        stages,
        options,
    })
}

/// Outcome of a pipeline run: the verdict and the canonical certificate.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// 0 if every requested verification passed, 1 otherwise.
    pub exit_code: i32,
    pub verified: bool,
    pub certificate: String,
    pub summary: Vec<String>,
}

#[derive(Default)]
struct StageStatus {
    validate: &'static str,
    extend: &'static str,
    realize: &'static str,
    census: &'static str,
    corollaries: &'static str,
}

struct PipelineState {
    action: Option<SurfaceAction>,
    search_class_count: Option<usize>,
    lift_base: Option<SurfaceAction>,
    deck_involution: Option<Permutation>,
    extensions: Vec<ExtensionResult>,
    selected: Option<usize>,
    gram: Option<GramMatrix>,
    solve_report: Option<SolveReport>,
    realization: Option<PolyhedronRealization>,
    realization_report: Option<RealizationReport>,
    manifold_orientable: Option<bool>,
    manifold_kernel_order: Option<u64>,
    census: Vec<BoundaryClassReport>,
    corollaries: Vec<CorollaryRecord>,
    corollaries_defined: bool,
}

impl PipelineState {
    fn new() -> Self {
        PipelineState {
            action: None,
            search_class_count: None,
            lift_base: None,
            deck_involution: None,
            extensions: Vec::new(),
            selected: None,
            gram: None,
            solve_report: None,
            realization: None,
            realization_report: None,
            manifold_orientable: None,
            manifold_kernel_order: None,
            census: Vec::new(),
            corollaries: Vec::new(),
            corollaries_defined: false,
        }
    }

    fn selected_extension(&self) -> Option<&ExtensionResult> {
        self.selected.map(|i| &self.extensions[i])
    }
}

/// Runs a job and assembles its certificate.
///
/// Input and resource errors are returned as `Err`; mathematical verification
/// failures yield `Ok` with exit code 1 and a certificate carrying the
/// failure transcript.
pub fn run_job(spec: &JobSpec) -> Result<RunOutcome> {
    let mut state = PipelineState::new();
    let mut status = StageStatus {
        validate: "skipped",
        extend: "skipped",
        realize: "skipped",
        census: "skipped",
        corollaries: "skipped",
    };
    let mut summary = Vec::new();
    let failure = run_stages(spec, &mut state, &mut status, &mut summary)?;

    let verified = failure.is_none();
    let certificate = assemble_certificate(spec, &state, &status, failure.as_ref())?;
    let certificate = emit_certificate(&certificate)?;
    if let Some((stage, message)) = &failure {
        summary.push(format!("FAILED at {stage}: {message}"));
    } else {
        summary.push("all requested verifications passed".into());
    }
    Ok(RunOutcome {
        exit_code: if verified { 0 } else { 1 },
        verified,
        certificate,
        summary,
    })
}

/// Executes the requested stages. Returns `Some((stage, message))` on a
/// mathematical verification failure; propagates input/resource errors.
fn run_stages(
    spec: &JobSpec,
    state: &mut PipelineState,
    status: &mut StageStatus,
    summary: &mut Vec<String>,
) -> Result<Option<(String, String)>> {
    let bound = spec.options.max_group_order;
    let has = |s: Stage| spec.stages.contains(&s);
    let group = Arc::new(spec.group.build(bound)?);
    summary.push(format!(
        "group: kind {} of order {} on {} points",
        spec.group.kind_str(),
        group.order(),
        group.degree()
    ));

    // validate
    if has(Stage::Validate) {
        match &spec.images {
            ImagesSpec::Search => {
                let found = search_epimorphisms(spec.signature, &group, bound)?;
                state.search_class_count = Some(found.len());
                summary.push(format!(
                    "search: {} action class(es) of {} up to conjugacy",
                    found.len(),
                    spec.signature
                ));
                match found.into_iter().next() {
                    Some(action) => state.action = Some(action),
                    None => {
                        status.validate = "done";
                        if spec.stages.iter().any(|&s| s != Stage::Validate) {
                            status.validate = "failed";
                            return Ok(Some((
                                "validate".into(),
                                "search found no valid action; later stages cannot run".into(),
                            )));
                        }
                        return Ok(None);
                    }
                }
            }
            ImagesSpec::Explicit(images) => {
                let perms = [
                    Permutation::from_images(&images[0])?,
                    Permutation::from_images(&images[1])?,
                    Permutation::from_images(&images[2])?,
                ];
                for p in &perms {
                    if p.degree() != group.degree() {
                        return Err(Error::Job(format!(
                            "action.images: permutation degree {} does not match group degree {}",
                            p.degree(),
                            group.degree()
                        )));
                    }
                }
                match validate_action(spec.signature, Arc::clone(&group), perms, bound) {
                    Ok(action) => state.action = Some(action),
                    Err(Error::ActionRejected(check)) => {
                        status.validate = "failed";
                        return Ok(Some(("validate".into(), check.to_string())));
                    }
                    Err(other) => return Err(other),
                }
            }
        }
        if spec.lift {
            let action = state.action.take().expect("validated above");
            if action.orientable() {
                return Err(Error::Job(
                    "action.lift requires a nonorientable action; the validated action is orientable"
                        .into(),
                ));
            }
            let lift = lift_double_cover(&action, bound)?;
            summary.push(format!(
                "lift: double cover with group order {} and genus {}",
                lift.lifted_group().order(),
                lift.lifted().genus()
            ));
            state.deck_involution = Some(lift.deck_involution().clone());
            state.action = Some(lift.lifted().clone());
            state.lift_base = Some(action);
        }
        status.validate = "done";
        let action = state.action.as_ref().expect("validated");
        summary.push(format!(
            "action: chi = {}, {}, genus {}, hurwitz class {}",
            action.euler_characteristic(),
            if action.orientable() { "orientable" } else { "nonorientable" },
            action.genus(),
            action.hurwitz_class().as_str()
        ));
    }

    // extend
    let wants_extend = has(Stage::ExtendT1) || has(Stage::ExtendT2);
    if wants_extend {
        let action = state.action.as_ref().expect("dependency checked at parse");
        if has(Stage::ExtendT1) {
            state.extensions = extend_thm1_all(action, bound)?;
            state.selected = select_extension(&state.extensions);
            let free = state.extensions.iter().filter(|e| e.kernel_free()).count();
            summary.push(format!(
                "extension: {} tetrahedral candidate(s), {} with free kernel",
                state.extensions.len(),
                free
            ));
            if state.selected.is_none() {
                status.extend = "failed";
                return Ok(Some((
                    "extend".into(),
                    "no candidate extension has a torsion-free kernel".into(),
                )));
            }
            let x = state.extensions[state.selected.unwrap()].candidate().unwrap().x;
            summary.push(format!("extension: selected candidate with x = {x}"));
        } else {
            let ext = extend_thm2(action, bound)?;
            let free = ext.kernel_free();
            state.extensions = vec![ext];
            state.selected = Some(0);
            summary.push("extension: double cone over the triangle".into());
            if !free {
                status.extend = "failed";
                return Ok(Some((
                    "extend".into(),
                    "the double-cone extension kernel is not torsion-free".into(),
                )));
            }
        }
        status.extend = "done";
    }

    // realize
    if has(Stage::Realize) {
        let ext = state.selected_extension().expect("extension selected").clone();
        let gram = match ext.theorem() {
            Theorem::T1 => gram_tetrahedron(ext.candidate().unwrap().x)?,
            Theorem::T2 => {
                let (p, q, r) = ext.base_action().signature().as_tuple();
                let options = SolveOptions {
                    seed: spec.options.seed,
                    tol: spec.options.solve_tol,
                    max_restarts: spec.options.max_restarts,
                };
                let (gram, report) = solve_double_cone_gram(p, q, r, &options)?;
                state.solve_report = Some(report);
                gram
            }
        };
        match classify_and_realize(&gram, ext.polyhedron())
            .and_then(|real| {
                validate_realization(&real, &gram, ext.polyhedron()).map(|report| (real, report))
            }) {
            Ok((realization, report)) => {
                summary.push(format!(
                    "realization: {} truncated vertex(es), max Gram defect {:.3e}",
                    realization
                        .vertex_classes()
                        .iter()
                        .filter(|&&c| c == crate::lorentz::VertexClass::Hyperideal)
                        .count(),
                    report.max_gram_defect
                ));
                state.gram = Some(gram);
                state.realization = Some(realization);
                state.realization_report = Some(report);
                status.realize = "done";
            }
            Err(Error::Realization(message)) => {
                state.gram = Some(gram);
                status.realize = "failed";
                return Ok(Some(("realize".into(), message)));
            }
            Err(other) => return Err(other),
        }
    }

    // census
    if has(Stage::Census) {
        let ext = state.selected_extension().expect("extension selected").clone();
        let realization = state.realization.as_ref().expect("realized");
        let (orientable, character) = orientability_3d(&ext, bound)?;
        state.manifold_orientable = Some(orientable);
        state.manifold_kernel_order = character.map(|c| c.kernel_order());
        match boundary_census(&ext, realization, bound) {
            Ok(census) => {
                summary.push(format!(
                    "census: {} boundary class(es), quotient {}",
                    census.len(),
                    if orientable { "orientable" } else { "nonorientable" }
                ));
                state.census = census;
                status.census = "done";
            }
            Err(Error::Internal(message)) => {
                status.census = "failed";
                return Ok(Some(("census".into(), message)));
            }
            Err(other) => return Err(other),
        }
    }

    // corollaries
    if has(Stage::Corollaries) {
        let action = state.action.as_ref().expect("validated");
        if action.orientable() {
            state.corollaries =
                corollary_constructions(action, state.deck_involution.as_ref(), bound)?;
            state.corollaries_defined = true;
            summary.push(format!(
                "corollaries: {} split-and-identify record(s), {} closing to manifolds",
                state.corollaries.len(),
                state
                    .corollaries
                    .iter()
                    .filter(|r| r.result_kind == crate::census::ResultKind::Manifold)
                    .count()
            ));
        } else {
            // No orientation-reversing involutions are defined on a
            // nonorientable surface; an empty record list is not a failure.
            state.corollaries_defined = false;
            summary.push("corollaries: undefined on a nonorientable surface".into());
        }
        status.corollaries = "done";
    }

    Ok(None)
}

fn group_value(spec: &JobSpec, group: &GeneratedGroup) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), Value::from(spec.group.kind_str()));
    if let GroupSpec::Projective { q, .. } = &spec.group {
        m.insert("q".into(), Value::from(*q));
    }
    m.insert("order".into(), Value::from(group.order()));
    m.insert("degree".into(), Value::from(group.degree() as u64));
    m.insert(
        "generators".into(),
        Value::Array(group.generators().iter().map(permutation_value).collect()),
    );
    Value::Object(m)
}

fn action_value(spec: &JobSpec, state: &PipelineState) -> Value {
    let Some(action) = &state.action else {
        return Value::Null;
    };
    let (p, q, r) = action.signature().as_tuple();
    let mut m = Map::new();
    m.insert("signature".into(), json!([p, q, r]));
    m.insert("group".into(), group_value(spec, action.group()));
    m.insert(
        "images".into(),
        Value::Array(action.images().iter().map(permutation_value).collect()),
    );
    m.insert("euler_characteristic".into(), Value::from(action.euler_characteristic()));
    m.insert("orientable".into(), Value::from(action.orientable()));
    m.insert("genus".into(), Value::from(action.genus()));
    m.insert("hurwitz_class".into(), Value::from(action.hurwitz_class().as_str()));
    m.insert(
        "surface_character_kernel_order".into(),
        match action.surface_character() {
            Some(c) => Value::from(c.kernel_order()),
            None => Value::Null,
        },
    );
    let mut search = Map::new();
    search.insert(
        "performed".into(),
        Value::from(matches!(spec.images, ImagesSpec::Search)),
    );
    search.insert(
        "classes_up_to_inner_automorphism".into(),
        match state.search_class_count {
            Some(n) => Value::from(n as u64),
            None => Value::Null,
        },
    );
    search.insert(
        "selected_index".into(),
        if state.search_class_count.is_some() { Value::from(0) } else { Value::Null },
    );
    m.insert("search".into(), Value::Object(search));
    m.insert(
        "lift".into(),
        match (&state.lift_base, &state.deck_involution) {
            (Some(base), Some(tau)) => {
                let mut lift = Map::new();
                lift.insert(
                    "base_images".into(),
                    Value::Array(base.images().iter().map(permutation_value).collect()),
                );
                lift.insert("base_group_order".into(), Value::from(base.group().order()));
                lift.insert(
                    "base_euler_characteristic".into(),
                    Value::from(base.euler_characteristic()),
                );
                lift.insert("base_genus".into(), Value::from(base.genus()));
                lift.insert("deck_involution".into(), permutation_value(tau));
                Value::Object(lift)
            }
            _ => Value::Null,
        },
    );
    Value::Object(m)
}

fn polyhedron_value(polyhedron: &LabeledPolyhedron) -> Value {
    let faces: Vec<Value> = polyhedron.faces().iter().map(|f| Value::from(f.as_str())).collect();
    let edges: Vec<Value> = polyhedron
        .edges()
        .iter()
        .map(|e| json!([e.faces.0, e.faces.1, e.label]))
        .collect();
    let vertices: Vec<Value> = polyhedron
        .vertices()
        .iter()
        .map(|v| Value::Array(v.iter().map(|&i| Value::from(i as u64)).collect()))
        .collect();
    json!({"faces": faces, "edges": edges, "vertices": vertices})
}

fn extension_value(state: &PipelineState) -> Value {
    if state.extensions.is_empty() {
        return Value::Null;
    }
    let reference = &state.extensions[0];
    let mut m = Map::new();
    m.insert("theorem".into(), Value::from(reference.theorem().as_str()));
    m.insert("polyhedron".into(), polyhedron_value(reference.polyhedron()));
    let face_names = reference.polyhedron().faces().to_vec();
    m.insert(
        "coxeter_presentation".into(),
        Value::from(reference.coxeter().presentation(&face_names)),
    );
    let candidates: Vec<Value> = state
        .extensions
        .iter()
        .map(|ext| {
            let mut c = Map::new();
            if let Some(candidate) = ext.candidate() {
                c.insert("reflection".into(), permutation_value(&candidate.reflection));
                c.insert("x".into(), Value::from(candidate.x));
            }
            c.insert("kernel_free".into(), Value::from(ext.kernel_free()));
            Value::Object(c)
        })
        .collect();
    m.insert("candidates".into(), Value::Array(candidates));
    m.insert(
        "selected_candidate".into(),
        match state.selected {
            Some(i) => Value::from(i as u64),
            None => Value::Null,
        },
    );
    if let Some(ext) = state.selected_extension() {
        let faces = ext.polyhedron().faces();
        let mut images = Map::new();
        for (i, image) in ext.psi_images().iter().enumerate() {
            images.insert(faces[i].clone(), permutation_value(image));
        }
        m.insert("psi_images".into(), Value::Object(images));
        m.insert("kernel_free".into(), Value::from(ext.kernel_free()));
        let transcript: Vec<Value> = ext
            .transcript()
            .iter()
            .map(|entry| {
                json!({
                    "subset": entry.subset.iter().map(|&i| faces[i].clone()).collect::<Vec<_>>(),
                    "abstract_order": entry.abstract_order,
                    "image_order": entry.image_order,
                    "injective": entry.injective,
                })
            })
            .collect();
        m.insert("freeness_transcript".into(), Value::Array(transcript));
    } else {
        m.insert("psi_images".into(), Value::Null);
        m.insert("kernel_free".into(), Value::from(false));
        // Retain the failing transcripts for diagnosis.
        let transcripts: Vec<Value> = state
            .extensions
            .iter()
            .map(|ext| {
                let faces = ext.polyhedron().faces();
                Value::Array(
                    ext.transcript()
                        .iter()
                        .map(|entry| {
                            json!({
                                "subset": entry.subset.iter().map(|&i| faces[i].clone()).collect::<Vec<_>>(),
                                "abstract_order": entry.abstract_order,
                                "image_order": entry.image_order,
                                "injective": entry.injective,
                            })
                        })
                        .collect(),
                )
            })
            .collect();
        m.insert("freeness_transcript".into(), Value::Array(transcripts));
    }
    Value::Object(m)
}

fn realization_value(state: &PipelineState) -> Value {
    let Some(gram) = &state.gram else {
        return Value::Null;
    };
    let mut m = Map::new();
    let n = gram.n();
    let matrix: Vec<Value> = (0..n)
        .map(|i| Value::Array((0..n).map(|j| Value::from(gram.value(i, j))).collect()))
        .collect();
    m.insert("gram_matrix".into(), Value::Array(matrix));
    if let Some(real) = &state.realization {
        m.insert(
            "face_normals".into(),
            Value::Array(
                real.face_normals()
                    .iter()
                    .map(|v| Value::Array((0..4).map(|k| Value::from(v[k])).collect()))
                    .collect(),
            ),
        );
        m.insert(
            "vertex_classes".into(),
            Value::Array(
                real.vertex_classes()
                    .iter()
                    .map(|c| Value::from(c.as_str()))
                    .collect(),
            ),
        );
        m.insert(
            "truncating_planes".into(),
            Value::Array(
                real.truncating_planes()
                    .iter()
                    .map(|p| match p {
                        Some(v) => Value::Array((0..4).map(|k| Value::from(v[k])).collect()),
                        None => Value::Null,
                    })
                    .collect(),
            ),
        );
        m.insert("residual".into(), Value::from(real.residual()));
    }
    if let Some(report) = &state.realization_report {
        m.insert("max_gram_defect".into(), Value::from(report.max_gram_defect));
        m.insert(
            "max_orthogonality_defect".into(),
            Value::from(report.max_orthogonality_defect),
        );
        m.insert("max_angle_defect".into(), Value::from(report.max_angle_defect));
    }
    m.insert(
        "solve".into(),
        match &state.solve_report {
            Some(report) => json!({
                "minor_residual": report.minor_residual,
                "vertex_residual": report.vertex_residual,
                "restarts": report.restarts,
            }),
            None => Value::Null,
        },
    );
    Value::Object(m)
}

fn census_value(state: &PipelineState, face_names: Option<&[String]>) -> Value {
    Value::Array(
        state
            .census
            .iter()
            .map(|report| {
                let faces: Vec<Value> = match face_names {
                    Some(names) => report.faces.iter().map(|&i| Value::from(names[i].as_str())).collect(),
                    None => report.faces.iter().map(|&i| Value::from(i as u64)).collect(),
                };
                json!({
                    "vertex": report.vertex,
                    "faces": faces,
                    "vertex_class": report.vertex_class.as_str(),
                    "labels": report.labels,
                    "orbifold_euler": rational_value(report.orbifold_euler),
                    "total_euler": report.total_euler,
                    "component_count": report.component_count,
                    "per_component_euler": report.per_component_euler,
                    "stabilizer_assumption": report.stabilizer_assumption,
                    "is_cone_class": report.is_cone_class,
                })
            })
            .collect(),
    )
}

fn corollaries_value(state: &PipelineState) -> Value {
    Value::Array(
        state
            .corollaries
            .iter()
            .map(|record| {
                json!({
                    "construction": "split_and_identify",
                    "involution": permutation_value(&record.involution),
                    "orientation_reversing": record.orientation_reversing,
                    "fixed_point_free": record.fixed_point_free,
                    "result_kind": record.result_kind.as_str(),
                    "boundary_components": record.boundary_components,
                    "surviving_group_order": record.surviving_group_order,
                    "full_group_survives": record.full_group_survives,
                    "from_deck_involution": record.from_deck_involution,
                })
            })
            .collect(),
    )
}

fn assemble_certificate(
    spec: &JobSpec,
    state: &PipelineState,
    status: &StageStatus,
    failure: Option<&(String, String)>,
) -> Result<Value> {
    let mut root = Map::new();
    root.insert("action".into(), action_value(spec, state));
    root.insert("extension".into(), extension_value(state));
    root.insert("realization".into(), realization_value(state));
    root.insert(
        "manifold".into(),
        match state.manifold_orientable {
            Some(orientable) => json!({
                "orientable": orientable,
                "character_kernel_order": state.manifold_kernel_order,
            }),
            None => Value::Null,
        },
    );
    let face_names = state
        .selected_extension()
        .map(|ext| ext.polyhedron().faces().to_vec());
    root.insert("boundary_census".into(), census_value(state, face_names.as_deref()));
    root.insert("corollaries".into(), corollaries_value(state));

    let mut meta = Map::new();
    meta.insert("tool".into(), Value::from("geodete"));
    meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    meta.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    meta.insert("seed".into(), Value::from(spec.options.seed));
    meta.insert(
        "enumeration_bound".into(),
        Value::from(spec.options.max_group_order as u64),
    );
    meta.insert(
        "tolerances".into(),
        json!({
            "solve": spec.options.solve_tol,
            "validation": VALIDATION_TOL,
            "orthogonality": ORTHOGONALITY_TOL,
            "eigen_zero": EIGEN_ZERO_TOL,
        }),
    );
    meta.insert(
        "stages".into(),
        json!({
            "validate": status.validate,
            "extend": status.extend,
            "realize": status.realize,
            "census": status.census,
            "corollaries": status.corollaries,
        }),
    );
    meta.insert("verified".into(), Value::from(failure.is_none()));
    meta.insert(
        "failure".into(),
        match failure {
            Some((stage, message)) => json!({"stage": stage, "message": message}),
            None => Value::Null,
        },
    );
    meta.insert(
        "corollaries_defined".into(),
        Value::from(state.corollaries_defined),
    );
    root.insert("meta".into(), Value::Object(meta));
    Ok(Value::Object(root))
}
