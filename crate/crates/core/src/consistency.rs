//! Consistency rules: protocol compatibility, accessibility with top-down
//! realization, cardinality-based transparency, failure transparency and
//! openness.

use std::collections::BTreeSet;
use std::fmt;

use crate::faultsim;
use crate::layer::LayerId;
use crate::model::{Element, LayeredModel, LinkKey, Requirement};
use crate::paths::{shortest_path, Exclusions, RealizationTree, Survival, WitnessPath};
use crate::structure::{validate_structure, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CompatibilityCode {
    Incompatible,
    UnspecifiedProtocols,
}

impl fmt::Display for CompatibilityCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompatibilityCode::Incompatible => "Incompatible",
            CompatibilityCode::UnspecifiedProtocols => "UnspecifiedProtocols",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CompatibilityFinding {
    pub link: LinkKey,
    pub code: CompatibilityCode,
}

/// Endpoint protocol sets of every link must intersect. An empty set is
/// treated as unspecified and only warned about.
pub fn check_compatibility(model: &LayeredModel) -> Vec<CompatibilityFinding> {
    let mut out = Vec::new();
    for l in model.links() {
        let pa = &model.component(&l.key.a).expect("built model").protocols;
        let pb = &model.component(&l.key.b).expect("built model").protocols;
        let code = if pa.is_empty() || pb.is_empty() {
            Some(CompatibilityCode::UnspecifiedProtocols)
        } else if pa.is_disjoint(pb) {
            Some(CompatibilityCode::Incompatible)
        } else {
            None
        };
        if let Some(code) = code {
            out.push(CompatibilityFinding {
                link: l.key.clone(),
                code,
            });
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccessFailure {
    /// An endpoint has no surviving physical basis.
    EndpointDown(String),
    /// No path at all between the endpoints on the requirement layer.
    NoPath {
        layer: LayerId,
        src: String,
        dst: String,
    },
    /// This link has no carrying path on the layer below.
    Unrealizable(LinkKey),
}

impl fmt::Display for AccessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccessFailure::EndpointDown(id) => write!(f, "endpoint {id} has no physical basis"),
            AccessFailure::NoPath { layer, src, dst } => {
                write!(f, "no {layer} path from {src} to {dst}")
            }
            AccessFailure::Unrealizable(k) => write!(f, "{k} has no realization one layer down"),
        }
    }
}

/// Outcome of an accessibility check, with per-layer witnesses for the
/// checklist. On failure the witnesses describe the best partial
/// realization; layers from the failing one down are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessibilityResult {
    pub requirement: String,
    pub evidence: Option<RealizationTree>,
    pub failure: Option<AccessFailure>,
    pub layers: Vec<(LayerId, Option<Vec<String>>)>,
}

impl AccessibilityResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Lexicographically first image pair joined on the layer below, ignoring
/// whether that path is itself realizable.
fn raw_lower_path(
    model: &LayeredModel,
    layer: LayerId,
    from: &str,
    to: &str,
) -> Option<WitnessPath> {
    let below = layer.below()?;
    for x in model.adjacent_images(from) {
        for y in model.adjacent_images(to) {
            if let Some(vertices) = shortest_path(model, below, x, y, |_| true, |_| true) {
                return Some(WitnessPath {
                    layer: below,
                    vertices,
                });
            }
        }
    }
    None
}

fn collapse(paths: &[WitnessPath]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    paths
        .iter()
        .flat_map(|p| p.vertices.iter())
        .filter(|v| seen.insert(v.as_str()))
        .cloned()
        .collect()
}

/// A requirement is accessible when its endpoints are joined on their layer
/// by a path whose every link realizes down to the physical layer.
pub fn check_accessibility(model: &LayeredModel, req: &Requirement) -> AccessibilityResult {
    let survival = Survival::compute(model, &Exclusions::none());
    accessibility_with(&survival, req)
}

pub(crate) fn accessibility_with(
    survival: &Survival<'_>,
    req: &Requirement,
) -> AccessibilityResult {
    let model = survival.model();
    let layers_below: Vec<LayerId> = LayerId::TOP_DOWN
        .into_iter()
        .filter(|&l| l <= req.layer)
        .collect();

    if let Some(path) = survival.path(req.layer, &req.src, &req.dst) {
        let tree = survival.tree(path);
        let mut layers: Vec<(LayerId, Option<Vec<String>>)> = tree
            .layer_paths()
            .into_iter()
            .map(|(l, v)| (l, Some(v)))
            .collect();
        // a link-free witness has nothing to realize further down
        for &l in &layers_below[layers.len()..] {
            layers.push((l, Some(Vec::new())));
        }
        return AccessibilityResult {
            requirement: req.id.clone(),
            evidence: Some(tree),
            failure: None,
            layers,
        };
    }

    // Failed: walk the raw (unrealized) paths to find the first link that
    // cannot be carried, keeping the witnesses above it.
    let mut layers: Vec<(LayerId, Option<Vec<String>>)> =
        layers_below.iter().map(|&l| (l, None)).collect();
    let fail = |layers: Vec<(LayerId, Option<Vec<String>>)>, failure| AccessibilityResult {
        requirement: req.id.clone(),
        evidence: None,
        failure: Some(failure),
        layers,
    };

    let Some(top) = shortest_path(model, req.layer, &req.src, &req.dst, |_| true, |_| true) else {
        return fail(
            layers,
            AccessFailure::NoPath {
                layer: req.layer,
                src: req.src.clone(),
                dst: req.dst.clone(),
            },
        );
    };
    let mut current = vec![WitnessPath {
        layer: req.layer,
        vertices: top,
    }];
    for i in 0..layers.len() {
        layers[i].1 = Some(collapse(&current));
        if layers[i].0 == LayerId::Physical {
            break;
        }
        let mut next = Vec::new();
        for path in &current {
            for (u, v) in path.steps() {
                let lower = survival
                    .carrier(path.layer, u, v)
                    .or_else(|| raw_lower_path(model, path.layer, u, v));
                match lower {
                    Some(p) => next.push(p),
                    None => {
                        let key = LinkKey::new(path.layer, u, v);
                        return fail(layers, AccessFailure::Unrealizable(key));
                    }
                }
            }
        }
        current = next;
    }

    // every link on the raw descent has a carrier, so an endpoint itself
    // lacks a physical basis
    let dead = [&req.src, &req.dst]
        .into_iter()
        .find(|id| !survival.is_alive(id))
        .cloned()
        .unwrap_or_else(|| req.src.clone());
    for slot in layers.iter_mut().skip(1) {
        slot.1 = None;
    }
    fail(layers, AccessFailure::EndpointDown(dead))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardinalityAttribute {
    Replicas,
    Locations,
}

impl fmt::Display for CardinalityAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CardinalityAttribute::Replicas => "min_replicas",
            CardinalityAttribute::Locations => "min_locations",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityCheck {
    pub attribute: CardinalityAttribute,
    pub required: usize,
    pub actual: usize,
}

impl CardinalityCheck {
    pub fn passed(&self) -> bool {
        self.actual >= self.required
    }
}

/// Replica and location minima counted over the physical images of the
/// requirement's destination. Untagged hosts each count as their own
/// location. No attributes means nothing to check.
pub fn check_cardinality_transparency(
    model: &LayeredModel,
    req: &Requirement,
) -> Vec<CardinalityCheck> {
    let images = model.physical_images(&req.dst);
    let mut out = Vec::new();
    if let Some(k) = req.min_replicas {
        out.push(CardinalityCheck {
            attribute: CardinalityAttribute::Replicas,
            required: k.get(),
            actual: images.len(),
        });
    }
    if let Some(k) = req.min_locations {
        let locations: BTreeSet<(bool, &str)> = images
            .iter()
            .map(|id| match &model.component(id).expect("image").location {
                Some(tag) => (true, tag.as_str()),
                None => (false, id.as_str()),
            })
            .collect();
        out.push(CardinalityCheck {
            attribute: CardinalityAttribute::Locations,
            required: k.get(),
            actual: locations.len(),
        });
    }
    out
}

/// Components that declare no standards, sorted by id.
pub fn check_openness(model: &LayeredModel) -> Vec<String> {
    model
        .components()
        .filter(|c| c.standards.is_empty())
        .map(|c| c.id.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    ConsistentWithWarnings,
    Inconsistent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::ConsistentWithWarnings => "consistent-with-warnings",
            Verdict::Inconsistent => "inconsistent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementResult {
    pub accessibility: AccessibilityResult,
    pub cardinality: Vec<CardinalityCheck>,
    /// `None` when the requirement is not accessible.
    pub spofs: Option<Vec<Element>>,
}

impl RequirementResult {
    pub fn id(&self) -> &str {
        &self.accessibility.requirement
    }

    pub fn failed(&self) -> bool {
        !self.accessibility.passed()
            || self.cardinality.iter().any(|c| !c.passed())
            || self.spofs.as_ref().is_some_and(|s| !s.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub model: String,
    pub structure: ValidationReport,
    pub compatibility: Vec<CompatibilityFinding>,
    pub requirements: Vec<RequirementResult>,
    pub openness: Vec<String>,
    pub verdict: Verdict,
}

impl ConsistencyReport {
    pub fn failure_transparency(&self) -> bool {
        self.requirements
            .iter()
            .all(|r| r.spofs.as_ref().is_none_or(|s| s.is_empty()))
    }

    /// Key-value report, deterministic order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| out.push_str(&format!("{k}: {v}\n"));
        kv("model", &self.model);
        kv("verdict", &self.verdict);
        kv("structure.violations", &self.structure.violations.len());
        for f in &self.structure.violations {
            kv("structure.violation", f);
        }
        kv("structure.warnings", &self.structure.warnings.len());
        for f in &self.structure.warnings {
            kv("structure.warning", f);
        }
        if !self.structure.is_valid() {
            return out;
        }
        let incompatible = self
            .compatibility
            .iter()
            .filter(|f| f.code == CompatibilityCode::Incompatible)
            .count();
        kv("compatibility.incompatible", &incompatible);
        kv(
            "compatibility.unspecified",
            &(self.compatibility.len() - incompatible),
        );
        for f in &self.compatibility {
            kv("compatibility.finding", &format!("{} {}", f.code, f.link));
        }
        for r in &self.requirements {
            let id = r.id();
            let acc = &r.accessibility;
            kv(
                &format!("requirement.{id}.accessibility"),
                &if acc.passed() { "pass" } else { "fail" },
            );
            if let Some(f) = &acc.failure {
                kv(&format!("requirement.{id}.failure"), f);
            }
            for (layer, w) in &acc.layers {
                let text = match w {
                    Some(v) if v.is_empty() => "-".to_string(),
                    Some(v) => v.join(","),
                    None => "unsatisfiable".to_string(),
                };
                kv(
                    &format!("requirement.{id}.witness.L{}", layer.index()),
                    &text,
                );
            }
            for c in &r.cardinality {
                kv(
                    &format!("requirement.{id}.{}", c.attribute),
                    &format!(
                        "{} ({} required, {} found)",
                        if c.passed() { "pass" } else { "fail" },
                        c.required,
                        c.actual
                    ),
                );
            }
            match &r.spofs {
                None => kv(&format!("requirement.{id}.spofs"), &"n/a"),
                Some(list) => {
                    kv(&format!("requirement.{id}.spofs"), &list.len());
                    for e in list {
                        kv(&format!("requirement.{id}.spof"), e);
                    }
                }
            }
        }
        kv(
            "failure_transparency",
            &if self.failure_transparency() {
                "pass"
            } else {
                "fail"
            },
        );
        kv("openness.flagged", &self.openness.len());
        for id in &self.openness {
            kv("openness.flag", id);
        }
        out
    }

    /// Tab-separated rows: section, subject, status, detail.
    pub fn render_tsv(&self) -> String {
        let mut out = String::from("section\tsubject\tstatus\tdetail\n");
        let mut row = |a: &str, b: &str, c: &str, d: &str| {
            out.push_str(&format!("{a}\t{b}\t{c}\t{d}\n"));
        };
        row("verdict", &self.model, &self.verdict.to_string(), "-");
        for f in &self.structure.violations {
            row("structure", &f.subject, "violation", f.code.as_str());
        }
        for f in &self.structure.warnings {
            row("structure", &f.subject, "warning", f.code.as_str());
        }
        for f in &self.compatibility {
            let status = match f.code {
                CompatibilityCode::Incompatible => "fail",
                CompatibilityCode::UnspecifiedProtocols => "warning",
            };
            row(
                "compatibility",
                &f.link.to_string(),
                status,
                &f.code.to_string(),
            );
        }
        for r in &self.requirements {
            let acc = &r.accessibility;
            let detail = acc
                .failure
                .as_ref()
                .map_or("-".to_string(), |f| f.to_string());
            row(
                "accessibility",
                r.id(),
                if acc.passed() { "pass" } else { "fail" },
                &detail,
            );
            for c in &r.cardinality {
                row(
                    "cardinality",
                    r.id(),
                    if c.passed() { "pass" } else { "fail" },
                    &format!("{} {}/{}", c.attribute, c.actual, c.required),
                );
            }
            if let Some(list) = &r.spofs {
                let detail = if list.is_empty() {
                    "-".to_string()
                } else {
                    list.iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                row(
                    "failure_transparency",
                    r.id(),
                    if list.is_empty() { "pass" } else { "fail" },
                    &detail,
                );
            }
        }
        for id in &self.openness {
            row("openness", id, "warning", "no standards declared");
        }
        out
    }
}

/// Full consistency verdict. Structural violations (strict mode) short-cut
/// the semantic checks.
pub fn consistency_check(model: &LayeredModel) -> ConsistencyReport {
    let structure = validate_structure(model, true);
    if !structure.is_valid() {
        return ConsistencyReport {
            model: model.name().to_string(),
            structure,
            compatibility: Vec::new(),
            requirements: Vec::new(),
            openness: Vec::new(),
            verdict: Verdict::Inconsistent,
        };
    }

    let compatibility = check_compatibility(model);
    let survival = Survival::compute(model, &Exclusions::none());
    let requirements: Vec<RequirementResult> = model
        .requirements()
        .map(|req| {
            let accessibility = accessibility_with(&survival, req);
            let spofs = accessibility
                .passed()
                .then(|| faultsim::spofs_unchecked(model, req));
            RequirementResult {
                accessibility,
                cardinality: check_cardinality_transparency(model, req),
                spofs,
            }
        })
        .collect();
    let openness = check_openness(model);

    let failed = compatibility
        .iter()
        .any(|f| f.code == CompatibilityCode::Incompatible)
        || requirements.iter().any(RequirementResult::failed);
    let warned =
        !structure.warnings.is_empty() || !compatibility.is_empty() || !openness.is_empty();
    let verdict = if failed {
        Verdict::Inconsistent
    } else if warned {
        Verdict::ConsistentWithWarnings
    } else {
        Verdict::Consistent
    };

    ConsistencyReport {
        model: model.name().to_string(),
        structure,
        compatibility,
        requirements,
        openness,
        verdict,
    }
}
