//! Fault injection: remove elements, propagate failures upward, enumerate
//! single points of failure and tabulate single-fault effects.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::consistency::check_accessibility;
use crate::layer::LayerId;
use crate::model::{Element, LayeredModel, LinkKey, Requirement};
use crate::paths::{failed_by_layer, Exclusions, Survival};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FaultError {
    #[error("unknown element \"{0}\"")]
    UnknownElement(String),
    #[error("unknown requirement \"{0}\"")]
    UnknownRequirement(String),
    #[error("requirement \"{0}\" is not accessible; single points of failure are undefined")]
    NotAccessible(String),
    #[error("the model has no requirements")]
    NoRequirements,
}

/// Parses `comp:ID` or `link:LAYER:A-B` against the model. A bare id is
/// taken as a component. Hyphens inside ids are resolved by trying every
/// split point against the declared links.
pub fn parse_element(model: &LayeredModel, text: &str) -> Result<Element, FaultError> {
    let unknown = || FaultError::UnknownElement(text.to_string());
    if let Some(rest) = text.strip_prefix("link:") {
        let (layer, ends) = rest.split_once(':').ok_or_else(unknown)?;
        let layer: LayerId = layer.parse().map_err(|_| unknown())?;
        return ends
            .match_indices('-')
            .map(|(i, _)| LinkKey::new(layer, &ends[..i], &ends[i + 1..]))
            .find(|k| model.has_link(k))
            .map(Element::Link)
            .ok_or_else(unknown);
    }
    let id = text.strip_prefix("comp:").unwrap_or(text);
    if model.component(id).is_some() {
        Ok(Element::Component(id.to_string()))
    } else {
        Err(unknown())
    }
}

/// Elements removed from the model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultScenario {
    pub removed_components: BTreeSet<String>,
    pub removed_links: BTreeSet<LinkKey>,
}

impl FaultScenario {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn remove(mut self, element: Element) -> Self {
        match element {
            Element::Component(id) => {
                self.removed_components.insert(id);
            }
            Element::Link(k) => {
                self.removed_links.insert(k);
            }
        }
        self
    }

    pub fn component(self, id: &str) -> Self {
        self.remove(Element::Component(id.to_string()))
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.removed_components
            .iter()
            .cloned()
            .map(Element::Component)
            .chain(self.removed_links.iter().cloned().map(Element::Link))
    }

    pub fn is_subset(&self, other: &FaultScenario) -> bool {
        self.removed_components.is_subset(&other.removed_components)
            && self.removed_links.is_subset(&other.removed_links)
    }

    fn exclusions(&self) -> Exclusions {
        Exclusions {
            components: self.removed_components.clone(),
            links: self.removed_links.clone(),
        }
    }
}

impl FromIterator<Element> for FaultScenario {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        iter.into_iter()
            .fold(FaultScenario::new(), FaultScenario::remove)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpactReport {
    pub failed_components: BTreeMap<LayerId, BTreeSet<String>>,
    pub failed_links: BTreeMap<LayerId, BTreeSet<LinkKey>>,
    /// Held before the failure, no longer hold.
    pub broken_requirements: BTreeSet<String>,
    pub intact_requirements: BTreeSet<String>,
    /// Did not hold even with nothing removed.
    pub unmet_requirements: BTreeSet<String>,
}

impl ImpactReport {
    /// Every failed element, ordered by layer then qualified id.
    pub fn failed_elements(&self) -> Vec<Element> {
        let mut out: Vec<Element> = Vec::new();
        for layer in LayerId::ALL {
            let mut here: Vec<Element> = self.failed_components[&layer]
                .iter()
                .cloned()
                .map(Element::Component)
                .chain(self.failed_links[&layer].iter().cloned().map(Element::Link))
                .collect();
            here.sort_by_key(Element::qualified_id);
            out.extend(here);
        }
        out
    }

    pub fn failed_count(&self) -> usize {
        self.failed_components
            .values()
            .map(BTreeSet::len)
            .sum::<usize>()
            + self.failed_links.values().map(BTreeSet::len).sum::<usize>()
    }

    /// Whether `self` failed no more than `other`.
    pub fn is_subset(&self, other: &ImpactReport) -> bool {
        LayerId::ALL.iter().all(|l| {
            self.failed_components[l].is_subset(&other.failed_components[l])
                && self.failed_links[l].is_subset(&other.failed_links[l])
        }) && self
            .broken_requirements
            .is_subset(&other.broken_requirements)
    }

    pub fn render_summary(&self, scenario: &FaultScenario) -> String {
        let removed: Vec<String> = scenario.elements().map(|e| e.to_string()).collect();
        let mut out = format!(
            "removed: {}\n",
            if removed.is_empty() {
                "-".to_string()
            } else {
                removed.join(" ")
            }
        );
        for layer in LayerId::TOP_DOWN {
            let comps = &self.failed_components[&layer];
            let links = &self.failed_links[&layer];
            out.push_str(&format!(
                "layer {} {}: {} components, {} links failed\n",
                layer.index(),
                layer.name(),
                comps.len(),
                links.len()
            ));
            for c in comps {
                out.push_str(&format!("  comp:{c}\n"));
            }
            for k in links {
                out.push_str(&format!("  {k}\n"));
            }
        }
        let list = |set: &BTreeSet<String>| {
            if set.is_empty() {
                "-".to_string()
            } else {
                set.iter().cloned().collect::<Vec<_>>().join(" ")
            }
        };
        out.push_str(&format!(
            "broken requirements: {}\n",
            list(&self.broken_requirements)
        ));
        out.push_str(&format!(
            "intact requirements: {}\n",
            list(&self.intact_requirements)
        ));
        if !self.unmet_requirements.is_empty() {
            out.push_str(&format!(
                "unmet requirements: {}\n",
                list(&self.unmet_requirements)
            ));
        }
        out
    }
}

fn check_scenario(model: &LayeredModel, scenario: &FaultScenario) -> Result<(), FaultError> {
    match scenario.elements().find(|e| !model.contains_element(e)) {
        Some(e) => Err(FaultError::UnknownElement(match e {
            Element::Component(id) => id,
            Element::Link(k) => k.to_string(),
        })),
        None => Ok(()),
    }
}

fn impact(baseline: &Survival<'_>, excluded: &Exclusions) -> ImpactReport {
    let model = baseline.model();
    let survival = Survival::compute(model, excluded);
    let (failed_components, failed_links) = failed_by_layer(&survival, baseline, excluded);
    let mut report = ImpactReport {
        failed_components,
        failed_links,
        broken_requirements: BTreeSet::new(),
        intact_requirements: BTreeSet::new(),
        unmet_requirements: BTreeSet::new(),
    };
    for r in model.requirements() {
        let bucket = if !baseline.holds(r) {
            &mut report.unmet_requirements
        } else if survival.holds(r) {
            &mut report.intact_requirements
        } else {
            &mut report.broken_requirements
        };
        bucket.insert(r.id.clone());
    }
    report
}

/// Least fixed point of the failure rules, evaluated layer by layer from
/// the physical layer up:
///
/// - removed elements fail;
/// - a link fails with either endpoint;
/// - a component above the physical layer fails once all of its images
///   have failed;
/// - a link above the physical layer fails when no realization over
///   surviving lower elements remains;
/// - a requirement breaks when an endpoint fails or no surviving path joins
///   its endpoints.
///
/// Only changes against the intact model are reported: links that cannot be
/// realized even with nothing removed do not count as failed, and
/// requirements that never held are listed as unmet rather than broken.
pub fn propagate_failures(
    model: &LayeredModel,
    scenario: &FaultScenario,
) -> Result<ImpactReport, FaultError> {
    check_scenario(model, scenario)?;
    let baseline = Survival::compute(model, &Exclusions::none());
    Ok(impact(&baseline, &scenario.exclusions()))
}

/// Propagation plus a readable summary.
pub fn run_scenario(
    model: &LayeredModel,
    scenario: &FaultScenario,
) -> Result<(ImpactReport, String), FaultError> {
    let report = propagate_failures(model, scenario)?;
    let summary = report.render_summary(scenario);
    Ok((report, summary))
}

fn element_order(model: &LayeredModel, e: &Element) -> (LayerId, String) {
    (
        model.element_layer(e).expect("model element"),
        e.qualified_id(),
    )
}

/// Elements whose lone removal breaks `req`: every component and link on or
/// below the requirement layer except the endpoints and the link joining
/// them directly. Sorted by layer, then qualified id.
pub fn enumerate_spofs(
    model: &LayeredModel,
    req: &Requirement,
) -> Result<Vec<Element>, FaultError> {
    if !check_accessibility(model, req).passed() {
        return Err(FaultError::NotAccessible(req.id.clone()));
    }
    Ok(spofs_unchecked(model, req))
}

/// SPOF candidates for a requirement.
pub fn spof_scope(model: &LayeredModel, req: &Requirement) -> Vec<Element> {
    let direct = req.direct_link();
    model
        .elements()
        .filter(|e| model.element_layer(e).is_some_and(|l| l <= req.layer))
        .filter(|e| match e {
            Element::Component(id) => id != &req.src && id != &req.dst,
            Element::Link(k) => Some(k) != direct.as_ref(),
        })
        .collect()
}

pub(crate) fn spofs_unchecked(model: &LayeredModel, req: &Requirement) -> Vec<Element> {
    let mut out: Vec<Element> = spof_scope(model, req)
        .into_par_iter()
        .filter(|e| {
            let excluded: Exclusions = std::iter::once(e.clone()).collect();
            !Survival::compute(model, &excluded).holds(req)
        })
        .collect();
    out.sort_by_cached_key(|e| element_order(model, e));
    out
}

/// Exact fraction of requirements broken by a failure mode. Compared as a
/// rational, so 1/3 == 2/6.
#[derive(Debug, Clone, Copy)]
pub struct Severity {
    pub broken: usize,
    pub total: usize,
}

impl Severity {
    pub fn as_f64(self) -> f64 {
        self.broken as f64 / self.total as f64
    }
}

impl PartialEq for Severity {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Severity {}

impl Ord for Severity {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.broken * other.total).cmp(&(other.broken * self.total))
    }
}

impl PartialOrd for Severity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}", self.as_f64())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmeaRow {
    pub failure_mode: Element,
    pub layer: LayerId,
    pub effects: Vec<String>,
    /// Failed elements on layers above the failure mode.
    pub collateral: usize,
    pub severity: Severity,
}

/// One row per component and link; sorted by severity descending, then
/// qualified element id.
pub fn generate_fmea(model: &LayeredModel) -> Result<Vec<FmeaRow>, FaultError> {
    let total = model.requirement_count();
    if total == 0 {
        return Err(FaultError::NoRequirements);
    }
    let elements: Vec<Element> = model.elements().collect();
    let baseline = Survival::compute(model, &Exclusions::none());
    let mut rows: Vec<FmeaRow> = elements
        .into_par_iter()
        .map(|e| {
            let layer = model.element_layer(&e).expect("model element");
            let excluded: Exclusions = std::iter::once(e.clone()).collect();
            let report = impact(&baseline, &excluded);
            let collateral = LayerId::ALL
                .iter()
                .filter(|&&l| l > layer)
                .map(|l| report.failed_components[l].len() + report.failed_links[l].len())
                .sum();
            let effects: Vec<String> = report.broken_requirements.into_iter().collect();
            FmeaRow {
                failure_mode: e,
                layer,
                severity: Severity {
                    broken: effects.len(),
                    total,
                },
                effects,
                collateral,
            }
        })
        .collect();
    rows.sort_by(|x, y| {
        y.severity.cmp(&x.severity).then_with(|| {
            x.failure_mode
                .qualified_id()
                .cmp(&y.failure_mode.qualified_id())
        })
    });
    Ok(rows)
}

pub fn render_fmea_table(rows: &[FmeaRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.failure_mode.qualified_id().len())
        .max()
        .unwrap_or(0)
        .max("failure mode".len());
    let mut out = format!(
        "{:<width$}  {:>5}  {:>8}  {:>10}  effects\n",
        "failure mode", "layer", "severity", "collateral"
    );
    for r in rows {
        let effects = if r.effects.is_empty() {
            "-".to_string()
        } else {
            r.effects.join(",")
        };
        out.push_str(&format!(
            "{:<width$}  {:>5}  {:>8}  {:>10}  {}\n",
            r.failure_mode.qualified_id(),
            r.layer.index(),
            r.severity.to_string(),
            r.collateral,
            effects
        ));
    }
    out
}

/// Tab-separated: element, layer, severity (exact fraction), collateral,
/// effects.
pub fn render_fmea_lines(rows: &[FmeaRow]) -> String {
    rows.iter()
        .map(|r| {
            format!(
                "{}\t{}\t{}/{}\t{}\t{}\n",
                r.failure_mode.qualified_id(),
                r.layer.index(),
                r.severity.broken,
                r.severity.total,
                r.collateral,
                if r.effects.is_empty() {
                    "-".to_string()
                } else {
                    r.effects.join(",")
                }
            )
        })
        .collect()
}
