//! Structural rules of the layered model and projection arity.

use std::fmt;

use crate::layer::LayerId;
use crate::model::{LayeredModel, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FindingCode {
    EmptyLayer,
    EmptyLinkSet,
    IsolatedLowerComponent,
    MissingProjection,
    NonAdjacentProjection,
    PhysicalProjection,
}

impl FindingCode {
    pub fn as_str(self) -> &'static str {
        match self {
            FindingCode::EmptyLayer => "EmptyLayer",
            FindingCode::EmptyLinkSet => "EmptyLinkSet",
            FindingCode::IsolatedLowerComponent => "IsolatedLowerComponent",
            FindingCode::MissingProjection => "MissingProjection",
            FindingCode::NonAdjacentProjection => "NonAdjacentProjection",
            FindingCode::PhysicalProjection => "PhysicalProjection",
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub code: FindingCode,
    pub subject: String,
    pub message: String,
}

impl Finding {
    fn new(code: FindingCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            code,
            subject: subject.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.code, self.subject, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<FindingCode> {
        self.violations.iter().map(|f| f.code).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("violations: {}\n", self.violations.len()));
        for f in &self.violations {
            out.push_str(&format!("violation {f}\n"));
        }
        out.push_str(&format!("warnings: {}\n", self.warnings.len()));
        for f in &self.warnings {
            out.push_str(&format!("warning {f}\n"));
        }
        out
    }
}

fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(|x, y| {
        (x.code.as_str(), &x.subject, &x.message).cmp(&(y.code.as_str(), &y.subject, &y.message))
    });
}

/// Checks the structural rules. In lenient mode the non-emptiness rules are
/// reported as warnings instead of violations.
pub fn validate_structure(model: &LayeredModel, strict: bool) -> ValidationReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let mut emptiness = Vec::new();
    for layer in LayerId::ALL {
        if model.components_on(layer).next().is_none() {
            emptiness.push(Finding::new(
                FindingCode::EmptyLayer,
                layer.name(),
                format!("no components on the {layer} layer"),
            ));
        }
    }
    if model.link_count() == 0 {
        emptiness.push(Finding::new(
            FindingCode::EmptyLinkSet,
            "model",
            "the model declares no links",
        ));
    }
    if strict {
        violations.extend(emptiness);
    } else {
        warnings.extend(emptiness);
    }

    for c in model.components() {
        if c.layer != LayerId::Physical && model.out_degree(&c.id) == 0 {
            violations.push(Finding::new(
                FindingCode::MissingProjection,
                c.id.clone(),
                format!("{} component has no top-down projection", c.layer),
            ));
        }
    }

    for p in model.projections() {
        let upper = model.layer_of(&p.upper).expect("built model");
        let lower = model.layer_of(&p.lower).expect("built model");
        if upper == LayerId::Physical {
            violations.push(Finding::new(
                FindingCode::PhysicalProjection,
                p.to_string(),
                "projections cannot leave the physical layer",
            ));
        } else if upper.below() != Some(lower) {
            violations.push(Finding::new(
                FindingCode::NonAdjacentProjection,
                p.to_string(),
                format!("projection from the {upper} layer lands on the {lower} layer"),
            ));
        }
    }

    for layer in [LayerId::Physical, LayerId::Logical, LayerId::Service] {
        let above = layer.above().expect("not the top layer");
        for c in model.components_on(layer) {
            let mapped = model
                .preimages(&c.id)
                .any(|up| model.layer_of(up) == Some(above));
            if !mapped {
                warnings.push(Finding::new(
                    FindingCode::IsolatedLowerComponent,
                    c.id.clone(),
                    format!("no {above} component projects onto it"),
                ));
            }
        }
    }

    sort_findings(&mut violations);
    sort_findings(&mut warnings);
    ValidationReport {
        violations,
        warnings,
    }
}

/// Multiplicity pattern of a component's top-down projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArityClass {
    /// N:1, several upper components share one image.
    Virtualized,
    /// 1:N, one component spread over several exclusive images.
    Clustered,
    /// 1:1.
    Dedicated,
    /// 1:N where some image is shared with other components.
    Hybrid,
}

impl fmt::Display for ArityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArityClass::Virtualized => "virtualized",
            ArityClass::Clustered => "clustered",
            ArityClass::Dedicated => "dedicated",
            ArityClass::Hybrid => "hybrid",
        })
    }
}

pub fn classify_projection_arity(
    model: &LayeredModel,
    upper: &str,
) -> Result<ArityClass, ModelError> {
    if model.component(upper).is_none() {
        return Err(ModelError::UnknownComponent(upper.to_string()));
    }
    let images: Vec<&str> = model.images(upper).collect();
    let shared = |img: &str| model.in_degree(img) > 1;
    match images.as_slice() {
        [] => Err(ModelError::NoProjection(upper.to_string())),
        [only] if shared(only) => Ok(ArityClass::Virtualized),
        [_] => Ok(ArityClass::Dedicated),
        many if many.iter().all(|img| !shared(img)) => Ok(ArityClass::Clustered),
        _ => Ok(ArityClass::Hybrid),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Component, Projection};

    #[test]
    fn demo_strict_is_valid() {
        let report = validate_structure(&fixtures::demo(), true);
        assert!(report.violations.is_empty(), "{report:?}");
        // net1 carries no service component
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].code, FindingCode::IsolatedLowerComponent);
        assert_eq!(report.warnings[0].subject, "net1");
    }

    #[test]
    fn dropping_a_projection_is_reported() {
        let mut parts = fixtures::demo().to_parts();
        parts
            .projections
            .retain(|p| p != &Projection::new("cli", "vm1"));
        let report = validate_structure(&parts.build().unwrap(), true);
        assert_eq!(report.codes(), [FindingCode::MissingProjection]);
        assert_eq!(report.violations[0].subject, "cli");
    }

    #[test]
    fn layer_skipping_projection_is_reported() {
        let mut parts = fixtures::demo().to_parts();
        parts
            .projections
            .push(Projection::new("user_portal", "vm1"));
        let report = validate_structure(&parts.build().unwrap(), true);
        assert_eq!(report.codes(), [FindingCode::NonAdjacentProjection]);
        assert_eq!(report.violations[0].subject, "user_portal->vm1");
    }

    #[test]
    fn physical_projection_is_reported() {
        let mut parts = fixtures::demo().to_parts();
        parts.projections.push(Projection::new("h1", "sw1"));
        let report = validate_structure(&parts.build().unwrap(), true);
        assert_eq!(report.codes(), [FindingCode::PhysicalProjection]);
    }

    #[test]
    fn emptiness_only_strict() {
        let m = crate::model::build_model("e", vec![], vec![], vec![], vec![]).unwrap();
        let strict = validate_structure(&m, true);
        assert_eq!(
            strict.codes(),
            [
                FindingCode::EmptyLayer,
                FindingCode::EmptyLayer,
                FindingCode::EmptyLayer,
                FindingCode::EmptyLayer,
                FindingCode::EmptyLinkSet
            ]
        );
        let lenient = validate_structure(&m, false);
        assert!(lenient.is_valid());
        assert_eq!(lenient.warnings.len(), 5);
    }

    #[test]
    fn arity_classes() {
        // vm1 and vm3 share h1; srv is spread over vm2 and vm4 exclusively.
        let mut parts = fixtures::demo().to_parts();
        parts
            .components
            .push(Component::new("vm3", LayerId::Logical));
        parts.projections.push(Projection::new("vm3", "h1"));
        let m = parts.build().unwrap();
        assert_eq!(
            classify_projection_arity(&m, "vm1"),
            Ok(ArityClass::Virtualized)
        );
        assert_eq!(
            classify_projection_arity(&m, "net1"),
            Ok(ArityClass::Dedicated)
        );

        let m = fixtures::clustered();
        assert_eq!(
            classify_projection_arity(&m, "srv"),
            Ok(ArityClass::Clustered)
        );
        assert_eq!(
            classify_projection_arity(&m, "h1"),
            Err(ModelError::NoProjection("h1".into()))
        );
    }

    #[test]
    fn hybrid_when_a_cluster_member_is_shared() {
        let mut parts = fixtures::demo().to_parts();
        parts.projections.push(Projection::new("vm1", "h2"));
        let m = parts.build().unwrap();
        // vm1 -> {h1, h2}; h2 also hosts vm2
        assert_eq!(classify_projection_arity(&m, "vm1"), Ok(ArityClass::Hybrid));
    }
}
