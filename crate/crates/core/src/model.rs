//! The layered graph: components (vertices) on four layers, undirected
//! intra-layer links, and directed top-down projections between adjacent
//! layers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::num::NonZeroUsize;

use crate::layer::LayerId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate id \"{0}\"")]
    DuplicateId(String),
    #[error("{kind} references undeclared component \"{id}\"")]
    DanglingReference { kind: RefKind, id: String },
    #[error("link joins \"{0}\" to itself")]
    SelfLink(String),
    #[error("duplicate link {0}")]
    DuplicateLink(LinkKey),
    #[error("duplicate projection {upper} -> {lower}")]
    DuplicateProjection { upper: String, lower: String },
    #[error("{kind} endpoint \"{id}\" is on the {actual} layer, expected {expected}")]
    LayerMismatch {
        kind: RefKind,
        id: String,
        expected: LayerId,
        actual: LayerId,
    },
    #[error("unknown component \"{0}\"")]
    UnknownComponent(String),
    #[error("component \"{id}\" is not on the {layer} layer")]
    WrongLayer { id: String, layer: LayerId },
    #[error("{0} is not a link of the model")]
    NotALink(LinkKey),
    #[error("component \"{0}\" has no projection")]
    NoProjection(String),
}

/// What kind of directive holds a reference, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefKind {
    Link,
    Projection,
    Requirement,
}

impl fmt::Display for RefKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RefKind::Link => "link",
            RefKind::Projection => "projection",
            RefKind::Requirement => "requirement",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: String,
    pub layer: LayerId,
    pub protocols: BTreeSet<String>,
    pub standards: BTreeSet<String>,
    /// Site tag used by the location-transparency check.
    pub location: Option<String>,
    pub description: Option<String>,
}

impl Component {
    pub fn new(id: impl Into<String>, layer: LayerId) -> Self {
        Component {
            id: id.into(),
            layer,
            protocols: BTreeSet::new(),
            standards: BTreeSet::new(),
            location: None,
            description: None,
        }
    }

    pub fn with_protocols<I, S>(mut self, protocols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.protocols = protocols.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_standards<I, S>(mut self, standards: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.standards = standards.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_location(mut self, location: impl Into<String>) -> Self {
        self.location = Some(location.into());
        self
    }
}

/// Identity of an undirected link: endpoints are stored with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkKey {
    pub layer: LayerId,
    pub a: String,
    pub b: String,
}

impl LinkKey {
    pub fn new(layer: LayerId, x: impl Into<String>, y: impl Into<String>) -> Self {
        let (x, y) = (x.into(), y.into());
        if x <= y {
            LinkKey { layer, a: x, b: y }
        } else {
            LinkKey { layer, a: y, b: x }
        }
    }

    pub fn touches(&self, id: &str) -> bool {
        self.a == id || self.b == id
    }
}

impl fmt::Display for LinkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "link:{}:{}-{}", self.layer.index(), self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub key: LinkKey,
    pub protocols: BTreeSet<String>,
}

impl Link {
    pub fn new(layer: LayerId, x: impl Into<String>, y: impl Into<String>) -> Self {
        Link {
            key: LinkKey::new(layer, x, y),
            protocols: BTreeSet::new(),
        }
    }
}

/// Top-down mapping of `upper` onto the component `lower` that hosts or
/// implements it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Projection {
    pub upper: String,
    pub lower: String,
}

impl Projection {
    pub fn new(upper: impl Into<String>, lower: impl Into<String>) -> Self {
        Projection {
            upper: upper.into(),
            lower: lower.into(),
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.upper, self.lower)
    }
}

/// An end-user demand that `src` and `dst` can communicate on `layer`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub layer: LayerId,
    pub min_replicas: Option<NonZeroUsize>,
    pub min_locations: Option<NonZeroUsize>,
}

impl Requirement {
    pub fn new(id: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        Requirement {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            layer: LayerId::Functional,
            min_replicas: None,
            min_locations: None,
        }
    }

    pub fn on_layer(mut self, layer: LayerId) -> Self {
        self.layer = layer;
        self
    }

    /// The link joining the two endpoints directly, if they differ.
    pub fn direct_link(&self) -> Option<LinkKey> {
        (self.src != self.dst).then(|| LinkKey::new(self.layer, &self.src, &self.dst))
    }
}

/// A failure-able element of the model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Component(String),
    Link(LinkKey),
}

impl Element {
    /// `comp:<id>` or `link:<layer>:<a>-<b>`.
    pub fn qualified_id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Component(id) => write!(f, "comp:{id}"),
            Element::Link(key) => key.fmt(f),
        }
    }
}

/// The whole multi-layer graph. Immutable once built; every reference
/// resolves to a declared component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredModel {
    name: String,
    components: BTreeMap<String, Component>,
    links: BTreeMap<LinkKey, Link>,
    projections: BTreeSet<Projection>,
    requirements: BTreeMap<String, Requirement>,
    neighbors: BTreeMap<String, BTreeSet<String>>,
    images: BTreeMap<String, BTreeSet<String>>,
    preimages: BTreeMap<String, BTreeSet<String>>,
}

/// Builds a model, enforcing id uniqueness and referential integrity.
/// Layer adjacency of projections is left to `validate_structure`.
pub fn build_model(
    name: impl Into<String>,
    components: Vec<Component>,
    links: Vec<Link>,
    projections: Vec<Projection>,
    requirements: Vec<Requirement>,
) -> Result<LayeredModel, ModelError> {
    let mut comp_map = BTreeMap::new();
    for c in components {
        if comp_map.contains_key(&c.id) {
            return Err(ModelError::DuplicateId(c.id));
        }
        comp_map.insert(c.id.clone(), c);
    }

    let layer_of = |kind: RefKind, id: &str| {
        comp_map
            .get(id)
            .map(|c: &Component| c.layer)
            .ok_or_else(|| ModelError::DanglingReference {
                kind,
                id: id.to_string(),
            })
    };

    let mut link_map = BTreeMap::new();
    for link in links {
        let key = &link.key;
        if key.a == key.b {
            return Err(ModelError::SelfLink(key.a.clone()));
        }
        for id in [&key.a, &key.b] {
            let actual = layer_of(RefKind::Link, id)?;
            if actual != key.layer {
                return Err(ModelError::LayerMismatch {
                    kind: RefKind::Link,
                    id: id.clone(),
                    expected: key.layer,
                    actual,
                });
            }
        }
        if link_map.contains_key(key) {
            return Err(ModelError::DuplicateLink(key.clone()));
        }
        link_map.insert(key.clone(), link);
    }

    let mut proj_set = BTreeSet::new();
    for p in projections {
        layer_of(RefKind::Projection, &p.upper)?;
        layer_of(RefKind::Projection, &p.lower)?;
        if proj_set.contains(&p) {
            return Err(ModelError::DuplicateProjection {
                upper: p.upper,
                lower: p.lower,
            });
        }
        proj_set.insert(p);
    }

    let mut req_map = BTreeMap::new();
    for r in requirements {
        if req_map.contains_key(&r.id) {
            return Err(ModelError::DuplicateId(r.id));
        }
        for id in [&r.src, &r.dst] {
            let actual = layer_of(RefKind::Requirement, id)?;
            if actual != r.layer {
                return Err(ModelError::LayerMismatch {
                    kind: RefKind::Requirement,
                    id: id.clone(),
                    expected: r.layer,
                    actual,
                });
            }
        }
        req_map.insert(r.id.clone(), r);
    }

    Ok(LayeredModel::assemble(
        name.into(),
        comp_map,
        link_map,
        proj_set,
        req_map,
    ))
}

impl LayeredModel {
    fn assemble(
        name: String,
        components: BTreeMap<String, Component>,
        links: BTreeMap<LinkKey, Link>,
        projections: BTreeSet<Projection>,
        requirements: BTreeMap<String, Requirement>,
    ) -> Self {
        let mut neighbors: BTreeMap<String, BTreeSet<String>> = components
            .keys()
            .map(|id| (id.clone(), BTreeSet::new()))
            .collect();
        for key in links.keys() {
            neighbors.get_mut(&key.a).unwrap().insert(key.b.clone());
            neighbors.get_mut(&key.b).unwrap().insert(key.a.clone());
        }
        let mut images: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut preimages: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for p in &projections {
            images
                .entry(p.upper.clone())
                .or_default()
                .insert(p.lower.clone());
            preimages
                .entry(p.lower.clone())
                .or_default()
                .insert(p.upper.clone());
        }
        LayeredModel {
            name,
            components,
            links,
            projections,
            requirements,
            neighbors,
            images,
            preimages,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.get(id)
    }

    pub fn layer_of(&self, id: &str) -> Option<LayerId> {
        self.components.get(id).map(|c| c.layer)
    }

    /// All components, ordered by id.
    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn components_on(&self, layer: LayerId) -> impl Iterator<Item = &Component> {
        self.components.values().filter(move |c| c.layer == layer)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.values()
    }

    pub fn links_on(&self, layer: LayerId) -> impl Iterator<Item = &Link> {
        self.links.values().filter(move |l| l.key.layer == layer)
    }

    pub fn link(&self, key: &LinkKey) -> Option<&Link> {
        self.links.get(key)
    }

    pub fn has_link(&self, key: &LinkKey) -> bool {
        self.links.contains_key(key)
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn projections(&self) -> impl Iterator<Item = &Projection> {
        self.projections.iter()
    }

    pub fn projection_count(&self) -> usize {
        self.projections.len()
    }

    pub fn requirements(&self) -> impl Iterator<Item = &Requirement> {
        self.requirements.values()
    }

    pub fn requirement(&self, id: &str) -> Option<&Requirement> {
        self.requirements.get(id)
    }

    pub fn requirement_count(&self) -> usize {
        self.requirements.len()
    }

    /// Intra-layer neighbours of `id`, sorted.
    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &str> {
        self.neighbors
            .get(id)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    /// Every projection target of `id`, whatever its layer.
    pub fn images(&self, id: &str) -> impl Iterator<Item = &str> {
        self.images
            .get(id)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    /// Projection targets of `id` on the layer directly below it. Only these
    /// carry realizations and failure propagation.
    pub fn adjacent_images<'a>(&'a self, id: &str) -> impl Iterator<Item = &'a str> + 'a {
        let below = self.layer_of(id).and_then(LayerId::below);
        let images = self.images.get(id);
        images
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
            .filter(move |img| below.is_some() && self.layer_of(img) == below)
    }

    /// Components projecting onto `id`.
    pub fn preimages(&self, id: &str) -> impl Iterator<Item = &str> {
        self.preimages
            .get(id)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn out_degree(&self, id: &str) -> usize {
        self.images.get(id).map_or(0, BTreeSet::len)
    }

    pub fn in_degree(&self, id: &str) -> usize {
        self.preimages.get(id).map_or(0, BTreeSet::len)
    }

    /// Physical components reachable from `id` through adjacent projections.
    /// A physical component is its own image.
    pub fn physical_images(&self, id: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut frontier: BTreeSet<&str> = BTreeSet::from([id]);
        while !frontier.is_empty() {
            let mut next = BTreeSet::new();
            for c in frontier {
                match self.layer_of(c) {
                    Some(LayerId::Physical) => {
                        out.insert(c.to_string());
                    }
                    Some(_) => next.extend(self.adjacent_images(c)),
                    None => {}
                }
            }
            frontier = next;
        }
        out
    }

    pub fn contains_element(&self, element: &Element) -> bool {
        match element {
            Element::Component(id) => self.components.contains_key(id),
            Element::Link(key) => self.links.contains_key(key),
        }
    }

    /// Every component and link, as failure-able elements.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.components
            .keys()
            .map(|id| Element::Component(id.clone()))
            .chain(self.links.keys().map(|k| Element::Link(k.clone())))
    }

    pub fn element_layer(&self, element: &Element) -> Option<LayerId> {
        match element {
            Element::Component(id) => self.layer_of(id),
            Element::Link(key) => self.has_link(key).then_some(key.layer),
        }
    }

    /// Components and links of one layer with its downward projections and
    /// the components of the layer below.
    pub fn layer_subgraph(&self, layer: LayerId) -> LayerView {
        let components = self
            .components_on(layer)
            .map(|c| (c.id.clone(), c.clone()))
            .collect();
        let links = self
            .links_on(layer)
            .map(|l| (l.key.clone(), l.clone()))
            .collect();
        let (projections, lower_components) = match layer.below() {
            None => (BTreeSet::new(), BTreeMap::new()),
            Some(below) => (
                self.projections
                    .iter()
                    .filter(|p| self.layer_of(&p.upper) == Some(layer))
                    .cloned()
                    .collect(),
                self.components_on(below)
                    .map(|c| (c.id.clone(), c.clone()))
                    .collect(),
            ),
        };
        LayerView {
            layer,
            components,
            links,
            projections,
            lower_components,
        }
    }

    /// Rebuilds a model as the union of its layer views.
    pub fn from_layer_views(
        name: impl Into<String>,
        views: &[LayerView],
        requirements: Vec<Requirement>,
    ) -> Result<LayeredModel, ModelError> {
        let mut components = BTreeMap::new();
        let mut links = Vec::new();
        let mut projections = BTreeSet::new();
        for v in views {
            for c in v.components.values().chain(v.lower_components.values()) {
                components.insert(c.id.clone(), c.clone());
            }
            links.extend(v.links.values().cloned());
            projections.extend(v.projections.iter().cloned());
        }
        build_model(
            name,
            components.into_values().collect(),
            links,
            projections.into_iter().collect(),
            requirements,
        )
    }

    /// Table-style cardinalities, layers 4 down to 1.
    pub fn cardinality_report(&self) -> Vec<CardinalityRow> {
        LayerId::TOP_DOWN
            .iter()
            .map(|&layer| {
                let view = self.layer_subgraph(layer);
                let has_lower = layer.below().is_some();
                CardinalityRow {
                    layer,
                    components: view.components.len(),
                    links: view.links.len(),
                    projections: has_lower.then_some(view.projections.len()),
                    lower_components: has_lower.then_some(view.lower_components.len()),
                }
            })
            .collect()
    }

    /// Copy of this model with an edited part list; used for fixtures and
    /// mutation tests.
    pub fn to_parts(&self) -> ModelParts {
        ModelParts {
            name: self.name.clone(),
            components: self.components.values().cloned().collect(),
            links: self.links.values().cloned().collect(),
            projections: self.projections.iter().cloned().collect(),
            requirements: self.requirements.values().cloned().collect(),
        }
    }
}

/// Unvalidated inputs of `build_model`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelParts {
    pub name: String,
    pub components: Vec<Component>,
    pub links: Vec<Link>,
    pub projections: Vec<Projection>,
    pub requirements: Vec<Requirement>,
}

impl ModelParts {
    pub fn build(self) -> Result<LayeredModel, ModelError> {
        build_model(
            self.name,
            self.components,
            self.links,
            self.projections,
            self.requirements,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerView {
    pub layer: LayerId,
    pub components: BTreeMap<String, Component>,
    pub links: BTreeMap<LinkKey, Link>,
    /// Projections whose upper end lies on this layer.
    pub projections: BTreeSet<Projection>,
    /// Every component of the layer below; empty for the physical layer.
    pub lower_components: BTreeMap<String, Component>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardinalityRow {
    pub layer: LayerId,
    pub components: usize,
    pub links: usize,
    pub projections: Option<usize>,
    pub lower_components: Option<usize>,
}

impl CardinalityRow {
    pub fn as_tuple(&self) -> (u8, usize, usize, Option<usize>, Option<usize>) {
        (
            self.layer.index(),
            self.components,
            self.links,
            self.projections,
            self.lower_components,
        )
    }
}

pub fn render_cardinality_table(rows: &[CardinalityRow]) -> String {
    let fmt_opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |n| n.to_string());
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>2} {:>10} {:>6} {:>11} {:>16}\n",
        "layer", "n", "components", "links", "projections", "lower components"
    ));
    for r in rows {
        let mut name = r.layer.name().to_string();
        name[..1].make_ascii_uppercase();
        out.push_str(&format!(
            "{:<12} {:>2} {:>10} {:>6} {:>11} {:>16}\n",
            name,
            r.layer.index(),
            r.components,
            r.links,
            fmt_opt(r.projections),
            fmt_opt(r.lower_components),
        ));
    }
    out
}
