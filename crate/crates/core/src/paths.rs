//! Intra-layer paths and top-down realizations.
//!
//! A link on layer n > 1 is realized by a path on layer n-1 between some
//! pair of images of its endpoints, every link of which is itself realized,
//! recursively down to the physical layer. Which elements can still carry
//! traffic under a set of exclusions is computed bottom-up by [`Survival`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::layer::LayerId;
use crate::model::{Element, LayeredModel, LinkKey, ModelError, Requirement};

/// Elements treated as unusable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Exclusions {
    pub components: BTreeSet<String>,
    pub links: BTreeSet<LinkKey>,
}

impl Exclusions {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty() && self.links.is_empty()
    }

    pub fn component(&self, id: &str) -> bool {
        self.components.contains(id)
    }

    pub fn link(&self, key: &LinkKey) -> bool {
        self.links.contains(key)
    }

    pub fn insert(&mut self, element: Element) {
        match element {
            Element::Component(id) => {
                self.components.insert(id);
            }
            Element::Link(key) => {
                self.links.insert(key);
            }
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.components
            .iter()
            .cloned()
            .map(Element::Component)
            .chain(self.links.iter().cloned().map(Element::Link))
    }
}

impl FromIterator<Element> for Exclusions {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        let mut out = Exclusions::none();
        for e in iter {
            out.insert(e);
        }
        out
    }
}

/// A simple path on one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPath {
    pub layer: LayerId,
    pub vertices: Vec<String>,
}

impl WitnessPath {
    pub fn links(&self) -> impl Iterator<Item = LinkKey> + '_ {
        self.vertices
            .windows(2)
            .map(|w| LinkKey::new(self.layer, &w[0], &w[1]))
    }

    /// Consecutive vertex pairs in traversal order.
    pub fn steps(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.vertices
            .windows(2)
            .map(|w| (w[0].as_str(), w[1].as_str()))
    }

    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

impl fmt::Display for WitnessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.vertices.join(", "))
    }
}

/// A path together with the realization of each of its links one layer
/// down; `children[i]` carries the link `root.vertices[i]..root.vertices[i+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationTree {
    pub root: WitnessPath,
    pub children: Vec<RealizationTree>,
}

impl RealizationTree {
    /// Per-layer vertex sequences, top layer first: each layer concatenates
    /// the child paths in root order, keeping the first occurrence of every
    /// vertex.
    pub fn layer_paths(&self) -> Vec<(LayerId, Vec<String>)> {
        let mut out = Vec::new();
        let mut level: Vec<&RealizationTree> = vec![self];
        let mut layer = Some(self.root.layer);
        while let Some(l) = layer {
            let mut seen = BTreeSet::new();
            let mut vertices = Vec::new();
            for node in &level {
                for v in &node.root.vertices {
                    if seen.insert(v.as_str()) {
                        vertices.push(v.clone());
                    }
                }
            }
            out.push((l, vertices));
            level = level.iter().flat_map(|n| n.children.iter()).collect();
            layer = l.below();
        }
        out
    }

    /// Indented rendering, one path per line.
    pub fn render(&self) -> String {
        fn go(node: &RealizationTree, depth: usize, out: &mut String) {
            out.push_str(&format!(
                "{}L{} {}\n",
                "  ".repeat(depth),
                node.root.layer.index(),
                node.root
            ));
            for c in &node.children {
                go(c, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}

/// Shortest hop-count path from `src` to `dst` on `layer` using only
/// allowed vertices and links; ties go to the lexicographically smallest
/// vertex sequence.
pub(crate) fn shortest_path<V, L>(
    model: &LayeredModel,
    layer: LayerId,
    src: &str,
    dst: &str,
    vertex_ok: V,
    link_ok: L,
) -> Option<Vec<String>>
where
    V: Fn(&str) -> bool,
    L: Fn(&LinkKey) -> bool,
{
    if !vertex_ok(src) || !vertex_ok(dst) {
        return None;
    }
    if src == dst {
        return Some(vec![src.to_string()]);
    }
    let step_ok = |from: &str, to: &str| vertex_ok(to) && link_ok(&LinkKey::new(layer, from, to));

    // distances to dst
    let mut dist: HashMap<&str, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(dst, 0);
    queue.push_back(dst);
    while let Some(v) = queue.pop_front() {
        if v == src {
            break;
        }
        let d = dist[v];
        for n in model.neighbors(v) {
            if !dist.contains_key(n) && step_ok(v, n) {
                dist.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    let mut remaining = *dist.get(src)?;
    let mut path = vec![src.to_string()];
    let mut cur = src;
    while remaining > 0 {
        // neighbours iterate in id order, so the first hit is the smallest
        let next = model
            .neighbors(cur)
            .find(|n| dist.get(n) == Some(&(remaining - 1)) && step_ok(cur, n))?;
        path.push(next.to_string());
        cur = next;
        remaining -= 1;
    }
    Some(path)
}

fn require_on_layer(model: &LayeredModel, id: &str, layer: LayerId) -> Result<(), ModelError> {
    match model.layer_of(id) {
        None => Err(ModelError::UnknownComponent(id.to_string())),
        Some(l) if l != layer => Err(ModelError::WrongLayer {
            id: id.to_string(),
            layer,
        }),
        Some(_) => Ok(()),
    }
}

/// Shortest path on one layer avoiding excluded components and links.
pub fn deterministic_path(
    model: &LayeredModel,
    layer: LayerId,
    src: &str,
    dst: &str,
    excluded: &Exclusions,
) -> Result<Option<WitnessPath>, ModelError> {
    require_on_layer(model, src, layer)?;
    require_on_layer(model, dst, layer)?;
    Ok(shortest_path(
        model,
        layer,
        src,
        dst,
        |v| !excluded.component(v),
        |l| !excluded.link(l),
    )
    .map(|vertices| WitnessPath { layer, vertices }))
}

/// Which components are alive and which links are usable once a set of
/// elements is excluded.
///
/// Bottom-up: a physical component is alive unless excluded; a component on
/// layer n > 1 is alive unless excluded and while some image is alive. A
/// physical link is usable unless excluded and while both endpoints live; a
/// link on layer n > 1 additionally needs two alive images of its endpoints
/// joined by usable links on layer n-1.
#[derive(Debug, Clone)]
pub struct Survival<'m> {
    model: &'m LayeredModel,
    dead_components: BTreeSet<String>,
    dead_links: BTreeSet<LinkKey>,
    // connected-component label of every alive component, within its layer
    labels: HashMap<String, usize>,
}

impl<'m> Survival<'m> {
    pub fn compute(model: &'m LayeredModel, excluded: &Exclusions) -> Self {
        let mut s = Survival {
            model,
            dead_components: BTreeSet::new(),
            dead_links: BTreeSet::new(),
            labels: HashMap::new(),
        };
        let mut next_label = 0;
        for layer in LayerId::ALL {
            for c in model.components_on(layer) {
                let alive = !excluded.component(&c.id)
                    && (layer == LayerId::Physical
                        || model.adjacent_images(&c.id).any(|i| s.is_alive(i)));
                if !alive {
                    s.dead_components.insert(c.id.clone());
                }
            }
            for l in model.links_on(layer) {
                let k = &l.key;
                let usable = !excluded.link(k)
                    && s.is_alive(&k.a)
                    && s.is_alive(&k.b)
                    && (layer == LayerId::Physical || s.image_pair(&k.a, &k.b).is_some());
                if !usable {
                    s.dead_links.insert(k.clone());
                }
            }
            // label connected components of the surviving layer graph
            for c in model.components_on(layer) {
                if !s.is_alive(&c.id) || s.labels.contains_key(&c.id) {
                    continue;
                }
                let mut queue = VecDeque::from([c.id.as_str()]);
                s.labels.insert(c.id.clone(), next_label);
                while let Some(v) = queue.pop_front() {
                    for n in model.neighbors(v) {
                        if !s.labels.contains_key(n)
                            && s.is_alive(n)
                            && s.is_usable(&LinkKey::new(layer, v, n))
                        {
                            s.labels.insert(n.to_string(), next_label);
                            queue.push_back(n);
                        }
                    }
                }
                next_label += 1;
            }
        }
        s
    }

    pub fn model(&self) -> &'m LayeredModel {
        self.model
    }

    pub fn is_alive(&self, id: &str) -> bool {
        self.model.component(id).is_some() && !self.dead_components.contains(id)
    }

    pub fn is_usable(&self, key: &LinkKey) -> bool {
        self.model.has_link(key) && !self.dead_links.contains(key)
    }

    pub fn dead_components(&self) -> &BTreeSet<String> {
        &self.dead_components
    }

    pub fn dead_links(&self) -> &BTreeSet<LinkKey> {
        &self.dead_links
    }

    /// Whether two alive components of one layer are joined by usable links.
    pub fn connected(&self, x: &str, y: &str) -> bool {
        match (self.labels.get(x), self.labels.get(y)) {
            (Some(a), Some(b)) => a == b && self.model.layer_of(x) == self.model.layer_of(y),
            _ => false,
        }
    }

    /// Lexicographically first pair of alive, connected images of `from`
    /// and `to`.
    fn image_pair(&self, from: &str, to: &str) -> Option<(&'m str, &'m str)> {
        for x in self.model.adjacent_images(from) {
            for y in self.model.adjacent_images(to) {
                if self.connected(x, y) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Surviving shortest path on `layer`.
    pub fn path(&self, layer: LayerId, src: &str, dst: &str) -> Option<WitnessPath> {
        if !self.connected(src, dst) || self.model.layer_of(src) != Some(layer) {
            return None;
        }
        shortest_path(
            self.model,
            layer,
            src,
            dst,
            |v| self.is_alive(v),
            |k| self.is_usable(k),
        )
        .map(|vertices| WitnessPath { layer, vertices })
    }

    /// The layer-(n-1) path carrying a usable link.
    pub fn lower_path(&self, key: &LinkKey) -> Option<WitnessPath> {
        self.carrier(key.layer, &key.a, &key.b)
    }

    /// Like [`Survival::lower_path`], traversing the link from `from` to `to`.
    pub fn carrier(&self, layer: LayerId, from: &str, to: &str) -> Option<WitnessPath> {
        let below = layer.below()?;
        if !self.is_usable(&LinkKey::new(layer, from, to)) {
            return None;
        }
        let (x, y) = self.image_pair(from, to)?;
        self.path(below, x, y)
    }

    /// Realization tree of a surviving path.
    pub fn tree(&self, path: WitnessPath) -> RealizationTree {
        let children = if path.layer == LayerId::Physical {
            Vec::new()
        } else {
            path.steps()
                .map(|(u, v)| {
                    let lower = self
                        .carrier(path.layer, u, v)
                        .expect("links of a surviving path are usable");
                    self.tree(lower)
                })
                .collect()
        };
        RealizationTree {
            root: path,
            children,
        }
    }

    /// Whether the requirement's endpoints are alive and joined on its layer.
    pub fn holds(&self, req: &Requirement) -> bool {
        self.is_alive(&req.src) && self.is_alive(&req.dst) && self.connected(&req.src, &req.dst)
    }
}

/// Realization tree of the link `a`-`b` on `layer`, or `None` when the link
/// cannot be carried by the non-excluded lower layers.
pub fn realize_link(
    model: &LayeredModel,
    layer: LayerId,
    a: &str,
    b: &str,
    excluded: &Exclusions,
) -> Result<Option<RealizationTree>, ModelError> {
    let key = LinkKey::new(layer, a, b);
    if !model.has_link(&key) {
        return Err(ModelError::NotALink(key));
    }
    let survival = Survival::compute(model, excluded);
    if !survival.is_usable(&key) {
        return Ok(None);
    }
    // keep the caller's endpoint order in the root path
    Ok(Some(survival.tree(WitnessPath {
        layer,
        vertices: vec![a.to_string(), b.to_string()],
    })))
}

/// Components and links failed under `excluded`, grouped by layer. An
/// element counts when it is excluded itself, or when it worked in
/// `baseline` and no longer does; elements that never worked are left out.
pub fn failed_by_layer(
    survival: &Survival<'_>,
    baseline: &Survival<'_>,
    excluded: &Exclusions,
) -> (
    BTreeMap<LayerId, BTreeSet<String>>,
    BTreeMap<LayerId, BTreeSet<LinkKey>>,
) {
    let model = survival.model();
    let mut comps: BTreeMap<LayerId, BTreeSet<String>> =
        LayerId::ALL.iter().map(|&l| (l, BTreeSet::new())).collect();
    let mut links: BTreeMap<LayerId, BTreeSet<LinkKey>> =
        LayerId::ALL.iter().map(|&l| (l, BTreeSet::new())).collect();
    for id in survival.dead_components() {
        if excluded.component(id) || baseline.is_alive(id) {
            if let Some(layer) = model.layer_of(id) {
                comps.get_mut(&layer).unwrap().insert(id.clone());
            }
        }
    }
    for k in survival.dead_links() {
        if excluded.link(k) || baseline.is_usable(k) {
            links.get_mut(&k.layer).unwrap().insert(k.clone());
        }
    }
    (comps, links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn excl(ids: &[&str]) -> Exclusions {
        ids.iter()
            .map(|s| Element::Component(s.to_string()))
            .collect()
    }

    fn wp(layer: LayerId, v: &[&str]) -> WitnessPath {
        WitnessPath {
            layer,
            vertices: v.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn physical_path() {
        let m = fixtures::demo();
        let p = deterministic_path(&m, LayerId::Physical, "h1", "h2", &Exclusions::none())
            .unwrap()
            .unwrap();
        assert_eq!(p, wp(LayerId::Physical, &["h1", "sw1", "h2"]));
        let same = deterministic_path(&m, LayerId::Physical, "h1", "h1", &Exclusions::none())
            .unwrap()
            .unwrap();
        assert_eq!(same.vertices, ["h1"]);
        let blocked =
            deterministic_path(&m, LayerId::Physical, "h1", "h2", &excl(&["sw1"])).unwrap();
        assert_eq!(blocked, None);
    }

    #[test]
    fn path_wrong_layer() {
        let m = fixtures::demo();
        assert_eq!(
            deterministic_path(&m, LayerId::Logical, "h1", "vm1", &Exclusions::none()),
            Err(ModelError::WrongLayer {
                id: "h1".into(),
                layer: LayerId::Logical
            })
        );
    }

    #[test]
    fn lexicographic_tie_break() {
        // square a-b-d, a-c-d: both two hops, b < c
        let text = "component physical a\ncomponent physical b\ncomponent physical c\ncomponent physical d\n\
                    link physical a c\nlink physical c d\nlink physical a b\nlink physical b d\n";
        let m = crate::io::parse_model(text).unwrap();
        let p = deterministic_path(&m, LayerId::Physical, "a", "d", &Exclusions::none())
            .unwrap()
            .unwrap();
        assert_eq!(p.vertices, ["a", "b", "d"]);
        let mut ex = Exclusions::none();
        ex.insert(Element::Link(LinkKey::new(LayerId::Physical, "a", "b")));
        let p = deterministic_path(&m, LayerId::Physical, "a", "d", &ex)
            .unwrap()
            .unwrap();
        assert_eq!(p.vertices, ["a", "c", "d"]);
    }

    #[test]
    fn service_link_realization() {
        let m = fixtures::demo();
        let tree = realize_link(&m, LayerId::Service, "cli", "srv", &Exclusions::none())
            .unwrap()
            .unwrap();
        let expected = RealizationTree {
            root: wp(LayerId::Service, &["cli", "srv"]),
            children: vec![RealizationTree {
                root: wp(LayerId::Logical, &["vm1", "net1", "vm2"]),
                children: vec![
                    RealizationTree {
                        root: wp(LayerId::Physical, &["h1", "sw1"]),
                        children: vec![],
                    },
                    RealizationTree {
                        root: wp(LayerId::Physical, &["sw1", "h2"]),
                        children: vec![],
                    },
                ],
            }],
        };
        assert_eq!(tree, expected);
    }

    #[test]
    fn physical_link_realizes_itself() {
        let m = fixtures::demo();
        let tree = realize_link(&m, LayerId::Physical, "h1", "sw1", &Exclusions::none())
            .unwrap()
            .unwrap();
        assert_eq!(tree.root, wp(LayerId::Physical, &["h1", "sw1"]));
        assert!(tree.children.is_empty());
    }

    #[test]
    fn realization_blocked_by_exclusion() {
        let m = fixtures::demo();
        let r = realize_link(&m, LayerId::Service, "cli", "srv", &excl(&["net1"])).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn realize_requires_a_link() {
        let m = fixtures::demo();
        assert!(matches!(
            realize_link(&m, LayerId::Physical, "h1", "h2", &Exclusions::none()),
            Err(ModelError::NotALink(_))
        ));
    }

    #[test]
    fn layer_paths_collapse_duplicates() {
        let m = fixtures::demo();
        let tree = realize_link(&m, LayerId::Service, "cli", "srv", &Exclusions::none())
            .unwrap()
            .unwrap();
        let paths = tree.layer_paths();
        assert_eq!(paths[2].1, ["h1", "sw1", "h2"]);
    }
}
