#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use layernet::{
    build_model, Component, Element, LayerId, LayeredModel, Link, LinkKey, Projection, Requirement,
};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::Rng;

/// Size knobs for [`random_model`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_per_layer: usize,
    pub link_prob: f64,
    pub max_images: usize,
    pub requirements: usize,
}

impl Shape {
    /// Up to 20 components per layer.
    pub const LARGE: Shape = Shape {
        max_per_layer: 20,
        link_prob: 0.15,
        max_images: 3,
        requirements: 3,
    };

    /// At most 4 components and 6 links per layer, so at most 40 elements.
    pub const SMALL: Shape = Shape {
        max_per_layer: 4,
        link_prob: 0.45,
        max_images: 2,
        requirements: 2,
    };
}

fn prefix(layer: LayerId) -> &'static str {
    match layer {
        LayerId::Physical => "p",
        LayerId::Logical => "g",
        LayerId::Service => "s",
        LayerId::Functional => "f",
    }
}

/// A structurally valid random model: every layer populated, every
/// component above the physical layer projected onto the layer below, at
/// least one link.
pub fn random_model(rng: &mut StdRng, shape: &Shape) -> LayeredModel {
    let mut ids: BTreeMap<LayerId, Vec<String>> = BTreeMap::new();
    let mut components = Vec::new();
    let mut links = Vec::new();
    let mut projections = Vec::new();
    for layer in LayerId::ALL {
        let min = if layer == LayerId::Physical { 2 } else { 1 };
        let n = rng.random_range(min..=shape.max_per_layer.max(min));
        let layer_ids: Vec<String> = (0..n).map(|i| format!("{}{i}", prefix(layer))).collect();
        for id in &layer_ids {
            components.push(Component::new(id.clone(), layer));
        }
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(shape.link_prob) {
                    links.push(Link::new(layer, layer_ids[i].clone(), layer_ids[j].clone()));
                }
            }
        }
        if layer == LayerId::Physical && links.is_empty() {
            links.push(Link::new(layer, layer_ids[0].clone(), layer_ids[1].clone()));
        }
        if let Some(below) = layer.below() {
            let lower = &ids[&below];
            for id in &layer_ids {
                let k = rng.random_range(1..=shape.max_images.min(lower.len()));
                for idx in sample(rng, lower.len(), k) {
                    projections.push(Projection::new(id.clone(), lower[idx].clone()));
                }
            }
        }
        ids.insert(layer, layer_ids);
    }
    let mut requirements = Vec::new();
    for r in 0..shape.requirements {
        let layer = match rng.random_range(0..10) {
            0 => LayerId::Physical,
            1 | 2 => LayerId::Logical,
            3 | 4 => LayerId::Service,
            _ => LayerId::Functional,
        };
        let pool = &ids[&layer];
        let (src, dst) = if pool.len() < 2 {
            (pool[0].clone(), pool[0].clone())
        } else {
            let pick = sample(rng, pool.len(), 2);
            (pool[pick.index(0)].clone(), pool[pick.index(1)].clone())
        };
        requirements.push(Requirement::new(format!("r{r}"), src, dst).on_layer(layer));
    }
    build_model("random", components, links, projections, requirements)
        .expect("generator emits valid parts")
}

pub fn element_count(model: &LayeredModel) -> usize {
    model.component_count() + model.link_count()
}

type Common = Option<BTreeSet<Element>>;

/// Brute-force reference for single points of failure.
///
/// A realization of a requirement picks a simple path on its layer, for
/// every vertex a chain of images down to the physical layer, and for every
/// link an image pair with a simple lower path, recursively. The elements
/// common to all realizations are the intersection over alternatives and the
/// union over the parts of one realization. `None` means no realization.
pub struct Oracle {
    layer: BTreeMap<String, LayerId>,
    adj: BTreeMap<String, BTreeSet<String>>,
    images: BTreeMap<String, BTreeSet<String>>,
    support_memo: HashMap<String, Common>,
    link_memo: HashMap<LinkKey, Common>,
}

fn intersect(acc: Common, next: Common) -> Common {
    match (acc, next) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.intersection(&b).cloned().collect()),
    }
}

impl Oracle {
    pub fn new(model: &LayeredModel) -> Self {
        let layer: BTreeMap<String, LayerId> = model
            .components()
            .map(|c| (c.id.clone(), c.layer))
            .collect();
        let mut adj: BTreeMap<String, BTreeSet<String>> = layer
            .keys()
            .map(|id| (id.clone(), BTreeSet::new()))
            .collect();
        for l in model.links() {
            adj.get_mut(&l.key.a).unwrap().insert(l.key.b.clone());
            adj.get_mut(&l.key.b).unwrap().insert(l.key.a.clone());
        }
        let mut images: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for p in model.projections() {
            images
                .entry(p.upper.clone())
                .or_default()
                .insert(p.lower.clone());
        }
        Oracle {
            layer,
            adj,
            images,
            support_memo: HashMap::new(),
            link_memo: HashMap::new(),
        }
    }

    pub fn simple_paths(&self, src: &str, dst: &str) -> Vec<Vec<String>> {
        fn dfs(o: &Oracle, path: &mut Vec<String>, dst: &str, out: &mut Vec<Vec<String>>) {
            let last = path.last().unwrap().clone();
            if last == dst {
                out.push(path.clone());
                return;
            }
            for n in &o.adj[&last] {
                if !path.contains(n) {
                    path.push(n.clone());
                    dfs(o, path, dst, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        dfs(self, &mut vec![src.to_string()], dst, &mut out);
        out
    }

    fn support(&mut self, v: &str) -> Common {
        if let Some(c) = self.support_memo.get(v) {
            return c.clone();
        }
        let result = if self.layer[v] == LayerId::Physical {
            Some(BTreeSet::from([Element::Component(v.to_string())]))
        } else {
            let imgs: Vec<String> = self.images.get(v).into_iter().flatten().cloned().collect();
            let mut acc = None;
            for i in imgs {
                acc = intersect(acc, self.support(&i));
            }
            acc.map(|mut s| {
                s.insert(Element::Component(v.to_string()));
                s
            })
        };
        self.support_memo.insert(v.to_string(), result.clone());
        result
    }

    fn link(&mut self, u: &str, v: &str) -> Common {
        let layer = self.layer[u];
        let key = LinkKey::new(layer, u, v);
        if let Some(c) = self.link_memo.get(&key) {
            return c.clone();
        }
        let result = match layer.below() {
            None => Some(BTreeSet::new()),
            Some(_) => {
                let xs: Vec<String> = self.images.get(u).into_iter().flatten().cloned().collect();
                let ys: Vec<String> = self.images.get(v).into_iter().flatten().cloned().collect();
                let mut acc = None;
                for x in &xs {
                    for y in &ys {
                        for q in self.simple_paths(x, y) {
                            acc = intersect(acc, self.path(&q));
                        }
                    }
                }
                acc
            }
        }
        .map(|mut s| {
            s.insert(Element::Link(key.clone()));
            s
        });
        self.link_memo.insert(key, result.clone());
        result
    }

    fn path(&mut self, p: &[String]) -> Common {
        let mut all = BTreeSet::new();
        for w in p {
            all.extend(self.support(w)?);
        }
        for hop in p.windows(2) {
            all.extend(self.link(&hop[0], &hop[1])?);
        }
        Some(all)
    }

    /// Elements present in every realization, or `None` if there is none.
    pub fn common_elements(&mut self, req: &Requirement) -> Common {
        let mut acc = None;
        for p in self.simple_paths(&req.src, &req.dst) {
            acc = intersect(acc, self.path(&p));
        }
        acc
    }

    fn element_layer(&self, e: &Element) -> LayerId {
        match e {
            Element::Component(id) => self.layer[id],
            Element::Link(k) => k.layer,
        }
    }

    /// Single points of failure of an accessible requirement, ordered by
    /// layer then qualified id; `None` when it is not accessible.
    pub fn spofs(&mut self, req: &Requirement) -> Option<Vec<Element>> {
        let common = self.common_elements(req)?;
        let src = Element::Component(req.src.clone());
        let dst = Element::Component(req.dst.clone());
        let direct = (req.src != req.dst)
            .then(|| Element::Link(LinkKey::new(req.layer, &req.src, &req.dst)));
        let mut out: Vec<Element> = common
            .into_iter()
            .filter(|e| *e != src && *e != dst && Some(e) != direct.as_ref())
            .filter(|e| self.element_layer(e) <= req.layer)
            .collect();
        out.sort_by_key(|e| (self.element_layer(e), e.qualified_id()));
        Some(out)
    }
}
