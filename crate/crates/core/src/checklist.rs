//! Requirements-coverage checklist: one check per component and one
//! interaction check per requirement and layer, from the requirement's
//! layer down to the physical layer.

use std::collections::BTreeMap;
use std::fmt;

use crate::consistency::accessibility_with;
use crate::layer::LayerId;
use crate::model::LayeredModel;
use crate::paths::{Exclusions, Survival};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ItemKind {
    ComponentCheck,
    InteractionCheck,
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ItemKind::ComponentCheck => "component",
            ItemKind::InteractionCheck => "interaction",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemStatus {
    Covered,
    Unsatisfiable,
}

impl fmt::Display for ItemStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ItemStatus::Covered => "covered",
            ItemStatus::Unsatisfiable => "unsatisfiable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChecklistItem {
    /// `CMP-<layer>-<component>` or `INT-<requirement>-L<layer>`.
    pub id: String,
    pub kind: ItemKind,
    pub layer: LayerId,
    /// Component id, or requirement id for interactions.
    pub subject: String,
    pub status: ItemStatus,
    /// Vertices to exercise; empty for component checks.
    pub witness: Vec<String>,
}

pub fn generate_checklist(model: &LayeredModel) -> Vec<ChecklistItem> {
    let mut items = Vec::new();
    for c in model.components() {
        items.push(ChecklistItem {
            id: format!("CMP-{}-{}", c.layer.index(), c.id),
            kind: ItemKind::ComponentCheck,
            layer: c.layer,
            subject: c.id.clone(),
            status: ItemStatus::Covered,
            witness: Vec::new(),
        });
    }
    let survival = Survival::compute(model, &Exclusions::none());
    for req in model.requirements() {
        let access = accessibility_with(&survival, req);
        for (layer, witness) in access.layers {
            let (status, witness) = match witness {
                Some(w) => (ItemStatus::Covered, w),
                None => (ItemStatus::Unsatisfiable, Vec::new()),
            };
            items.push(ChecklistItem {
                id: format!("INT-{}-L{}", req.id, layer.index()),
                kind: ItemKind::InteractionCheck,
                layer,
                subject: req.id.clone(),
                status,
                witness,
            });
        }
    }
    items.sort_by(|x, y| {
        y.layer
            .cmp(&x.layer)
            .then(x.kind.cmp(&y.kind))
            .then_with(|| x.id.cmp(&y.id))
    });
    items
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverageCounts {
    pub components: usize,
    pub interactions: usize,
    pub unsatisfiable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageSummary {
    pub per_layer: BTreeMap<LayerId, CoverageCounts>,
    pub totals: CoverageCounts,
}

impl CoverageSummary {
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<12} {:>10} {:>12} {:>13}\n",
            "layer", "components", "interactions", "unsatisfiable"
        );
        let mut row = |name: &str, c: &CoverageCounts| {
            out.push_str(&format!(
                "{:<12} {:>10} {:>12} {:>13}\n",
                name, c.components, c.interactions, c.unsatisfiable
            ));
        };
        for layer in LayerId::TOP_DOWN {
            row(
                &format!("{} {}", layer.index(), layer.name()),
                &self.per_layer[&layer],
            );
        }
        row("total", &self.totals);
        out
    }
}

pub fn coverage_summary(items: &[ChecklistItem]) -> CoverageSummary {
    let mut per_layer: BTreeMap<LayerId, CoverageCounts> = LayerId::ALL
        .iter()
        .map(|&l| (l, CoverageCounts::default()))
        .collect();
    for item in items {
        let c = per_layer.get_mut(&item.layer).expect("all layers present");
        match item.kind {
            ItemKind::ComponentCheck => c.components += 1,
            ItemKind::InteractionCheck => c.interactions += 1,
        }
        if item.status == ItemStatus::Unsatisfiable {
            c.unsatisfiable += 1;
        }
    }
    let totals = per_layer
        .values()
        .fold(CoverageCounts::default(), |acc, c| CoverageCounts {
            components: acc.components + c.components,
            interactions: acc.interactions + c.interactions,
            unsatisfiable: acc.unsatisfiable + c.unsatisfiable,
        });
    CoverageSummary { per_layer, totals }
}

fn witness_text(w: &[String]) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        w.join(",")
    }
}

/// Tab-separated: id, kind, layer, subject, status, witness.
pub fn render_lines(items: &[ChecklistItem]) -> String {
    items
        .iter()
        .map(|i| {
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                i.id,
                i.kind,
                i.layer.index(),
                i.subject,
                i.status,
                witness_text(&i.witness)
            )
        })
        .collect()
}

/// Aligned table followed by the coverage summary.
pub fn render_table(items: &[ChecklistItem]) -> String {
    let headers = ["id", "kind", "layer", "subject", "status", "witness"];
    let rows: Vec<[String; 6]> = items
        .iter()
        .map(|i| {
            [
                i.id.clone(),
                i.kind.to_string(),
                i.layer.index().to_string(),
                i.subject.clone(),
                i.status.to_string(),
                witness_text(&i.witness),
            ]
        })
        .collect();
    let mut widths = headers.map(str::len);
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: [&str; 6]| {
        let mut s = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i == 5 {
                s.push_str(cell);
            } else {
                s.push_str(&format!("{:<w$}  ", cell, w = widths[i]));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(headers);
    for r in &rows {
        out.push_str(&line([&r[0], &r[1], &r[2], &r[3], &r[4], &r[5]]));
    }
    out.push('\n');
    out.push_str(&coverage_summary(items).render());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn demo_checklist() {
        let items = generate_checklist(&fixtures::demo());
        assert_eq!(items.len(), 14);
        let ids: Vec<&str> = items.iter().map(|i| i.id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "CMP-4-data_service",
                "CMP-4-user_portal",
                "INT-r1-L4",
                "CMP-3-cli",
                "CMP-3-srv",
                "INT-r1-L3",
                "CMP-2-net1",
                "CMP-2-vm1",
                "CMP-2-vm2",
                "INT-r1-L2",
                "CMP-1-h1",
                "CMP-1-h2",
                "CMP-1-sw1",
                "INT-r1-L1",
            ]
        );
        assert!(items.iter().all(|i| i.status == ItemStatus::Covered));
        let l1 = items.iter().find(|i| i.id == "INT-r1-L1").unwrap();
        assert_eq!(l1.witness, ["h1", "sw1", "h2"]);
        let l2 = items.iter().find(|i| i.id == "INT-r1-L2").unwrap();
        assert_eq!(l2.witness, ["vm1", "net1", "vm2"]);
    }

    #[test]
    fn demo_summary() {
        let s = coverage_summary(&generate_checklist(&fixtures::demo()));
        assert_eq!(
            s.per_layer[&LayerId::Functional],
            CoverageCounts {
                components: 2,
                interactions: 1,
                unsatisfiable: 0
            }
        );
        assert_eq!(
            s.totals,
            CoverageCounts {
                components: 10,
                interactions: 4,
                unsatisfiable: 0
            }
        );
    }

    #[test]
    fn broken_demo_marks_lower_layers() {
        let items = generate_checklist(&fixtures::demo_without_vm1_net1());
        let status = |id: &str| items.iter().find(|i| i.id == id).unwrap().status;
        assert_eq!(status("INT-r1-L4"), ItemStatus::Covered);
        assert_eq!(status("INT-r1-L3"), ItemStatus::Covered);
        assert_eq!(status("INT-r1-L2"), ItemStatus::Unsatisfiable);
        assert_eq!(status("INT-r1-L1"), ItemStatus::Unsatisfiable);
        assert_eq!(coverage_summary(&items).totals.unsatisfiable, 2);
    }

    #[test]
    fn no_requirements_only_components() {
        let items = generate_checklist(&fixtures::chain());
        assert_eq!(items.len(), 4);
        assert!(items.iter().all(|i| i.kind == ItemKind::ComponentCheck));
    }

    #[test]
    fn empty_summary() {
        let s = coverage_summary(&[]);
        assert_eq!(s.totals, CoverageCounts::default());
        assert!(s
            .per_layer
            .values()
            .all(|c| *c == CoverageCounts::default()));
    }
}
