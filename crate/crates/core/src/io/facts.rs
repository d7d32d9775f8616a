//! Logic-programming fact export.

use crate::layer::LayerId;
use crate::model::LayeredModel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("id \"{0}\" contains an apostrophe and cannot be quoted as an atom")]
pub struct IdNotQuotable(pub String);

fn atom(id: &str) -> Result<String, IdNotQuotable> {
    if id.contains('\'') {
        return Err(IdNotQuotable(id.to_string()));
    }
    Ok(format!("'{id}'"))
}

/// One fact per line: vertices (layer descending, then id), edges, maps,
/// requirements.
///
/// ```text
/// vertex(N, 'id').
/// edge(N, 'a', 'b').
/// map(N, 'upper', 'lower').
/// requirement('rid', N, 'src', 'dst').
/// ```
pub fn export_logic_facts(model: &LayeredModel) -> Result<String, IdNotQuotable> {
    let mut out = String::new();
    for layer in LayerId::TOP_DOWN {
        for c in model.components_on(layer) {
            out.push_str(&format!("vertex({}, {}).\n", layer.index(), atom(&c.id)?));
        }
    }
    for layer in LayerId::TOP_DOWN {
        for l in model.links_on(layer) {
            out.push_str(&format!(
                "edge({}, {}, {}).\n",
                layer.index(),
                atom(&l.key.a)?,
                atom(&l.key.b)?
            ));
        }
    }
    for layer in LayerId::TOP_DOWN {
        for p in model
            .projections()
            .filter(|p| model.layer_of(&p.upper) == Some(layer))
        {
            out.push_str(&format!(
                "map({}, {}, {}).\n",
                layer.index(),
                atom(&p.upper)?,
                atom(&p.lower)?
            ));
        }
    }
    for r in model.requirements() {
        out.push_str(&format!(
            "requirement({}, {}, {}, {}).\n",
            atom(&r.id)?,
            r.layer.index(),
            atom(&r.src)?,
            atom(&r.dst)?
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Component, ModelParts};

    #[test]
    fn demo_fact_counts() {
        let facts = export_logic_facts(&fixtures::demo()).unwrap();
        let lines: Vec<_> = facts.lines().collect();
        assert_eq!(lines.len(), 24);
        assert_eq!(
            lines.iter().filter(|l| l.starts_with("vertex(")).count(),
            10
        );
        assert_eq!(lines.iter().filter(|l| l.starts_with("edge(")).count(), 6);
        assert_eq!(lines.iter().filter(|l| l.starts_with("map(")).count(), 7);
        assert_eq!(lines[0], "vertex(4, 'data_service').");
        assert!(lines.contains(&"edge(1, 'h1', 'sw1')."));
        assert!(lines.contains(&"map(3, 'cli', 'vm1')."));
        assert_eq!(
            lines[23],
            "requirement('r1', 4, 'user_portal', 'data_service')."
        );
    }

    #[test]
    fn chain_has_seven_facts() {
        let facts = export_logic_facts(&fixtures::chain()).unwrap();
        assert_eq!(facts.lines().count(), 7);
    }

    #[test]
    fn apostrophe_rejected() {
        let m = ModelParts {
            name: "q".into(),
            components: vec![Component::new("o'brien", LayerId::Physical)],
            ..Default::default()
        }
        .build()
        .unwrap();
        assert_eq!(export_logic_facts(&m), Err(IdNotQuotable("o'brien".into())));
    }
}
