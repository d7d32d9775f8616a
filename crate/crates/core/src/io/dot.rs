//! Graphviz description of the layered model: one cluster per layer,
//! functional on top.

use crate::layer::LayerId;
use crate::model::LayeredModel;

fn q(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_drawing(model: &LayeredModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph {} {{\n", q(model.name())));
    out.push_str("  newrank=true;\n  rankdir=TB;\n  node [shape=box];\n");
    for layer in LayerId::TOP_DOWN {
        out.push_str(&format!(
            "  subgraph cluster_layer{} {{\n    label={};\n    rank=same;\n",
            layer.index(),
            q(&format!("{} ({})", layer.name(), layer.index()))
        ));
        for c in model.components_on(layer) {
            out.push_str(&format!("    {};\n", q(&c.id)));
        }
        out.push_str("  }\n");
    }
    for layer in LayerId::TOP_DOWN {
        for l in model.links_on(layer) {
            out.push_str(&format!(
                "  {} -> {} [dir=none, style=solid];\n",
                q(&l.key.a),
                q(&l.key.b)
            ));
        }
    }
    for layer in LayerId::TOP_DOWN {
        for p in model
            .projections()
            .filter(|p| model.layer_of(&p.upper) == Some(layer))
        {
            out.push_str(&format!(
                "  {} -> {} [style=dashed];\n",
                q(&p.upper),
                q(&p.lower)
            ));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn counts(text: &str) -> (usize, usize, usize) {
        (
            text.matches("subgraph cluster_layer").count(),
            text.matches("style=solid").count(),
            text.matches("style=dashed").count(),
        )
    }

    #[test]
    fn demo_drawing() {
        let text = export_drawing(&fixtures::demo());
        assert_eq!(counts(&text), (4, 6, 7));
        assert!(text.find("cluster_layer4").unwrap() < text.find("cluster_layer1").unwrap());
        assert_eq!(text, export_drawing(&fixtures::demo()));
    }

    #[test]
    fn chain_drawing() {
        assert_eq!(counts(&export_drawing(&fixtures::chain())), (4, 0, 3));
    }
}
