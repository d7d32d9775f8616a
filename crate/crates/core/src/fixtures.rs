//! Bundled example models.

use crate::io::parse_model;
use crate::layer::LayerId;
use crate::model::{LayeredModel, LinkKey};

pub const DEMO_TEXT: &str = include_str!("../fixtures/demo.model");
pub const CPWE_TEXT: &str = include_str!("../fixtures/cpwe.model");
pub const CHAIN_TEXT: &str = include_str!("../fixtures/chain.model");
pub const CLUSTERED_TEXT: &str = include_str!("../fixtures/clustered.model");
pub const REDUNDANT_TEXT: &str = include_str!("../fixtures/redundant.model");
pub const SHARED_CORE_TEXT: &str = include_str!("../fixtures/shared_core.model");
pub const TWO_CHAINS_TEXT: &str = include_str!("../fixtures/two_chains.model");

fn load(text: &str) -> LayeredModel {
    parse_model(text).expect("bundled fixture parses")
}

/// Ten components in a single chain per layer, one requirement.
pub fn demo() -> LayeredModel {
    load(DEMO_TEXT)
}

/// Converged plant-wide Ethernet style plant network: 94 components, 191
/// links, 150 projections. The wiring is synthetic.
pub fn cpwe() -> LayeredModel {
    load(CPWE_TEXT)
}

/// One component per layer, three projections, nothing else.
pub fn chain() -> LayeredModel {
    load(CHAIN_TEXT)
}

/// Demo variant where `srv` is clustered over two VMs on two hosts.
pub fn clustered() -> LayeredModel {
    load(CLUSTERED_TEXT)
}

/// Two fully disjoint chains under one pair of functional endpoints.
pub fn redundant() -> LayeredModel {
    load(REDUNDANT_TEXT)
}

/// Two chains that share a single core switch.
pub fn shared_core() -> LayeredModel {
    load(SHARED_CORE_TEXT)
}

/// Two requirements on separate hosts behind one switch.
pub fn two_chains() -> LayeredModel {
    load(TWO_CHAINS_TEXT)
}

/// Demo with the logical link vm1-net1 removed.
pub fn demo_without_vm1_net1() -> LayeredModel {
    let mut parts = demo().to_parts();
    let gone = LinkKey::new(LayerId::Logical, "vm1", "net1");
    parts.links.retain(|l| l.key != gone);
    parts.build().expect("subset of a valid model")
}

pub fn all() -> Vec<LayeredModel> {
    vec![
        demo(),
        cpwe(),
        chain(),
        clustered(),
        redundant(),
        shared_core(),
        two_chains(),
    ]
}
