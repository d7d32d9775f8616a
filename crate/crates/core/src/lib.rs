//! Four-layer models of distributed systems.
//!
//! A system is a graph whose components sit on the physical, logical,
//! service and functional layers. Links join components of one layer;
//! projections map a component onto the components one layer down that
//! host or implement it. On top of that model the crate provides
//! structural validation, consistency checks (compatibility, accessibility
//! through top-down realization, transparency, openness), requirements
//! coverage checklists, and single-fault injection with FMEA tables.

pub mod checklist;
pub mod consistency;
pub mod faultsim;
pub mod fixtures;
pub mod io;
mod layer;
pub mod model;
pub mod paths;
pub mod structure;

pub use layer::{LayerId, UnknownLayer};
pub use model::{
    build_model, CardinalityRow, Component, Element, LayerView, LayeredModel, Link, LinkKey,
    ModelError, ModelParts, Projection, Requirement,
};
