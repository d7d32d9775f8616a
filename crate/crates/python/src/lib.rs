//! Python bindings for `layernet`.

use std::fs;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use layernet::checklist::generate_checklist;
use layernet::consistency::consistency_check;
use layernet::faultsim::{
    enumerate_spofs, generate_fmea, parse_element, propagate_failures, FaultScenario,
};
use layernet::io::{export_drawing, export_logic_facts, parse_model, serialize_model};
use layernet::paths::{deterministic_path, realize_link, Exclusions};
use layernet::structure::{classify_projection_arity, validate_structure, Finding};
use layernet::{LayerId, LayeredModel};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A layer given either by number (1-4) or by name.
#[derive(FromPyObject)]
enum LayerArg {
    Index(u8),
    Name(String),
}

impl LayerArg {
    fn resolve(self) -> PyResult<LayerId> {
        match self {
            LayerArg::Index(i) => {
                LayerId::from_index(i).ok_or_else(|| value_error(format!("no layer {i}")))
            }
            LayerArg::Name(s) => s.parse().map_err(value_error),
        }
    }
}

type StatsRow = (u8, usize, usize, Option<usize>, Option<usize>);
type FindingRow = (String, String, String);
type LayerPath = (u8, Vec<String>);
type ChecklistRow = (String, String, u8, String, String, Vec<String>);
type FmeaTuple = (String, u8, f64, usize, Vec<String>);

fn finding_tuple(f: &Finding) -> FindingRow {
    (
        f.code.as_str().to_string(),
        f.subject.clone(),
        f.message.clone(),
    )
}

/// A parsed four-layer model.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: LayeredModel,
}

#[pymethods]
impl PyModel {
    /// Parse model text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = parse_model(text).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// Read and parse a model file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn __repr__(&self) -> String {
        format!(
            "Model({:?}, components={}, links={})",
            self.inner.name(),
            self.inner.component_count(),
            self.inner.link_count()
        )
    }

    /// Canonical text form.
    fn to_text(&self) -> String {
        serialize_model(&self.inner)
    }

    /// Component ids, optionally restricted to one layer.
    #[pyo3(signature = (layer=None))]
    fn components(&self, layer: Option<LayerArg>) -> PyResult<Vec<String>> {
        let layer = layer.map(LayerArg::resolve).transpose()?;
        Ok(self
            .inner
            .components()
            .filter(|c| layer.is_none_or(|l| c.layer == l))
            .map(|c| c.id.clone())
            .collect())
    }

    /// Qualified link ids, optionally restricted to one layer.
    #[pyo3(signature = (layer=None))]
    fn links(&self, layer: Option<LayerArg>) -> PyResult<Vec<String>> {
        let layer = layer.map(LayerArg::resolve).transpose()?;
        Ok(self
            .inner
            .links()
            .filter(|l| layer.is_none_or(|n| l.key.layer == n))
            .map(|l| l.key.to_string())
            .collect())
    }

    /// Rows of (layer, components, links, projections, lower components),
    /// top layer first.
    fn stats(&self) -> Vec<StatsRow> {
        self.inner
            .cardinality_report()
            .into_iter()
            .map(|r| {
                (
                    r.layer.index(),
                    r.components,
                    r.links,
                    r.projections,
                    r.lower_components,
                )
            })
            .collect()
    }

    /// `(violations, warnings)`, each a list of (code, subject, message).
    #[pyo3(signature = (strict=false))]
    fn validate(&self, strict: bool) -> (Vec<FindingRow>, Vec<FindingRow>) {
        let report = validate_structure(&self.inner, strict);
        (
            report.violations.iter().map(finding_tuple).collect(),
            report.warnings.iter().map(finding_tuple).collect(),
        )
    }

    /// Projection arity class of a component above the physical layer.
    fn arity(&self, component: &str) -> PyResult<String> {
        classify_projection_arity(&self.inner, component)
            .map(|a| a.to_string())
            .map_err(value_error)
    }

    /// Shortest path on a layer, or None.
    fn path(&self, layer: LayerArg, src: &str, dst: &str) -> PyResult<Option<Vec<String>>> {
        let layer = layer.resolve()?;
        let path = deterministic_path(&self.inner, layer, src, dst, &Exclusions::none())
            .map_err(value_error)?;
        Ok(path.map(|p| p.vertices))
    }

    /// Per-layer vertices realizing a link, or None when it cannot be carried.
    fn realize(&self, layer: LayerArg, a: &str, b: &str) -> PyResult<Option<Vec<LayerPath>>> {
        let layer = layer.resolve()?;
        let tree =
            realize_link(&self.inner, layer, a, b, &Exclusions::none()).map_err(value_error)?;
        Ok(tree.map(|t| {
            t.layer_paths()
                .into_iter()
                .map(|(l, v)| (l.index(), v))
                .collect()
        }))
    }

    /// Consistency check summary as a dict; `report` holds the full text.
    fn check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = consistency_check(&self.inner);
        let requirements = PyDict::new(py);
        for r in &report.requirements {
            let entry = PyDict::new(py);
            entry.set_item("accessible", r.accessibility.passed())?;
            entry.set_item(
                "spofs",
                r.spofs
                    .as_ref()
                    .map(|s| s.iter().map(|e| e.to_string()).collect::<Vec<_>>()),
            )?;
            entry.set_item("failed", r.failed())?;
            requirements.set_item(r.id(), entry)?;
        }
        let out = PyDict::new(py);
        out.set_item("verdict", report.verdict.to_string())?;
        out.set_item("requirements", requirements)?;
        out.set_item("report", report.render())?;
        Ok(out)
    }

    /// Checklist rows of (id, kind, layer, subject, status, witness).
    fn checklist(&self) -> Vec<ChecklistRow> {
        generate_checklist(&self.inner)
            .into_iter()
            .map(|i| {
                (
                    i.id,
                    i.kind.to_string(),
                    i.layer.index(),
                    i.subject,
                    i.status.to_string(),
                    i.witness,
                )
            })
            .collect()
    }

    /// Single points of failure of a requirement as qualified ids.
    fn spofs(&self, requirement: &str) -> PyResult<Vec<String>> {
        let req = self
            .inner
            .requirement(requirement)
            .ok_or_else(|| value_error(format!("unknown requirement \"{requirement}\"")))?;
        let spofs = enumerate_spofs(&self.inner, req).map_err(value_error)?;
        Ok(spofs.iter().map(|e| e.to_string()).collect())
    }

    /// Remove elements and return failed elements and requirement status.
    fn inject<'py>(&self, py: Python<'py>, remove: Vec<String>) -> PyResult<Bound<'py, PyDict>> {
        let mut scenario = FaultScenario::new();
        for r in &remove {
            scenario = scenario.remove(parse_element(&self.inner, r).map_err(value_error)?);
        }
        let report = propagate_failures(&self.inner, &scenario).map_err(value_error)?;
        let out = PyDict::new(py);
        out.set_item(
            "failed",
            report
                .failed_elements()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>(),
        )?;
        out.set_item(
            "broken",
            report.broken_requirements.iter().collect::<Vec<_>>(),
        )?;
        out.set_item(
            "intact",
            report.intact_requirements.iter().collect::<Vec<_>>(),
        )?;
        out.set_item(
            "unmet",
            report.unmet_requirements.iter().collect::<Vec<_>>(),
        )?;
        Ok(out)
    }

    /// Rows of (failure mode, layer, severity, collateral, effects).
    fn fmea(&self) -> PyResult<Vec<FmeaTuple>> {
        let rows = generate_fmea(&self.inner).map_err(value_error)?;
        Ok(rows
            .into_iter()
            .map(|r| {
                (
                    r.failure_mode.to_string(),
                    r.layer.index(),
                    r.severity.as_f64(),
                    r.collateral,
                    r.effects,
                )
            })
            .collect())
    }

    /// Export as `"facts"`, `"drawing"` or `"canonical"`.
    fn export(&self, format: &str) -> PyResult<String> {
        match format {
            "facts" => export_logic_facts(&self.inner).map_err(value_error),
            "drawing" => Ok(export_drawing(&self.inner)),
            "canonical" => Ok(serialize_model(&self.inner)),
            other => Err(value_error(format!("unknown export format \"{other}\""))),
        }
    }
}

#[pymodule]
fn pylayernet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    Ok(())
}
