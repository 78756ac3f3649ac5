//! Model specification files (TOML). Exactly one of four sections:
//!
//! ```toml
//! [family]                 # or: spec = "logistic(p=2, d=3)"
//! name = "logistic"
//! d = 2
//! params = { p = 2.0 }
//!
//! [spectral]
//! reference_norm = "l1"
//! atoms = [{ point = [0.5, 0.5], mass = 2.0 }]
//!
//! [polygon]
//! vertices = [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]
//!
//! [extremal]
//! d = 3
//! theta = { "1,2" = 1.5, "1,2,3" = 2.0 }
//! ```
//!
//! `normalize = true` in a spectral or polygon section rescales the body to
//! unit marginals instead of rejecting it.

use std::collections::BTreeMap;
use std::path::Path;

use maxzonoid::alternation::construct_from_extremal;
use maxzonoid::dependence::ExtremalTable;
use maxzonoid::distribution::MaxStableModel;
use maxzonoid::{Atom, DependencySet, FamilySpec, MaxZonoid, Polygon2D, ReferenceNorm, SpectralMeasure};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polygon: Option<PolygonSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal: Option<ExtremalSection>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, toml::Value>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    #[serde(default = "default_norm")]
    pub reference_norm: String,
    pub atoms: Vec<AtomEntry>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub normalize: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AtomEntry {
    pub point: Vec<f64>,
    pub mass: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonSection {
    pub vertices: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub normalize: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalSection {
    pub d: usize,
    /// Keys are sorted 1-based index lists such as `"1,3"`.
    pub theta: BTreeMap<String, f64>,
}

fn default_norm() -> String {
    "l1".into()
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<SpecFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read model file {}: {e}", path.display())))?;
        SpecFile::parse(&text)
    }

    pub fn parse(text: &str) -> Result<SpecFile, CliError> {
        let spec: SpecFile =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("invalid model specification: {e}")))?;
        let present = [spec.family.is_some(), spec.spectral.is_some(), spec.polygon.is_some(), spec.extremal.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if present != 1 {
            return Err(CliError::Validation(format!(
                "a model specification needs exactly one of [family], [spectral], [polygon], [extremal]; found {present}"
            )));
        }
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model specifications always serialize")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("model specifications always serialize")
    }

    pub fn from_measure(sigma: &SpectralMeasure) -> SpecFile {
        SpecFile {
            spectral: Some(SpectralSection {
                reference_norm: sigma.reference_norm().name().into(),
                atoms: sigma.atoms().iter().map(|a| AtomEntry { point: a.point.clone(), mass: a.mass }).collect(),
                normalize: false,
            }),
            ..SpecFile::default()
        }
    }

    pub fn from_polygon(p: &Polygon2D) -> SpecFile {
        SpecFile { polygon: Some(PolygonSection { vertices: p.vertices().to_vec(), normalize: false }), ..SpecFile::default() }
    }

    /// Extremal table of an `[extremal]` section.
    pub fn table(&self) -> Result<ExtremalTable, CliError> {
        let Some(ex) = &self.extremal else {
            return Err(CliError::Validation("this command needs an [extremal] model specification".into()));
        };
        let mut map = BTreeMap::new();
        for (key, value) in &ex.theta {
            map.insert(parse_subset(key, ex.d)?, *value);
        }
        Ok(ExtremalTable::from_subsets(ex.d, &map)?)
    }

    pub fn model(&self) -> Result<MaxStableModel, CliError> {
        if let Some(f) = &self.family {
            let spec = family_spec(f)?;
            return Ok(MaxStableModel::new(maxzonoid::families::make_family(&spec)?));
        }
        if let Some(s) = &self.spectral {
            let norm: ReferenceNorm = s.reference_norm.parse()?;
            let atoms = s.atoms.iter().map(|a| Atom::new(a.point.clone(), a.mass)).collect();
            let sigma = SpectralMeasure::new(norm, atoms)?;
            let sigma = if s.normalize { sigma.normalized()? } else { sigma };
            return Ok(MaxStableModel::from_spectral(sigma)?);
        }
        if let Some(p) = &self.polygon {
            let body = MaxZonoid::from_polygon(Polygon2D::new(p.vertices.clone())?);
            let set = if p.normalize { DependencySet::normalize(&body)? } else { DependencySet::new(body)? };
            return Ok(MaxStableModel::new(set));
        }
        Ok(construct_from_extremal(&self.table()?)?)
    }

    /// One-line description used in CSV metadata.
    pub fn describe(&self) -> String {
        if let Some(f) = &self.family {
            return family_spec(f).map(|s| s.to_string()).unwrap_or_else(|_| "family".into());
        }
        if let Some(s) = &self.spectral {
            return format!("spectral({} atoms, {})", s.atoms.len(), s.reference_norm);
        }
        if let Some(p) = &self.polygon {
            return format!("polygon({} vertices)", p.vertices.len());
        }
        let ex = self.extremal.as_ref().expect("exactly one section");
        format!("extremal(d={}, {} entries)", ex.d, ex.theta.len())
    }
}

fn family_spec(f: &FamilySection) -> Result<FamilySpec, CliError> {
    if let Some(text) = &f.spec {
        if f.name.is_some() || f.d.is_some() || !f.params.is_empty() {
            return Err(CliError::Validation("[family]: give either spec or name/d/params, not both".into()));
        }
        return Ok(text.parse()?);
    }
    let Some(name) = &f.name else {
        return Err(CliError::Validation("[family] needs a name (or a spec string)".into()));
    };
    let mut parts = Vec::new();
    for (key, value) in &f.params {
        parts.push(format!("{key}={}", param_text(key, value)?));
    }
    if let Some(d) = f.d {
        parts.push(format!("d={d}"));
    }
    Ok(format!("{name}({})", parts.join(", ")).parse()?)
}

fn param_text(key: &str, v: &toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::Float(x) => Ok(format_float(*x)),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Array(rows) => {
            let mut out = Vec::new();
            for row in rows {
                let toml::Value::Array(cells) = row else {
                    return Err(CliError::Validation(format!("parameter {key}: expected an array of rows")));
                };
                let cells: Result<Vec<String>, CliError> = cells.iter().map(|c| param_text(key, c)).collect();
                out.push(cells?.join(" "));
            }
            Ok(format!("[{}]", out.join("; ")))
        }
        other => Err(CliError::Validation(format!("parameter {key}: unsupported value {other}"))),
    }
}

fn format_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// Parses `"1,3"` into sorted 0-based indices.
pub fn parse_subset(key: &str, d: usize) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in key.split(',') {
        let i: usize = part
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("subset '{key}': '{part}' is not an index")))?;
        if i == 0 || i > d {
            return Err(CliError::Validation(format!("subset '{key}': index {i} outside 1..={d}")));
        }
        out.push(i - 1);
    }
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Validation(format!("subset '{key}' repeats an index")));
    }
    Ok(out)
}

/// Sorted 1-based text form of a 0-based subset.
pub fn subset_text(subset: &[usize]) -> String {
    subset.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}
