//! JSON diagram documents.
//!
//! ```json
//! {
//!   "levels": [[{"size": 1, "base": "interval"}], [{"size": 2, "base": "interval"}]],
//!   "bundles": [{"level": 1, "from": 1, "to": 1, "labels": ["id", "const(1/2)"]}],
//!   "repeat": true
//! }
//! ```
//!
//! Levels and summands are numbered from 1. A bundle at `level` L joins
//! summand `from` of level L to summand `to` of level L+1.
//!
//! Label descriptors: `id`, `tent`, `g` (t/2), `h` ((t+1)/2), `const(c)`
//! and `pl(x0:y0, x1:y1, …)` with fraction strings.

use bratteli_core::diagram::{Base, EdgeBundle, LabeledBratteliDiagram, SummandShape};
use bratteli_core::interval_maps::{LabelKind, PLMap};
use bratteli_core::rational::{format_fraction, parse_fraction};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSpec {
    pub levels: Vec<Vec<SummandSpec>>,
    pub bundles: Vec<BundleSpec>,
    #[serde(default)]
    pub repeat: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandSpec {
    pub size: u64,
    pub base: Base,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub level: usize,
    pub from: usize,
    pub to: usize,
    pub labels: Vec<String>,
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses a label descriptor.
pub fn parse_label(text: &str) -> Result<PLMap, String> {
    let t = text.trim();
    let inner = |prefix: &str| {
        t.strip_prefix(prefix)
            .and_then(|r| r.strip_suffix(')'))
            .map(str::trim)
    };
    match t {
        "id" => return Ok(PLMap::identity()),
        "tent" => return Ok(PLMap::tent()),
        "g" => return Ok(PLMap::half_lower()),
        "h" => return Ok(PLMap::half_upper()),
        _ => {}
    }
    if let Some(c) = inner("const(") {
        let c = parse_fraction(c).map_err(|e| e.to_string())?;
        return PLMap::constant(c).map_err(|e| e.to_string());
    }
    if let Some(body) = inner("pl(") {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for pair in body.split(',') {
            let (x, y) = pair
                .split_once(':')
                .ok_or_else(|| format!("breakpoint {:?} is not of the form x:y", pair.trim()))?;
            xs.push(parse_fraction(x).map_err(|e| e.to_string())?);
            ys.push(parse_fraction(y).map_err(|e| e.to_string())?);
        }
        return PLMap::new(xs, ys).map_err(|e| e.to_string());
    }
    Err(format!(
        "unknown label {t:?} (expected id, tent, g, h, const(c) or pl(x:y, ...))"
    ))
}

/// Canonical descriptor; `parse_label(&format_label(m)) == m`.
pub fn format_label(m: &PLMap) -> String {
    match m.kind() {
        LabelKind::General => {
            let pairs: Vec<String> = m
                .breakpoints()
                .iter()
                .zip(m.values())
                .map(|(x, y)| format!("{}:{}", format_fraction(x), format_fraction(y)))
                .collect();
            format!("pl({})", pairs.join(", "))
        }
        _ => m.short_name(),
    }
}

impl DiagramSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    /// Converts to a diagram without structural validation.
    pub fn to_diagram_unchecked(&self) -> Result<LabeledBratteliDiagram, CliError> {
        let levels = self
            .levels
            .iter()
            .map(|l| l.iter().map(|s| SummandShape { base: s.base, size: s.size }).collect())
            .collect();
        let mut bundles = Vec::with_capacity(self.bundles.len());
        for (k, b) in self.bundles.iter().enumerate() {
            let one_based = |name: &str, v: usize| {
                v.checked_sub(1)
                    .ok_or_else(|| field_error(format!("bundles[{k}].{name}"), "numbering starts at 1"))
            };
            let labels = b
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| parse_label(l).map_err(|m| field_error(format!("bundles[{k}].labels[{i}]"), m)))
                .collect::<Result<Vec<_>, _>>()?;
            bundles.push(EdgeBundle {
                level: one_based("level", b.level)?,
                source: one_based("from", b.from)?,
                target: one_based("to", b.to)?,
                labels,
            });
        }
        Ok(LabeledBratteliDiagram::from_parts(levels, bundles, self.repeat))
    }

    pub fn to_diagram(&self) -> Result<LabeledBratteliDiagram, CliError> {
        let d = self.to_diagram_unchecked()?;
        let v = d.validate();
        if v.is_empty() {
            Ok(d)
        } else {
            Err(CliError::Invalid(v))
        }
    }

    pub fn from_diagram(d: &LabeledBratteliDiagram) -> Self {
        DiagramSpec {
            levels: d
                .levels()
                .iter()
                .map(|l| l.iter().map(|s| SummandSpec { size: s.size, base: s.base }).collect())
                .collect(),
            bundles: d
                .bundles()
                .iter()
                .map(|b| BundleSpec {
                    level: b.level + 1,
                    from: b.source + 1,
                    to: b.target + 1,
                    labels: b.labels.iter().map(format_label).collect(),
                })
                .collect(),
            repeat: d.repeats(),
        }
    }
}

/// Parses and validates a diagram document.
pub fn parse_spec(text: &str) -> Result<LabeledBratteliDiagram, CliError> {
    DiagramSpec::from_json(text)?.to_diagram()
}

/// Canonical document text for a diagram.
pub fn serialize_spec(d: &LabeledBratteliDiagram) -> String {
    DiagramSpec::from_diagram(d).to_json()
}
