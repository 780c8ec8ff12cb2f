use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CodeSpec, DecoderProfile, GridLayout, HardwareParams, Seconds};
use crate::error::{Error, Result};

/// One configuration document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub platforms: Vec<HardwareParams>,
    #[serde(default)]
    pub codes: Vec<CodeSpec>,
    #[serde(default)]
    pub decoders: Vec<DecoderProfile>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioDef>,
    #[serde(default)]
    pub distillation_search: DistillationSearch,
    #[serde(default)]
    pub case_studies: Vec<CaseStudyDef>,
}

/// A (platform, code, decoder) triple to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDef {
    pub name: String,
    pub platform: String,
    pub code: String,
    pub decoder: String,
    /// Number of code blocks (or surface patches). Defaults to one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<u32>,
    /// Total logical error p_L of a d-round memory experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical_error: Option<f64>,
    /// Measured cycle length. When absent it is computed from the platform
    /// (and the code layout for GB codes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_sec: Option<Seconds>,
    /// Use correlated decoding with this many rounds per logical operation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds_per_op: Option<u32>,
    /// Surface-code platforms to evaluate at the same p0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compare: Vec<Comparison>,
    /// Also size a magic-state factory for every row of this scenario.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub factory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comparison {
    pub platform: String,
    pub decoder: String,
    /// Distances searched when matching p0. Defaults to `[3, 51]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_range: Option<(u32, u32)>,
}

/// Parameter range for the one-level 15-to-1 protocol search (odd distances).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistillationSearch {
    pub d_min: u32,
    pub d_max: u32,
}

impl Default for DistillationSearch {
    fn default() -> Self {
        DistillationSearch { d_min: 3, d_max: 41 }
    }
}

/// How a case study's QLOPS value is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum QlopsRule {
    /// k / ((ceil(t_r / t_sec) + d) t_sec)
    LatticeSurgery {
        k: u32,
        t_r: Seconds,
        t_sec: Seconds,
        d: u32,
    },
    /// k / (rounds_per_op t_sec)
    Correlated {
        k: u32,
        t_sec: Seconds,
        #[serde(default = "one")]
        rounds_per_op: u32,
    },
    Given {
        qlops: f64,
    },
}

fn one() -> u32 {
    1
}

fn ten() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FootprintBlock {
    pub patches: u64,
    /// Surface-code distance of each patch (2d^2 - 1 qubits).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<u32>,
    /// Explicit per-patch qubit count, overriding `distance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_patch: Option<u64>,
}

/// One reading of "system size" used for a density figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FootprintDef {
    pub label: String,
    pub blocks: Vec<FootprintBlock>,
    /// A density value quoted elsewhere, shown next to the computed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quoted_density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseStudyDef {
    pub label: String,
    pub qlops: QlopsRule,
    pub runtime: Seconds,
    pub toffoli_count: f64,
    #[serde(default = "ten")]
    pub clifford_per_toffoli: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub footprints: Vec<FootprintDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Toml,
    Json,
}

impl ConfigFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ConfigFormat::Json,
            _ => ConfigFormat::Toml,
        }
    }
}

/// Reads, validates and normalizes a configuration file. Layout files are
/// resolved relative to the configuration file's directory.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config(&text, ConfigFormat::from_path(path), &base).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_config(text: &str, format: ConfigFormat, base_dir: &Path) -> Result<Config> {
    let parse_err = |message: String| Error::Parse {
        path: PathBuf::from("<config>"),
        message,
    };
    let mut config: Config = match format {
        ConfigFormat::Toml => toml::from_str(text).map_err(|e| parse_err(e.to_string()))?,
        ConfigFormat::Json => serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?,
    };
    for code in &mut config.codes {
        if let Some(file) = code.layout_file.take() {
            if code.layout.is_some() {
                return Err(Error::validation(format!(
                    "code `{}` sets both `layout` and `layout_file`",
                    code.id
                )));
            }
            code.layout = Some(GridLayout::from_path(&base_dir.join(file))?);
        }
    }
    config.validate()?;
    Ok(config)
}

fn unique<'a>(kind: &str, ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::validation(format!("duplicate {kind} `{id}`")));
        }
    }
    Ok(())
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        unique("platform", self.platforms.iter().map(|p| p.name.as_str()))?;
        unique("code", self.codes.iter().map(|c| c.id.as_str()))?;
        unique("decoder", self.decoders.iter().map(|d| d.id.as_str()))?;
        unique("scenario", self.scenarios.iter().map(|s| s.name.as_str()))?;
        unique("case study", self.case_studies.iter().map(|c| c.label.as_str()))?;

        self.platforms.iter().try_for_each(HardwareParams::validate)?;
        self.codes.iter().try_for_each(CodeSpec::validate)?;
        self.decoders.iter().try_for_each(DecoderProfile::validate)?;

        for s in &self.scenarios {
            let fail = |msg: &str| Err(Error::validation(format!("scenario `{}`: {msg}", s.name)));
            if let Some(p) = s.logical_error {
                if !(0.0..1.0).contains(&p) {
                    return fail(&format!(
                        "probability out of range: logical_error = {p} (must lie in [0, 1))"
                    ));
                }
            }
            if let Some(t) = s.t_sec {
                if !(t.0.is_finite() && t.0 > 0.0) {
                    return fail("t_sec must be > 0");
                }
            }
            if s.blocks == Some(0) || s.rounds_per_op == Some(0) {
                return fail("blocks and rounds_per_op must be >= 1");
            }
            for c in &s.compare {
                if let Some((lo, hi)) = c.d_range {
                    if lo < 1 || lo > hi {
                        return fail(&format!("empty comparison range [{lo}, {hi}]"));
                    }
                }
            }
        }

        let search = self.distillation_search;
        if search.d_min < 1 || search.d_min > search.d_max {
            return Err(Error::validation(format!(
                "distillation_search range [{}, {}] is empty",
                search.d_min, search.d_max
            )));
        }

        for cs in &self.case_studies {
            let positive = [cs.runtime.0, cs.toffoli_count, cs.clifford_per_toffoli]
                .iter()
                .all(|v| v.is_finite() && *v > 0.0);
            if !positive {
                return Err(Error::validation(format!(
                    "case study `{}`: runtime, toffoli_count and clifford_per_toffoli must be > 0",
                    cs.label
                )));
            }
        }
        Ok(())
    }

    pub fn platform(&self, name: &str) -> Result<&HardwareParams> {
        self.platforms
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownEntity {
                kind: "platform",
                id: name.to_string(),
            })
    }

    pub fn code(&self, id: &str) -> Result<&CodeSpec> {
        self.codes
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownEntity {
                kind: "code",
                id: id.to_string(),
            })
    }

    pub fn decoder(&self, id: &str) -> Result<&DecoderProfile> {
        self.decoders
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| Error::UnknownEntity {
                kind: "decoder",
                id: id.to_string(),
            })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }
}
