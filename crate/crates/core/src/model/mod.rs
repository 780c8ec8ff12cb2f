//! Domain types shared by every other module, and configuration ingestion.
//!
//! All durations are held as [`Seconds`]. Lengths are micrometers and AOD
//! accelerations micrometers per microsecond squared.

mod config;
mod layout;
mod units;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use config::{
    load_config, parse_config, CaseStudyDef, Comparison, Config, ConfigFormat, DistillationSearch, FootprintBlock,
    FootprintDef, QlopsRule, ScenarioDef,
};
pub use layout::{Check, GridLayout, Rect, Site};
pub use units::{DurationParseError, Seconds};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlatformKind {
    Superconducting,
    NeutralAtom,
}

/// Timing and error parameters of a physical platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareParams {
    pub name: String,
    pub kind: PlatformKind,
    pub coherence_time: Seconds,
    pub gate_time_1q: Seconds,
    pub gate_time_2q: Seconds,
    pub infid_1q: f64,
    pub infid_2q: f64,
    pub readout_time: Seconds,
    pub readout_error: f64,
    #[serde(default)]
    pub prep_time: Seconds,
    pub prep_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub movement_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unintended_error: Option<f64>,
    /// AOD acceleration a_p in um/us^2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub movement_accel: Option<f64>,
    /// Trap lattice spacing in um.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_spacing: Option<f64>,
    /// Per-round logical error of a surface-code patch on this platform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_fit: Option<FitModel>,
    /// Error of an injected pi/8 rotation in distillation. Defaults to `infid_1q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection_error: Option<f64>,
}

/// Motion parameters of a neutral-atom platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomMotion {
    pub accel: f64,
    pub lattice_spacing: f64,
}

fn check_time(errors: &mut Vec<String>, field: &str, t: Seconds) {
    if !(t.0.is_finite() && t.0 >= 0.0) {
        errors.push(format!(
            "time out of range: {field} = {} (must be finite and >= 0)",
            t.0
        ));
    }
}

fn check_prob(errors: &mut Vec<String>, field: &str, p: f64) {
    if !(0.0..=1.0).contains(&p) {
        errors.push(format!("probability out of range: {field} = {p} (must lie in [0, 1])"));
    }
}

impl HardwareParams {
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        for (field, t) in [
            ("coherence_time", self.coherence_time),
            ("gate_time_1q", self.gate_time_1q),
            ("gate_time_2q", self.gate_time_2q),
            ("readout_time", self.readout_time),
            ("prep_time", self.prep_time),
        ] {
            check_time(&mut errors, field, t);
        }
        for (field, p) in [
            ("infid_1q", self.infid_1q),
            ("infid_2q", self.infid_2q),
            ("readout_error", self.readout_error),
            ("prep_error", self.prep_error),
        ] {
            check_prob(&mut errors, field, p);
        }
        if let Some(p) = self.injection_error {
            check_prob(&mut errors, "injection_error", p);
        }

        let atom_fields = [
            ("movement_error", self.movement_error),
            ("unintended_error", self.unintended_error),
            ("movement_accel", self.movement_accel),
            ("lattice_spacing", self.lattice_spacing),
        ];
        match self.kind {
            PlatformKind::NeutralAtom => {
                for (field, value) in atom_fields {
                    if value.is_none() {
                        errors.push(format!("neutral-atom platform is missing `{field}`"));
                    }
                }
                for (field, p) in [
                    ("movement_error", self.movement_error),
                    ("unintended_error", self.unintended_error),
                ] {
                    if let Some(p) = p {
                        check_prob(&mut errors, field, p);
                    }
                }
                if let Some(a) = self.movement_accel {
                    if !(a.is_finite() && a > 0.0) {
                        errors.push(format!("movement_accel must be > 0, got {a}"));
                    }
                }
                if let Some(s) = self.lattice_spacing {
                    if !(s.is_finite() && s >= 0.0) {
                        errors.push(format!("lattice_spacing must be >= 0, got {s}"));
                    }
                }
            }
            PlatformKind::Superconducting => {
                for (field, value) in atom_fields {
                    if value.is_some() {
                        errors.push(format!(
                            "neutral-atom-only field `{field}` set on superconducting platform"
                        ));
                    }
                }
            }
        }
        if let Some(fit) = &self.surface_fit {
            if let Err(e) = fit.validate() {
                errors.push(format!("surface_fit: {e}"));
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "platform `{}`: {}",
                self.name,
                errors.join("; ")
            )))
        }
    }

    /// AOD parameters, available on neutral-atom platforms only.
    pub fn atom_motion(&self) -> Result<AtomMotion> {
        match (self.kind, self.movement_accel, self.lattice_spacing) {
            (PlatformKind::NeutralAtom, Some(accel), Some(lattice_spacing)) => {
                Ok(AtomMotion { accel, lattice_spacing })
            }
            _ => Err(Error::domain(format!(
                "platform `{}` is not a neutral-atom platform with motion parameters",
                self.name
            ))),
        }
    }

    pub fn injection_error(&self) -> f64 {
        self.injection_error.unwrap_or(self.infid_1q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeFamily {
    SurfacePatch,
    GbGrid,
}

/// An [[n, k, d]] code with its qubit accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub id: String,
    pub n: u32,
    pub k: u32,
    pub d: u32,
    pub family: CodeFamily,
    /// Layout file, resolved relative to the configuration file at load time.
    #[serde(default, skip_serializing)]
    pub layout_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<GridLayout>,
}

impl CodeSpec {
    pub fn surface(d: u32) -> Self {
        CodeSpec {
            id: format!("surface-d{d}"),
            n: d * d,
            k: 1,
            d,
            family: CodeFamily::SurfacePatch,
            layout_file: None,
            layout: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::validation(format!("code `{}`: {msg}", self.id)));
        if self.k < 1 || self.n < self.k {
            return fail(format!("require n >= k >= 1, got n = {}, k = {}", self.n, self.k));
        }
        if self.d < 1 {
            return fail("require d >= 1".to_string());
        }
        match self.family {
            CodeFamily::SurfacePatch => {
                if self.n != self.d * self.d {
                    return fail(format!(
                        "surface patch needs n = d^2, got n = {}, d = {}",
                        self.n, self.d
                    ));
                }
                if self.layout.is_some() || self.layout_file.is_some() {
                    return fail("layouts are only meaningful for gb-grid codes".to_string());
                }
            }
            CodeFamily::GbGrid => {
                if let Some(layout) = &self.layout {
                    layout
                        .validate()
                        .map_err(|e| Error::validation(format!("code `{}` layout: {e}", self.id)))?;
                    if layout.data.len() as u32 != self.n {
                        return fail(format!(
                            "layout has {} data positions but n = {}",
                            layout.data.len(),
                            self.n
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Physical qubits (data plus ancilla) of one block of this code.
    pub fn block_qubits(&self) -> u64 {
        let d = u64::from(self.d);
        match self.family {
            CodeFamily::SurfacePatch => 2 * d * d - 1,
            CodeFamily::GbGrid => 2 * u64::from(self.n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodingMode {
    /// Decoding with Z syndromes only.
    ZOnly,
    /// Decoding with both X and Z syndromes.
    AllSyndromes,
}

/// One reaction-time measurement keyed by a code id or by a surface-code distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<u32>,
    pub t_r: Seconds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderProfile {
    pub id: String,
    pub mode: DecodingMode,
    pub entries: Vec<ReactionEntry>,
}

impl DecoderProfile {
    pub fn validate(&self) -> Result<()> {
        for entry in &self.entries {
            if entry.code.is_some() == entry.distance.is_some() {
                return Err(Error::validation(format!(
                    "decoder `{}`: each entry needs exactly one of `code` or `distance`",
                    self.id
                )));
            }
            if !(entry.t_r.0.is_finite() && entry.t_r.0 > 0.0) {
                return Err(Error::validation(format!(
                    "decoder `{}`: reaction time must be > 0, got {}",
                    self.id, entry.t_r
                )));
            }
        }
        Ok(())
    }

    /// Reaction time for a code, looked up by code id first and then by distance.
    pub fn reaction_time(&self, code_id: &str, distance: u32) -> Option<Seconds> {
        self.entries
            .iter()
            .find(|e| e.code.as_deref() == Some(code_id))
            .or_else(|| self.entries.iter().find(|e| e.distance == Some(distance)))
            .map(|e| e.t_r)
    }

    pub fn by_distance(&self) -> BTreeMap<u32, Seconds> {
        self.entries
            .iter()
            .filter_map(|e| e.distance.map(|d| (d, e.t_r)))
            .collect()
    }

    /// Distances whose reaction time exceeds that of some larger distance.
    ///
    /// Decoding time grows with distance, so such entries usually indicate a
    /// transcription problem in the source data.
    pub fn monotonicity_anomalies(&self) -> Vec<u32> {
        let table: Vec<_> = self.by_distance().into_iter().collect();
        table
            .iter()
            .enumerate()
            .filter(|(i, (_, t))| table[i + 1..].iter().any(|(_, later)| later.0 < t.0))
            .map(|(_, (d, _))| *d)
            .collect()
    }
}

/// Log-linear model of the per-round logical error: `ln p0(d) = intercept + slope * d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitModel {
    pub intercept: f64,
    pub slope: f64,
    /// Distances the fit was calibrated on, inclusive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(u32, u32)>,
}

impl FitModel {
    pub fn new(intercept: f64, slope: f64) -> Self {
        FitModel {
            intercept,
            slope,
            range: None,
        }
    }

    /// A code with no logical errors at any distance.
    pub fn noiseless() -> Self {
        FitModel::new(f64::NEG_INFINITY, -1.0)
    }

    pub fn with_range(mut self, min: u32, max: u32) -> Self {
        self.range = Some((min, max));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slope.is_finite() && self.slope < 0.0) {
            return Err(Error::validation(format!(
                "fit slope must be finite and negative (sub-threshold), got {}",
                self.slope
            )));
        }
        if self.intercept.is_nan() || self.intercept == f64::INFINITY {
            return Err(Error::validation(format!(
                "fit intercept must be finite, got {}",
                self.intercept
            )));
        }
        if let Some((lo, hi)) = self.range {
            if lo < 1 || lo > hi {
                return Err(Error::validation(format!("fit range [{lo}, {hi}] is empty")));
            }
        }
        Ok(())
    }

    pub fn covers(&self, d: u32) -> bool {
        self.range.is_none_or(|(lo, hi)| (lo..=hi).contains(&d))
    }
}
