//! Scenario evaluation and reporting.
//!
//! A scenario names a platform, a code and a decoder. Its primary row is the
//! code itself; each comparison adds a row for a surface-code platform matched
//! to the same per-layer error rate, with one patch per logical qubit.

mod case_study;
mod emit;

pub use case_study::{cross_platform_ratio, evaluate_case_studies, runtime_lower_bound, CaseStudy, CaseStudyReport};
pub use emit::{
    emit_report, format_sig, render_csv, render_factory_csv, render_markdown, render_plot_data, ReportFormat,
    CSV_HEADER,
};

use serde::Serialize;

use crate::distillation::{plan_factory, FactoryPlan, FactoryRequest};
use crate::error::{Error, Result};
use crate::error_rates::{match_distance, p0_from_pl, Parity};
use crate::model::{
    CodeFamily, CodeSpec, Config, DecoderProfile, DistillationSearch, HardwareParams, PlatformKind, ScenarioDef,
    Seconds,
};
use crate::qlops::{
    logical_cycle, needs_parallel_decoder, physical_qubits, qlops_correlated, qlops_density, LogicalCycle,
};
use crate::sec::{atom_surface_sec_length, schedule_gb_sec, surface_sec_length};

/// Default distance window for matched comparisons.
pub const MATCH_RANGE: (u32, u32) = (3, 51);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowRole {
    Primary,
    Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub role: RowRole,
    pub platform: String,
    pub code: String,
    /// Logical qubits across all blocks.
    pub k: u32,
    pub distance: u32,
    pub p0: f64,
    pub t_sec: Seconds,
    pub t_r: Seconds,
    pub logical_cycles: u64,
    pub physical_qubits: u64,
    pub qlops: f64,
    pub density: f64,
    /// QLOPS with one more decoder-wait cycle, when `t_r / t_sec` is on an
    /// integer boundary.
    pub boundary_qlops: Option<f64>,
    pub parallel_decoder: bool,
    pub factory: Option<FactoryPlan>,
    pub notes: Vec<String>,
}

impl ScenarioResult {
    pub fn boundary_density(&self) -> Option<f64> {
        self.boundary_qlops.map(|q| q / self.physical_qubits as f64)
    }
}

/// Inputs for one row beyond the three entities.
#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub scenario: String,
    /// Blocks of the code (patches for surface codes).
    pub blocks: u32,
    /// Per-layer error rate; derived from `logical_error` or the platform fit when absent.
    pub p0: Option<f64>,
    pub logical_error: Option<f64>,
    pub t_sec: Option<Seconds>,
    pub rounds_per_op: Option<u32>,
    /// Size a factory against this target p0.
    pub factory_target: Option<f64>,
    pub search: DistillationSearch,
}

/// Cycle length of `code` on `hw`.
pub fn cycle_length(hw: &HardwareParams, code: &CodeSpec) -> Result<Seconds> {
    match (hw.kind, code.family) {
        (PlatformKind::Superconducting, CodeFamily::SurfacePatch) => Ok(surface_sec_length(hw)),
        (PlatformKind::NeutralAtom, CodeFamily::SurfacePatch) => atom_surface_sec_length(hw, code.d),
        (PlatformKind::NeutralAtom, CodeFamily::GbGrid) => match &code.layout {
            Some(layout) => Ok(schedule_gb_sec(layout, hw)?.total),
            None => Err(Error::validation(format!(
                "code `{}` has no layout; give the scenario a measured t_sec",
                code.id
            ))),
        },
        (PlatformKind::Superconducting, CodeFamily::GbGrid) => Err(Error::validation(format!(
            "no cycle model for GB code `{}` on superconducting platform `{}`; give a measured t_sec",
            code.id, hw.name
        ))),
    }
}

/// Cycle length of the surface-code patches used for distillation on `hw`.
fn distillation_cycle(hw: &HardwareParams, protocol_distance: u32) -> Result<Seconds> {
    match hw.kind {
        PlatformKind::Superconducting => Ok(surface_sec_length(hw)),
        PlatformKind::NeutralAtom => atom_surface_sec_length(hw, protocol_distance),
    }
}

fn decoder_notes(decoder: &DecoderProfile) -> Vec<String> {
    let anomalies = decoder.monotonicity_anomalies();
    if anomalies.is_empty() {
        return Vec::new();
    }
    log::warn!(
        "decoder `{}`: reaction time decreases with distance after d = {anomalies:?}",
        decoder.id
    );
    vec![format!("decoder `{}` non-monotone at d = {anomalies:?}", decoder.id)]
}

/// Evaluates one (platform, code, decoder) row.
pub fn evaluate_scenario(
    hw: &HardwareParams,
    code: &CodeSpec,
    decoder: &DecoderProfile,
    opts: &EvalOptions,
) -> Result<ScenarioResult> {
    let blocks = opts.blocks.max(1);
    let k = code.k * blocks;
    let p0 = match (opts.p0, opts.logical_error, &hw.surface_fit) {
        (Some(p0), _, _) => p0,
        (None, Some(p_l), _) => p0_from_pl(p_l, code.k, code.d)?,
        (None, None, Some(fit)) if code.family == CodeFamily::SurfacePatch => fit.p0(code.d),
        _ => {
            return Err(Error::validation(format!(
                "cannot determine p0 for code `{}` on `{}`: give logical_error or a surface fit",
                code.id, hw.name
            )))
        }
    };
    let t_sec = match opts.t_sec {
        Some(t) => t,
        None => cycle_length(hw, code)?,
    };
    // Correlated decoding does not wait for the decoder between operations.
    let t_r = match (decoder.reaction_time(&code.id, code.d), opts.rounds_per_op) {
        (Some(t_r), _) => t_r,
        (None, Some(_)) => Seconds::ZERO,
        (None, None) => {
            return Err(Error::validation(format!(
                "decoder `{}` has no reaction time for code `{}` or distance {}",
                decoder.id, code.id, code.d
            )))
        }
    };

    let mut notes = decoder_notes(decoder);
    let (qlops, cycle, boundary_qlops) = match opts.rounds_per_op {
        Some(rounds) => {
            let q = qlops_correlated(k, t_sec, rounds)?;
            let cycle = LogicalCycle {
                cycles: u64::from(rounds),
                t_sec,
                duration: Seconds(f64::from(rounds) * t_sec.0),
                boundary_alternate: None,
            };
            (q, cycle, None)
        }
        None => {
            let cycle = logical_cycle(t_r, t_sec, code.d)?;
            let k = f64::from(k);
            (k / cycle.duration.0, cycle, cycle.alternate_duration().map(|t| k / t.0))
        }
    };
    if let Some(alt) = cycle.boundary_alternate {
        notes.push(format!(
            "t_r / t_sec on an integer boundary: {} cycles primary, {alt} alternate",
            cycle.cycles
        ));
    }
    let parallel_decoder = needs_parallel_decoder(t_r, code.d, t_sec);
    let n_phys = physical_qubits(code, u64::from(blocks));

    let factory = match opts.factory_target {
        Some(target) => {
            let fit = hw.surface_fit.as_ref().ok_or_else(|| {
                Error::validation(format!("platform `{}` needs a surface_fit to size a factory", hw.name))
            })?;
            let t_sec_dist = distillation_cycle(hw, opts.search.d_max)?;
            Some(plan_factory(&FactoryRequest {
                k,
                fit,
                injection_error: hw.injection_error(),
                comp_cycle: &cycle,
                t_sec_dist,
                target_p0: target,
                search: opts.search,
            })?)
        }
        None => None,
    };

    Ok(ScenarioResult {
        scenario: opts.scenario.clone(),
        role: RowRole::Primary,
        platform: hw.name.clone(),
        code: code.id.clone(),
        k,
        distance: code.d,
        p0,
        t_sec,
        t_r,
        logical_cycles: cycle.cycles,
        physical_qubits: n_phys,
        qlops,
        density: qlops_density(qlops, n_phys)?,
        boundary_qlops,
        parallel_decoder,
        factory,
        notes,
    })
}

/// Primary row plus matched comparison rows of one configured scenario.
pub fn run_scenario(config: &Config, def: &ScenarioDef) -> Result<Vec<ScenarioResult>> {
    let inner = || -> Result<Vec<ScenarioResult>> {
        let hw = config.platform(&def.platform)?;
        let code = config.code(&def.code)?;
        let decoder = config.decoder(&def.decoder)?;
        let mut opts = EvalOptions {
            scenario: def.name.clone(),
            blocks: def.blocks.unwrap_or(1),
            p0: None,
            logical_error: def.logical_error,
            t_sec: def.t_sec,
            rounds_per_op: def.rounds_per_op,
            factory_target: None,
            search: config.distillation_search,
        };
        // The primary p0 is the factory target of every row.
        let primary = evaluate_scenario(hw, code, decoder, &opts)?;
        let target = primary.p0;
        opts.factory_target = def.factory.then_some(target);
        let primary = if def.factory {
            evaluate_scenario(hw, code, decoder, &opts)?
        } else {
            primary
        };

        let mut rows = vec![primary];
        for cmp in &def.compare {
            let hw = config.platform(&cmp.platform)?;
            let decoder = config.decoder(&cmp.decoder)?;
            let fit = hw
                .surface_fit
                .as_ref()
                .ok_or_else(|| Error::validation(format!("comparison platform `{}` has no surface_fit", hw.name)))?;
            let d = match_distance(fit, target, cmp.d_range.unwrap_or(MATCH_RANGE), Parity::Odd)?;
            let patch = CodeSpec::surface(d);
            let row_opts = EvalOptions {
                scenario: def.name.clone(),
                blocks: rows[0].k,
                p0: Some(target),
                logical_error: None,
                t_sec: None,
                rounds_per_op: None,
                factory_target: opts.factory_target,
                search: config.distillation_search,
            };
            let mut row = evaluate_scenario(hw, &patch, decoder, &row_opts)?;
            row.role = RowRole::Comparison;
            if !fit.covers(d) {
                row.notes
                    .push(format!("matched distance {d} lies outside the fit range"));
            }
            rows.push(row);
        }
        Ok(rows)
    };
    inner().map_err(|e| e.in_scenario(&def.name))
}

/// Runs every scenario, or only the named one.
pub fn run_scenarios(config: &Config, only: Option<&str>) -> Result<Vec<ScenarioResult>> {
    let selected: Vec<&ScenarioDef> = match only {
        Some(name) => vec![config
            .scenarios
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownEntity {
                kind: "scenario",
                id: name.to_string(),
            })?],
        None => config.scenarios.iter().collect(),
    };
    let mut rows = Vec::new();
    for def in selected {
        rows.extend(run_scenario(config, def)?);
    }
    Ok(rows)
}
