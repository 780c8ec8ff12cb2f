//! One-level 15-to-1 magic-state factories.
//!
//! A unit with protocol `(d_X, d_Z, d_m)` occupies
//! `2 (d_X + 4 d_Z) 3 d_X + 4 d_m` physical qubits and runs `6 d_m` code
//! cycles per attempt; post-selection stretches that to `6 d_m / p_accept`
//! on average. Enough units are built to deliver one magic state per logical
//! qubit per logical cycle of the computation.
//!
//! Output error and acceptance come from [`sim`], with per-cycle logical error
//! rates taken from the platform's surface-code fit:
//!
//! * check-qubit storage: Z at `(d_X / d_Z) p0(d_Z)`, X at `(d_Z / d_X) p0(d_X)`
//!   per cycle (boundary length ratio times per-patch rate);
//! * output-qubit storage: Z and X at `p0(d_X)` per cycle;
//! * multi-patch measurement over `d_m` cycles: time-like failure
//!   `q_meas = (d_X + 4 d_Z) / d_m * p0(d_m)`;
//! * injected rotations: the platform's injection error.

pub mod sim;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DistillationSearch, FitModel, Seconds};
use crate::qlops::LogicalCycle;
use sim::{simulate, NoiseParams};

/// Cycles of one attempt, before post-selection, per unit of `d_m`.
const STEPS_PER_DM: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DistillationProtocol {
    pub d_x: u32,
    pub d_z: u32,
    pub d_m: u32,
}

impl DistillationProtocol {
    pub fn new(d_x: u32, d_z: u32, d_m: u32) -> Self {
        DistillationProtocol { d_x, d_z, d_m }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_x == 0 || self.d_z == 0 || self.d_m == 0 {
            return Err(Error::domain(format!("protocol distances must be >= 1, got {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for DistillationProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(15-to-1)_{{{},{},{}}}", self.d_x, self.d_z, self.d_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactoryPlan {
    pub protocol: DistillationProtocol,
    pub p_out: f64,
    pub p_accept: f64,
    pub unit_qubits: u64,
    pub expected_cycles: f64,
    pub t_unit: Seconds,
    pub units: u64,
    pub total_qubits: u64,
}

pub fn unit_qubits(p: &DistillationProtocol) -> u64 {
    let (x, z, m) = (u64::from(p.d_x), u64::from(p.d_z), u64::from(p.d_m));
    2 * (x + 4 * z) * 3 * x + 4 * m
}

pub fn expected_cycles(p: &DistillationProtocol, p_accept: f64) -> Result<f64> {
    if !(p_accept > 0.0 && p_accept <= 1.0) {
        return Err(Error::domain(format!(
            "acceptance probability must lie in (0, 1], got {p_accept}"
        )));
    }
    Ok(f64::from(STEPS_PER_DM * p.d_m) / p_accept)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistillationError {
    pub p_out: f64,
    pub p_accept: f64,
}

/// Error sources of one unit, from the fit and the injection error.
pub fn noise_params(p: &DistillationProtocol, fit: &FitModel, injection_error: f64) -> NoiseParams {
    let (x, z, m) = (f64::from(p.d_x), f64::from(p.d_z), f64::from(p.d_m));
    let (px, pz, pm) = (fit.p0(p.d_x), fit.p0(p.d_z), fit.p0(p.d_m));
    let check_z = x / z * pz;
    let check_x = z / x * px;
    NoiseParams {
        p_inj: injection_error,
        q_meas: (x + 4.0 * z) / m * pm,
        idle_z: [check_z, check_z, check_z, check_z, px],
        idle_x: [check_x, check_x, check_x, check_x, px],
        cycles_per_step: p.d_m,
    }
}

/// Output infidelity and acceptance probability of one unit.
pub fn distillation_error(p: &DistillationProtocol, fit: &FitModel, injection_error: f64) -> Result<DistillationError> {
    p.validate()?;
    if !(0.0..=1.0).contains(&injection_error) {
        return Err(Error::domain(format!(
            "injection error must lie in [0, 1], got {injection_error}"
        )));
    }
    if let Some((min, max)) = fit.range {
        for distance in [p.d_x, p.d_z, p.d_m] {
            if !fit.covers(distance) {
                return Err(Error::ModelRange { distance, min, max });
            }
        }
    }
    let out = simulate(&noise_params(p, fit, injection_error));
    Ok(DistillationError {
        p_out: out.p_out,
        p_accept: out.p_accept,
    })
}

/// `ceil(k t_unit / T_L)`, at least one. Ratios within 1e-9 relative of an
/// integer count as that integer.
pub fn units_needed(k: u32, t_unit: Seconds, t_logical: Seconds) -> Result<u64> {
    if k == 0 || !(t_unit.0 > 0.0) || !(t_logical.0 > 0.0) {
        return Err(Error::domain("units_needed needs k >= 1 and positive durations"));
    }
    let ratio = f64::from(k) * t_unit.0 / t_logical.0;
    let nearest = ratio.round();
    let units = if (ratio - nearest).abs() <= 1e-9 * nearest {
        nearest
    } else {
        ratio.ceil()
    };
    Ok((units as u64).max(1))
}

/// Everything needed to size a factory for one computational block.
#[derive(Debug, Clone, Copy)]
pub struct FactoryRequest<'a> {
    /// Logical qubits to feed.
    pub k: u32,
    pub fit: &'a FitModel,
    pub injection_error: f64,
    pub comp_cycle: &'a LogicalCycle,
    /// Code-cycle length of the distillation patches.
    pub t_sec_dist: Seconds,
    pub target_p0: f64,
    pub search: DistillationSearch,
}

fn odd_range(search: &DistillationSearch) -> impl Iterator<Item = u32> + Clone {
    let start = search.d_min | 1;
    (start..=search.d_max).step_by(2)
}

/// Smallest factory over odd protocol distances in the search range with
/// `p_out <= target_p0`. Ties go to fewer expected cycles, then to the
/// lexicographically smallest `(d_X, d_Z, d_m)`.
pub fn plan_factory(req: &FactoryRequest<'_>) -> Result<FactoryPlan> {
    if !(req.target_p0 > 0.0) {
        return Err(Error::domain(format!("target p0 must be > 0, got {}", req.target_p0)));
    }
    if req.search.d_min > req.search.d_max {
        return Err(Error::validation("empty distillation search range"));
    }
    let t_l = req.comp_cycle.duration;

    // Lower bound per protocol: acceptance 1.
    let mut candidates = Vec::new();
    for d_x in odd_range(&req.search) {
        for d_z in odd_range(&req.search) {
            for d_m in odd_range(&req.search) {
                let p = DistillationProtocol::new(d_x, d_z, d_m);
                if ![d_x, d_z, d_m].iter().all(|d| req.fit.covers(*d)) {
                    continue;
                }
                let t_min = Seconds(f64::from(STEPS_PER_DM * d_m) * req.t_sec_dist.0);
                let bound = unit_qubits(&p) * units_needed(req.k, t_min, t_l)?;
                candidates.push((bound, p));
            }
        }
    }
    candidates.sort();

    let mut best: Option<FactoryPlan> = None;
    let mut evaluated = 0usize;
    for (bound, protocol) in candidates {
        if best.is_some_and(|b| bound > b.total_qubits) {
            break;
        }
        evaluated += 1;
        let err = distillation_error(&protocol, req.fit, req.injection_error)?;
        if err.p_out > req.target_p0 || err.p_accept <= 0.0 {
            continue;
        }
        let cycles = expected_cycles(&protocol, err.p_accept)?;
        let t_unit = Seconds(cycles * req.t_sec_dist.0);
        let units = units_needed(req.k, t_unit, t_l)?;
        let per_unit = unit_qubits(&protocol);
        let plan = FactoryPlan {
            protocol,
            p_out: err.p_out,
            p_accept: err.p_accept,
            unit_qubits: per_unit,
            expected_cycles: cycles,
            t_unit,
            units,
            total_qubits: units * per_unit,
        };
        let key = |p: &FactoryPlan| (p.total_qubits, p.expected_cycles, p.protocol);
        if best.is_none_or(|b| key(&plan).partial_cmp(&key(&b)) == Some(std::cmp::Ordering::Less)) {
            best = Some(plan);
        }
    }
    log::debug!("factory search evaluated {evaluated} protocols");
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no 15-to-1 protocol with odd distances in [{}, {}] reaches p_out <= {:e}",
            req.search.d_min, req.search.d_max, req.target_p0
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlops::logical_cycle;

    /// Published protocols with their unit sizes.
    const FOOTPRINTS: [((u32, u32, u32), u64); 18] = [
        ((9, 3, 3), 1146),
        ((23, 9, 9), 8178),
        ((7, 3, 3), 810),
        ((11, 3, 3), 1530),
        ((29, 9, 11), 11354),
        ((9, 3, 3), 1146),
        ((11, 5, 3), 2058),
        ((29, 11, 11), 12746),
        ((11, 3, 5), 1538),
        ((11, 3, 5), 1538),
        ((31, 11, 11), 13994),
        ((11, 3, 5), 1538),
        ((15, 5, 5), 3170),
        ((39, 17, 15), 25098),
        ((13, 5, 5), 2594),
        ((9, 3, 3), 1146),
        ((25, 11, 9), 10386),
        ((9, 3, 3), 1146),
    ];

    fn atom_fit() -> FitModel {
        FitModel::new(-5.184, -1.2057)
    }

    #[test]
    fn footprints() {
        for ((x, z, m), qubits) in FOOTPRINTS {
            assert_eq!(
                unit_qubits(&DistillationProtocol::new(x, z, m)),
                qubits,
                "({x},{z},{m})"
            );
        }
        assert_eq!(unit_qubits(&DistillationProtocol::new(3, 3, 3)), 282);
    }

    #[test]
    fn cycles() {
        let p = DistillationProtocol::new(23, 9, 9);
        assert_eq!(expected_cycles(&DistillationProtocol::new(9, 3, 3), 1.0).unwrap(), 18.0);
        assert!((expected_cycles(&p, 54.0 / 58.0795).unwrap() - 58.0795).abs() < 1e-9);
        assert!(expected_cycles(&p, 0.0).is_err());
    }

    #[test]
    fn units() {
        let u = units_needed(12, Seconds(58.0795 * 8.6e-7), Seconds(3.268e-5)).unwrap();
        assert_eq!(u, 19);
        let u = units_needed(12, Seconds(18.6403 * 4.0e-7), Seconds(2.4e-6)).unwrap();
        assert_eq!(u, 38);
        assert_eq!(units_needed(12, Seconds(1e-9), Seconds(1.0)).unwrap(), 1);
        // Exactly 3 despite floating-point noise in the ratio.
        assert_eq!(units_needed(3, Seconds(0.1 + 0.2), Seconds(0.3)).unwrap(), 3);
    }

    #[test]
    fn noiseless_fit_gives_perfect_output() {
        let p = DistillationProtocol::new(9, 3, 3);
        let e = distillation_error(&p, &FitModel::noiseless(), 0.0).unwrap();
        assert!(e.p_out < 1e-15);
        assert!((e.p_accept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn model_range_is_enforced() {
        let fit = atom_fit().with_range(3, 21);
        let err = distillation_error(&DistillationProtocol::new(23, 9, 9), &fit, 1e-4).unwrap_err();
        assert!(matches!(err, Error::ModelRange { distance: 23, .. }));
    }

    #[test]
    fn calibrated_atom_fit_tracks_first_table_row() {
        let e = distillation_error(&DistillationProtocol::new(9, 3, 3), &atom_fit(), 1e-4).unwrap();
        let ratio = e.p_out / 2.3317e-6;
        assert!((1.0 / 3.0..=3.0).contains(&ratio), "{}", e.p_out);
        let cycles = expected_cycles(&DistillationProtocol::new(9, 3, 3), e.p_accept).unwrap();
        assert!((cycles / 18.6423 - 1.0).abs() < 0.02, "{cycles}");
    }

    #[test]
    fn loose_target_selects_the_smallest_unit() {
        let cycle = logical_cycle(Seconds(0.0), Seconds(1.0), 3).unwrap();
        let fit = atom_fit();
        let req = FactoryRequest {
            k: 1,
            fit: &fit,
            injection_error: 1e-4,
            comp_cycle: &cycle,
            t_sec_dist: Seconds(1e-6),
            target_p0: 0.5,
            search: DistillationSearch::default(),
        };
        let plan = plan_factory(&req).unwrap();
        assert_eq!(plan.protocol, DistillationProtocol::new(3, 3, 3));
        assert_eq!(plan.unit_qubits, 282);
        assert_eq!(plan.units, 1);
    }

    #[test]
    fn impossible_target_is_infeasible() {
        let cycle = logical_cycle(Seconds(0.0), Seconds(1e-6), 3).unwrap();
        let fit = atom_fit();
        let req = FactoryRequest {
            k: 1,
            fit: &fit,
            injection_error: 1e-4,
            comp_cycle: &cycle,
            t_sec_dist: Seconds(1e-6),
            target_p0: 1e-30,
            search: DistillationSearch { d_min: 3, d_max: 3 },
        };
        assert!(plan_factory(&req).unwrap_err().is_infeasible());
    }

    #[test]
    fn future_superconducting_288_matches_published_plan() {
        let fit = FitModel::new(-3.93, -1.58);
        let cycle = logical_cycle(Seconds(2.1191e-6), Seconds(4.0e-7), 11).unwrap();
        let req = FactoryRequest {
            k: 12,
            fit: &fit,
            injection_error: 1e-4,
            comp_cycle: &cycle,
            t_sec_dist: Seconds(4.0e-7),
            target_p0: 5.5451e-9,
            search: DistillationSearch::default(),
        };
        let plan = plan_factory(&req).unwrap();
        assert_eq!(plan.protocol, DistillationProtocol::new(13, 5, 5));
        assert_eq!(plan.units, 22);
        assert_eq!(plan.total_qubits, 57068);
        assert!(plan.p_out <= 5.5451e-9);
    }
}
