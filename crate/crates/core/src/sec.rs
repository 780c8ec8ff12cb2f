//! Syndrome-extraction cycle (SEC) lengths.
//!
//! Superconducting surface codes run a fixed gate sequence. Neutral-atom codes
//! move ancilla groups with an AOD: a move of `dx` micrometers at acceleration
//! `a_p` takes `sqrt(6 dx / a_p)` microseconds. Ancilla preparation and
//! readout happen in a parking region while the other group is busy, so those
//! steps are pipelined and excluded from the cycle length.
//!
//! GB schedule per ancilla group (X, then Z):
//!
//! 1. rigid move-in from a parking placement to the ancilla home sites;
//! 2. for each check term, one move per distinct displacement vector followed
//!    by one two-qubit gate region;
//! 3. move-out to a placement in the same parking region.
//!
//! The X and Z groups park in distinct regions. Move-in and move-out
//! placements are chosen independently; the region pair and placements
//! minimize the total move time, ties going to the lowest candidate index.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AtomMotion, Check, GridLayout, HardwareParams, PlatformKind, Rect, Seconds, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Group {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepKind {
    Prep,
    Move { distance_um: f64, group: Group },
    Gate1Q,
    Gate2QRegion,
    Readout,
}

impl StepKind {
    pub fn name(&self) -> &'static str {
        match self {
            StepKind::Prep => "prep",
            StepKind::Move { .. } => "move",
            StepKind::Gate1Q => "gate1q",
            StepKind::Gate2QRegion => "gate2q",
            StepKind::Readout => "readout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub kind: StepKind,
    pub duration: Seconds,
    pub pipelined: bool,
}

/// Ordered cycle steps. `total` is the sum of non-pipelined durations.
#[derive(Debug, Clone, PartialEq)]
pub struct SecSchedule {
    pub steps: Vec<Step>,
    pub total: Seconds,
    /// For GB schedules: parking region indices chosen for the X and Z groups.
    pub parking: Option<(usize, usize)>,
}

impl SecSchedule {
    fn from_steps(steps: Vec<Step>) -> Self {
        let total = Seconds(steps.iter().filter(|s| !s.pipelined).map(|s| s.duration.0).sum());
        SecSchedule {
            steps,
            total,
            parking: None,
        }
    }

    /// The same schedule with Prep and Readout no longer overlapped.
    pub fn without_pipelining(&self) -> Self {
        let steps = self
            .steps
            .iter()
            .map(|s| match s.kind {
                StepKind::Prep | StepKind::Readout => Step { pipelined: false, ..*s },
                _ => *s,
            })
            .collect();
        SecSchedule {
            parking: self.parking,
            ..SecSchedule::from_steps(steps)
        }
    }

    pub fn moves(&self) -> impl Iterator<Item = (f64, Seconds)> + '_ {
        self.steps.iter().filter_map(|s| match s.kind {
            StepKind::Move { distance_um, .. } => Some((distance_um, s.duration)),
            _ => None,
        })
    }

    /// Writes `step,kind,distance_um,group,duration_s,pipelined` rows.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "kind", "distance_um", "group", "duration_s", "pipelined"])?;
        for (i, s) in self.steps.iter().enumerate() {
            let (dist, group) = match s.kind {
                StepKind::Move { distance_um, group } => (distance_um.to_string(), format!("{group:?}")),
                _ => (String::new(), String::new()),
            };
            w.write_record([
                i.to_string(),
                s.kind.name().to_string(),
                dist,
                group,
                format!("{:e}", s.duration.0),
                s.pipelined.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn step(kind: StepKind, duration: Seconds) -> Step {
    Step {
        kind,
        duration,
        pipelined: false,
    }
}

fn pipelined(kind: StepKind, duration: Seconds) -> Step {
    Step {
        kind,
        duration,
        pipelined: true,
    }
}

/// AOD move time for `dx_um` micrometers at acceleration `a_p` um/us^2.
pub fn move_time(dx_um: f64, a_p: f64) -> Result<Seconds> {
    if !(a_p > 0.0 && a_p.is_finite()) {
        return Err(Error::domain(format!("AOD acceleration must be > 0, got {a_p}")));
    }
    if !(dx_um >= 0.0) {
        return Err(Error::domain(format!("move distance must be >= 0, got {dx_um}")));
    }
    Ok(Seconds::from_micros((6.0 * dx_um / a_p).sqrt()))
}

/// prep + readout + 4 single-qubit gates + 4 two-qubit gates.
pub fn surface_sec_length(hw: &HardwareParams) -> Seconds {
    Seconds(hw.prep_time.0 + hw.readout_time.0 + 4.0 * hw.gate_time_1q.0 + 4.0 * hw.gate_time_2q.0)
}

pub fn surface_schedule(hw: &HardwareParams) -> SecSchedule {
    let mut steps = vec![step(StepKind::Prep, hw.prep_time)];
    for _ in 0..4 {
        steps.push(step(StepKind::Gate1Q, hw.gate_time_1q));
        steps.push(step(StepKind::Gate2QRegion, hw.gate_time_2q));
    }
    steps.push(step(StepKind::Readout, hw.readout_time));
    SecSchedule::from_steps(steps)
}

fn require_atom(hw: &HardwareParams) -> Result<AtomMotion> {
    if hw.kind != PlatformKind::NeutralAtom {
        return Err(Error::domain(format!("platform `{}` is not neutral-atom", hw.name)));
    }
    hw.atom_motion()
}

/// Surface-code cycle on atoms: four one-site moves, each followed by a
/// single-qubit layer and a two-qubit region. Independent of `d` because every
/// ancilla moves in the same AOD group.
pub fn atom_surface_schedule(hw: &HardwareParams, _d: u32) -> Result<SecSchedule> {
    let motion = require_atom(hw)?;
    let hop = move_time(motion.lattice_spacing, motion.accel)?;
    let mut steps = vec![pipelined(StepKind::Prep, hw.prep_time)];
    for _ in 0..4 {
        let kind = StepKind::Move {
            distance_um: motion.lattice_spacing,
            group: Group::X,
        };
        steps.push(step(kind, hop));
        steps.push(step(StepKind::Gate1Q, hw.gate_time_1q));
        steps.push(step(StepKind::Gate2QRegion, hw.gate_time_2q));
    }
    steps.push(pipelined(StepKind::Readout, hw.readout_time));
    Ok(SecSchedule::from_steps(steps))
}

pub fn atom_surface_sec_length(hw: &HardwareParams, d: u32) -> Result<Seconds> {
    Ok(atom_surface_schedule(hw, d)?.total)
}

type Vector = [i32; 2];

fn sub(a: Site, b: Site) -> Vector {
    [a[0] - b[0], a[1] - b[1]]
}

/// Rigid translations that put every site of `homes` inside `rect`, row-major.
fn placements(homes: &[Site], rect: &Rect) -> Vec<Vector> {
    let Some(bb) = Rect::bounding(homes.iter().copied()) else {
        return Vec::new();
    };
    let rows = (rect.rows[0] - bb.rows[0])..=(rect.rows[1] - bb.rows[1]);
    let cols = (rect.cols[0] - bb.cols[0])..=(rect.cols[1] - bb.cols[1]);
    rows.flat_map(|r| cols.clone().map(move |c| [r, c])).collect()
}

struct Mover {
    spacing: f64,
    accel: f64,
}

impl Mover {
    fn distance(&self, v: Vector) -> f64 {
        self.spacing * f64::from(v[0]).hypot(f64::from(v[1]))
    }

    fn time(&self, v: Vector) -> f64 {
        (6.0 * self.distance(v) / self.accel).sqrt() * 1e-6
    }

    /// Total time of the distinct non-zero vectors, in first-seen order.
    fn distinct(&self, vectors: impl Iterator<Item = Vector>) -> (Vec<Vector>, f64) {
        let mut seen = BTreeSet::new();
        let list: Vec<_> = vectors.filter(|v| *v != [0, 0] && seen.insert(*v)).collect();
        let total = list.iter().map(|v| self.time(*v)).sum();
        (list, total)
    }
}

/// Cheapest move-in and move-out placements of one group within one region.
#[derive(Debug, Clone)]
struct RegionChoice {
    move_in: Vector,
    out_vectors: Vec<Vector>,
    cost: f64,
}

fn best_in_region(checks: &[Check], last: &[Site], rect: &Rect, mover: &Mover) -> Option<RegionChoice> {
    let homes: Vec<Site> = checks.iter().map(|c| c.home).collect();
    let candidates = placements(&homes, rect);
    // Move-in: the group sits at home + t and translates by -t.
    let move_in = candidates.iter().map(|t| ([-t[0], -t[1]], mover.time(*t))).fold(
        None,
        |best: Option<(Vector, f64)>, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        },
    )?;
    // Move-out: each ancilla goes from its last data site to home + t.
    let out = candidates
        .iter()
        .map(|t| mover.distinct(homes.iter().zip(last).map(|(h, l)| sub([h[0] + t[0], h[1] + t[1]], *l))))
        .fold(None, |best: Option<(Vec<Vector>, f64)>, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        })?;
    Some(RegionChoice {
        move_in: move_in.0,
        out_vectors: out.0,
        cost: mover.time(move_in.0) + out.1,
    })
}

/// Gate phase of one group: per term, distinct displacements then a gate.
fn gate_phase(checks: &[Check], mover: &Mover) -> (Vec<Vec<Vector>>, Vec<Site>, f64) {
    let weight = checks.first().map_or(0, |c| c.offsets.len());
    let mut pos: Vec<Site> = checks.iter().map(|c| c.home).collect();
    let mut terms = Vec::with_capacity(weight);
    let mut cost = 0.0;
    for t in 0..weight {
        let targets: Vec<Site> = checks
            .iter()
            .map(|c| [c.home[0] + c.offsets[t][0], c.home[1] + c.offsets[t][1]])
            .collect();
        let (vectors, time) = mover.distinct(pos.iter().zip(&targets).map(|(p, q)| sub(*q, *p)));
        cost += time;
        terms.push(vectors);
        pos = targets;
    }
    (terms, pos, cost)
}

struct GroupPlan<'a> {
    group: Group,
    checks: &'a [Check],
    terms: Vec<Vec<Vector>>,
    per_region: Vec<Option<RegionChoice>>,
}

/// Schedules one SEC of a GB code on a neutral-atom platform.
pub fn schedule_gb_sec(layout: &GridLayout, hw: &HardwareParams) -> Result<SecSchedule> {
    let motion = require_atom(hw)?;
    layout.validate()?;
    if !(motion.accel > 0.0) {
        return Err(Error::domain(format!(
            "AOD acceleration must be > 0, got {}",
            motion.accel
        )));
    }
    let mover = Mover {
        spacing: motion.lattice_spacing,
        accel: motion.accel,
    };

    let mut plans = Vec::new();
    for (group, checks) in [(Group::X, &layout.x_checks), (Group::Z, &layout.z_checks)] {
        if checks.is_empty() {
            continue;
        }
        let (terms, last, _) = gate_phase(checks, &mover);
        let per_region: Vec<_> = layout
            .parking
            .iter()
            .map(|rect| best_in_region(checks, &last, rect, &mover))
            .collect();
        if per_region.iter().all(Option::is_none) {
            return Err(Error::Infeasible(format!(
                "{group:?} ancilla group does not fit in any parking region"
            )));
        }
        plans.push(GroupPlan {
            group,
            checks,
            terms,
            per_region,
        });
    }

    let regions = region_assignment(&plans)?;

    let mut steps = Vec::new();
    for (plan, &r) in plans.iter().zip(&regions) {
        let choice = plan.per_region[r].as_ref().expect("assigned region is feasible");
        let mv = |v: Vector| {
            let distance_um = mover.distance(v);
            step(
                StepKind::Move {
                    distance_um,
                    group: plan.group,
                },
                Seconds(mover.time(v)),
            )
        };
        steps.push(pipelined(StepKind::Prep, hw.prep_time));
        if plan.group == Group::X {
            steps.push(pipelined(StepKind::Gate1Q, hw.gate_time_1q));
        }
        if choice.move_in != [0, 0] {
            steps.push(mv(choice.move_in));
        }
        for vectors in &plan.terms {
            steps.extend(vectors.iter().map(|v| mv(*v)));
            steps.push(step(StepKind::Gate2QRegion, hw.gate_time_2q));
        }
        steps.extend(choice.out_vectors.iter().map(|v| mv(*v)));
        if plan.group == Group::X {
            steps.push(pipelined(StepKind::Gate1Q, hw.gate_time_1q));
        }
        steps.push(pipelined(StepKind::Readout, hw.readout_time));
        log::debug!(
            "{:?} group: {} checks parked in region {r}",
            plan.group,
            plan.checks.len()
        );
    }

    let mut schedule = SecSchedule::from_steps(steps);
    schedule.parking = match (plans.as_slice(), regions.as_slice()) {
        ([a, _], [ra, rb]) if a.group == Group::X => Some((*ra, *rb)),
        ([a], [ra]) if a.group == Group::X => Some((*ra, usize::MAX)),
        ([_], [rb]) => Some((usize::MAX, *rb)),
        _ => None,
    };
    Ok(schedule)
}

/// Region per group minimizing the summed cost, groups in distinct regions.
/// Lexicographically smallest indices win ties.
fn region_assignment(plans: &[GroupPlan<'_>]) -> Result<Vec<usize>> {
    let cost = |p: &GroupPlan<'_>, r: usize| p.per_region[r].as_ref().map(|c| c.cost);
    match plans {
        [] => Ok(Vec::new()),
        [single] => {
            let mut best: Option<(f64, usize)> = None;
            for r in 0..single.per_region.len() {
                if let Some(c) = cost(single, r) {
                    if best.is_none_or(|b| c < b.0) {
                        best = Some((c, r));
                    }
                }
            }
            Ok(vec![best.expect("feasibility checked").1])
        }
        [x, z] => {
            let n = x.per_region.len();
            let mut best: Option<(f64, usize, usize)> = None;
            for rx in 0..n {
                for rz in (0..n).filter(|rz| *rz != rx) {
                    if let (Some(cx), Some(cz)) = (cost(x, rx), cost(z, rz)) {
                        let total = cx + cz;
                        if best.is_none_or(|b| total < b.0) {
                            best = Some((total, rx, rz));
                        }
                    }
                }
            }
            best.map(|(_, rx, rz)| vec![rx, rz]).ok_or_else(|| {
                Error::Infeasible("X and Z ancilla groups need two distinct parking regions that fit them".into())
            })
        }
        _ => unreachable!("at most two ancilla groups"),
    }
}
