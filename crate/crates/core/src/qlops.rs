//! QLOPS and QLOPS density.
//!
//! One logical operation waits `ceil(t_r / t_sec)` cycles for the decoder and
//! then `d` cycles of syndrome extraction, so
//! `QLOPS = k / ((ceil(t_r / t_sec) + d) t_sec)`.
//!
//! Published reaction times and cycle lengths are rounded, so a ratio that is
//! an integer up to floating-point noise sits on the ceiling boundary. Such a
//! ratio is taken as that integer, and the next integer is reported as a
//! flagged alternate.

use crate::error::{Error, Result};
use crate::model::{CodeSpec, FootprintBlock, Seconds};

/// Relative distance from an integer under which `t_r / t_sec` counts as one.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalCycle {
    /// `ceil(t_r / t_sec) + d`.
    pub cycles: u64,
    pub t_sec: Seconds,
    /// `cycles * t_sec`.
    pub duration: Seconds,
    /// `cycles + 1` when `t_r / t_sec` lies on an integer boundary.
    pub boundary_alternate: Option<u64>,
}

impl LogicalCycle {
    pub fn alternate_duration(&self) -> Option<Seconds> {
        self.boundary_alternate.map(|c| Seconds(c as f64 * self.t_sec.0))
    }
}

fn decoder_wait(t_r: f64, t_sec: f64) -> (u64, bool) {
    if t_r == 0.0 {
        return (0, false);
    }
    let ratio = t_r / t_sec;
    let nearest = ratio.round();
    if nearest >= 1.0 && (ratio - nearest).abs() <= BOUNDARY_TOLERANCE * nearest {
        (nearest as u64, true)
    } else {
        (ratio.ceil() as u64, false)
    }
}

pub fn logical_cycle(t_r: Seconds, t_sec: Seconds, d: u32) -> Result<LogicalCycle> {
    if !(t_sec.0 > 0.0 && t_sec.0.is_finite()) {
        return Err(Error::domain(format!("t_sec must be > 0, got {}", t_sec.0)));
    }
    if !(t_r.0 >= 0.0 && t_r.0.is_finite()) {
        return Err(Error::domain(format!("t_r must be >= 0, got {}", t_r.0)));
    }
    if d == 0 {
        return Err(Error::domain("distance must be >= 1"));
    }
    let (wait, boundary) = decoder_wait(t_r.0, t_sec.0);
    let cycles = wait + u64::from(d);
    Ok(LogicalCycle {
        cycles,
        t_sec,
        duration: Seconds(cycles as f64 * t_sec.0),
        boundary_alternate: boundary.then_some(cycles + 1),
    })
}

/// A QLOPS value with the logical cycle behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qlops {
    pub value: f64,
    pub cycle: LogicalCycle,
    /// QLOPS under the boundary alternate, if flagged.
    pub alternate: Option<f64>,
}

pub fn qlops_detailed(k: u32, t_r: Seconds, t_sec: Seconds, d: u32) -> Result<Qlops> {
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    let cycle = logical_cycle(t_r, t_sec, d)?;
    let k = f64::from(k);
    Ok(Qlops {
        value: k / cycle.duration.0,
        cycle,
        alternate: cycle.alternate_duration().map(|t| k / t.0),
    })
}

pub fn qlops(k: u32, t_r: Seconds, t_sec: Seconds, d: u32) -> Result<f64> {
    Ok(qlops_detailed(k, t_r, t_sec, d)?.value)
}

/// QLOPS when correlated decoding removes the `d`-round wait:
/// `k / (rounds_per_op t_sec)`.
pub fn qlops_correlated(k: u32, t_sec: Seconds, rounds_per_op: u32) -> Result<f64> {
    if !(t_sec.0 > 0.0) || rounds_per_op == 0 {
        return Err(Error::domain(format!(
            "need t_sec > 0 and rounds_per_op >= 1, got {} and {rounds_per_op}",
            t_sec.0
        )));
    }
    Ok(f64::from(k) / (f64::from(rounds_per_op) * t_sec.0))
}

pub fn qlops_density(q: f64, n_phys: u64) -> Result<f64> {
    if n_phys == 0 {
        return Err(Error::domain("physical qubit count must be >= 1"));
    }
    Ok(q / n_phys as f64)
}

/// Physical qubits of `patches` copies of `code` (surface patches or GB blocks).
pub fn physical_qubits(code: &CodeSpec, patches: u64) -> u64 {
    patches * code.block_qubits()
}

/// Physical qubits of a mixed system. Each block gives either a surface-code
/// distance (`2d^2 - 1` per patch) or an explicit per-patch count.
pub fn physical_qubits_mixed(blocks: &[FootprintBlock]) -> Result<u64> {
    blocks
        .iter()
        .map(|b| match (b.per_patch, b.distance) {
            (Some(n), _) => Ok(b.patches * n),
            (None, Some(d)) => Ok(physical_qubits(&CodeSpec::surface(d), b.patches)),
            (None, None) => Err(Error::validation("footprint block needs `distance` or `per_patch`")),
        })
        .sum()
}

/// True when the decoder cannot keep up with `d` rounds per window.
pub fn needs_parallel_decoder(t_r: Seconds, d: u32, t_sec: Seconds) -> bool {
    t_r.0 > f64::from(d) * t_sec.0
}
