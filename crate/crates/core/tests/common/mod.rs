//! Shared fixtures and property checks for the integration tests.
//!
//! Each `check_*` runs a deterministic proptest runner over the public API and
//! returns the first counterexample as an error string.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, RngAlgorithm, TestRng, TestRunner};

use qlops_core::error_rates::{fit_log_linear, p0_from_pl, pl_from_p0};
use qlops_core::model::{load_config, Check, Config, GridLayout, HardwareParams, Rect, Seconds, Site};
use qlops_core::qlops::qlops;
use qlops_core::sec::{atom_surface_schedule, move_time, schedule_gb_sec, StepKind};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn reference_config() -> Config {
    load_config(&data_dir().join("reference.toml")).expect("reference configuration loads")
}

pub fn platform(config: &Config, name: &str) -> HardwareParams {
    config.platform(name).expect("platform exists").clone()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        RunnerConfig {
            cases,
            failure_persistence: None,
            ..RunnerConfig::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn check_p0_round_trip(cases: u32) -> Result<(), String> {
    run(cases, (-15.0f64..-1.0, 1u32..2000, 1u32..60), |(log_p0, k, d)| {
        let p0 = 10f64.powf(log_p0);
        prop_assume!(pl_from_p0(p0, k, d) <= 0.5);
        let back = p0_from_pl(pl_from_p0(p0, k, d), k, d).unwrap();
        prop_assert!(((back - p0) / p0).abs() < 1e-12, "{} vs {}", back, p0);
        Ok(())
    })
}

pub fn check_qlops_monotone(cases: u32) -> Result<(), String> {
    let strategy = (1u32..5000, 1e-8f64..1e-2, 0.0f64..300.0, 0.0f64..50.0, 1u32..60);
    run(cases, strategy, |(k, t_sec, ratio, extra, d)| {
        let s = Seconds;
        let t_r = ratio * t_sec;
        let base = qlops(k, s(t_r), s(t_sec), d).unwrap();
        prop_assert!(qlops(k, s(t_r + extra * t_sec), s(t_sec), d).unwrap() <= base);
        prop_assert!(qlops(k, s(t_r), s(t_sec), d + 1).unwrap() < base);
        prop_assert_eq!(
            qlops(k, s(0.0), s(t_sec), d).unwrap(),
            f64::from(k) / (f64::from(d) * t_sec)
        );
        Ok(())
    })
}

pub fn check_noiseless_fit(cases: u32) -> Result<(), String> {
    let strategy = (-8.0f64..0.0, -3.0f64..-0.05, 1u32..8, 2usize..8);
    run(cases, strategy, |(a, b, start, n)| {
        let samples: Vec<_> = (0..n)
            .map(|i| start + 2 * i as u32)
            .map(|d| (d, (a + b * f64::from(d)).exp()))
            .collect();
        let fit = fit_log_linear(&samples).unwrap();
        prop_assert!(
            (fit.model.intercept - a).abs() < 1e-12,
            "{} vs {}",
            fit.model.intercept,
            a
        );
        prop_assert!((fit.model.slope - b).abs() < 1e-12, "{} vs {}", fit.model.slope, b);
        Ok(())
    })
}

pub fn check_pipelining(hw: &HardwareParams, cases: u32) -> Result<(), String> {
    let toy = toy_layout();
    run(cases, (0.0f64..100.0, 1e-3f64..500.0), |(prep, readout)| {
        let mut hw = hw.clone();
        hw.prep_time = Seconds::from_micros(prep);
        hw.readout_time = Seconds::from_micros(readout);
        for sched in [
            schedule_gb_sec(&toy, &hw).unwrap(),
            atom_surface_schedule(&hw, 5).unwrap(),
        ] {
            let groups = sched.steps.iter().filter(|s| s.kind == StepKind::Readout).count() as f64;
            let diff = sched.without_pipelining().total.0 - sched.total.0;
            prop_assert!(diff > 0.0);
            let expected = groups * (hw.prep_time.0 + hw.readout_time.0);
            prop_assert!((diff - expected).abs() <= 1e-12 * expected);
        }
        Ok(())
    })
}

pub fn check_parking_argmin(hw: &HardwareParams, cases: u32) -> Result<(), String> {
    run(cases, random_layout(), |layout| {
        prop_assume!(layout.validate().is_ok());
        let brute = brute_force_total(&layout, hw);
        match schedule_gb_sec(&layout, hw) {
            Ok(s) => {
                let b = brute.expect("brute force finds a schedule too");
                prop_assert!((s.total.0 - b).abs() <= 1e-12 * b.max(1e-6), "{} vs {}", s.total.0, b);
                for (dist, dur) in s.moves() {
                    prop_assert_eq!(dur, move_time(dist, hw.movement_accel.unwrap()).unwrap());
                }
            }
            Err(e) => {
                prop_assert!(e.is_infeasible(), "{}", e);
                prop_assert!(brute.is_none());
            }
        }
        Ok(())
    })
}

/// One X ancilla, one data qubit to its right, parking row above.
pub fn toy_layout() -> GridLayout {
    GridLayout {
        grid: [1, 2],
        data: vec![[0, 1]],
        x_checks: vec![Check {
            ancilla: 0,
            home: [0, 0],
            offsets: vec![[0, 1]],
        }],
        z_checks: vec![],
        parking: vec![Rect {
            rows: [-1, -1],
            cols: [0, 1],
        }],
    }
}

type Vector = [i32; 2];

/// Ancilla home cell and one target cell per check term.
type RawCheck = ((i32, i32), Vec<(i32, i32)>);

fn sub(a: Site, b: Site) -> Vector {
    [a[0] - b[0], a[1] - b[1]]
}

/// Exhaustive re-scan: every region pair, every move-in and move-out
/// translation within +-20 sites.
pub fn brute_force_total(layout: &GridLayout, hw: &HardwareParams) -> Option<f64> {
    let (spacing, accel) = (hw.lattice_spacing.unwrap(), hw.movement_accel.unwrap());
    let t = |v: Vector| (6.0 * spacing * f64::from(v[0]).hypot(f64::from(v[1])) / accel).sqrt() * 1e-6;
    let distinct_sum = |vs: Vec<Vector>| {
        let set: BTreeSet<Vector> = vs.into_iter().filter(|v| *v != [0, 0]).collect();
        set.into_iter().map(t).sum::<f64>()
    };
    let group_costs = |checks: &[Check]| -> Vec<Option<f64>> {
        let homes: Vec<Site> = checks.iter().map(|c| c.home).collect();
        let mut pos = homes.clone();
        let mut body = 0.0;
        for i in 0..checks[0].offsets.len() {
            let next: Vec<Site> = checks
                .iter()
                .map(|c| [c.home[0] + c.offsets[i][0], c.home[1] + c.offsets[i][1]])
                .collect();
            body += distinct_sum(pos.iter().zip(&next).map(|(p, q)| sub(*q, *p)).collect());
            pos = next;
        }
        let fits = |rect: &Rect, r: i32, c: i32| homes.iter().all(|h| rect.contains([h[0] + r, h[1] + c]));
        layout
            .parking
            .iter()
            .map(|rect| {
                let mut best: Option<f64> = None;
                for r in -20..=20 {
                    for c in -20..=20 {
                        if !fits(rect, r, c) {
                            continue;
                        }
                        for r2 in -20..=20 {
                            for c2 in -20..=20 {
                                if !fits(rect, r2, c2) {
                                    continue;
                                }
                                let out: Vec<Vector> = homes
                                    .iter()
                                    .zip(&pos)
                                    .map(|(h, p)| sub([h[0] + r2, h[1] + c2], *p))
                                    .collect();
                                let total = t([r, c]) + body + distinct_sum(out);
                                best = Some(best.map_or(total, |b: f64| b.min(total)));
                            }
                        }
                    }
                }
                best
            })
            .collect()
    };
    let gx = (!layout.x_checks.is_empty()).then(|| group_costs(&layout.x_checks));
    let gz = (!layout.z_checks.is_empty()).then(|| group_costs(&layout.z_checks));
    let mut best: Option<f64> = None;
    let mut consider = |v: f64| best = Some(best.map_or(v, |b: f64| b.min(v)));
    match (gx, gz) {
        (Some(x), Some(z)) => {
            for (a, cx) in x.iter().enumerate() {
                for (b, cz) in z.iter().enumerate() {
                    if let (true, Some(cx), Some(cz)) = (a != b, cx, cz) {
                        consider(cx + cz);
                    }
                }
            }
        }
        (Some(g), None) | (None, Some(g)) => g.into_iter().flatten().for_each(&mut consider),
        (None, None) => consider(0.0),
    }
    let gates = (layout.x_checks.first().map_or(0, |c| c.offsets.len())
        + layout.z_checks.first().map_or(0, |c| c.offsets.len())) as f64
        * hw.gate_time_2q.0;
    best.map(|b| b + gates)
}

/// Small random layouts on a 3x3 grid with one to three parking regions
/// beside it.
pub fn random_layout() -> impl Strategy<Value = GridLayout> {
    let checks = || prop::collection::vec(((0i32..3, 0i32..3), prop::collection::vec((0i32..3, 0i32..3), 2)), 1..3);
    let rect = (0i32..4, 1i32..4, 0i32..3, 0i32..4, 0i32..3).prop_map(|(side, h, w, gap, shift)| {
        // Above (0), below (1), left (2) or right (3) of the data grid.
        let (r0, c0) = match side {
            0 => (-gap - h, shift - 1),
            1 => (3 + gap, shift - 1),
            2 => (shift - 1, -gap - h),
            _ => (shift - 1, 3 + gap),
        };
        let (rh, cw) = if side < 2 { (h, w + 2) } else { (w + 2, h) };
        Rect {
            rows: [r0, r0 + rh - 1],
            cols: [c0, c0 + cw - 1],
        }
    });
    (checks(), checks(), prop::collection::vec(rect, 1..4)).prop_map(|(xs, zs, parking)| {
        // Homes on even-parity sites, data on odd-parity ones.
        let homes = [[0, 0], [0, 2], [1, 1], [2, 0], [2, 2]];
        let data: Vec<Site> = vec![[0, 1], [1, 0], [1, 2], [2, 1]];
        let mut used = BTreeSet::new();
        let mut build = |raw: Vec<RawCheck>, first: u32| {
            let mut out = Vec::new();
            for ((hr, hc), terms) in raw {
                let home = homes[((hr * 3 + hc) % 5) as usize];
                if !used.insert(home) {
                    continue;
                }
                let offsets = terms
                    .into_iter()
                    .map(|(a, b)| sub(data[((a * 3 + b) % 4) as usize], home))
                    .collect();
                out.push(Check {
                    ancilla: first + out.len() as u32,
                    home,
                    offsets,
                });
            }
            out
        };
        let x_checks = build(xs, 0);
        let z_checks = build(zs, 10);
        GridLayout {
            grid: [3, 3],
            data,
            x_checks,
            z_checks,
            parking,
        }
    })
}
