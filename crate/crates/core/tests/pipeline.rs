mod common;

use std::path::Path;

use qlops_core::model::{parse_config, ConfigFormat, GridLayout, Seconds};
use qlops_core::report::{emit_report, format_sig, run_scenarios, ReportFormat, RowRole, CSV_HEADER};
use qlops_core::sec::schedule_gb_sec;

use common::{data_dir, platform, reference_config};

#[test]
fn reference_config_round_trips_through_toml_and_json() {
    let config = reference_config();
    let toml_text = config.to_toml();
    let again = parse_config(&toml_text, ConfigFormat::Toml, Path::new(".")).unwrap();
    assert_eq!(again, config);
    let json = serde_json::to_string(&config).unwrap();
    let from_json = parse_config(&json, ConfigFormat::Json, Path::new(".")).unwrap();
    assert_eq!(from_json, config);
}

#[test]
fn bb72_layout_schedule_is_close_to_measured_cycle() {
    let layout = GridLayout::from_path(&data_dir().join("layouts/bb_72_12_6.toml")).unwrap();
    layout.validate().unwrap();
    assert_eq!(layout.data.len(), 72);
    let hw = platform(&reference_config(), "atom-future");
    let sched = schedule_gb_sec(&layout, &hw).unwrap();
    let measured = Seconds(2.677e-3);
    assert!(
        ((sched.total.0 - measured.0) / measured.0).abs() <= 0.25,
        "{}",
        sched.total
    );
    // Prep and readout never sit on the critical path.
    assert!(sched.without_pipelining().total > sched.total);
}

fn scenario_rows(name: &str) -> Vec<qlops_core::report::ScenarioResult> {
    let mut config = reference_config();
    for s in &mut config.scenarios {
        s.factory = false;
    }
    run_scenarios(&config, Some(name)).unwrap()
}

#[test]
fn scheduled_scenario_uses_layout_cycle() {
    let rows = scenario_rows("bb72-scheduled");
    assert_eq!(rows.len(), 1);
    let t = rows[0].t_sec.0;
    assert!(t > 2.677e-3 && t < 1.25 * 2.677e-3, "{t}");
}

#[test]
fn csv_reparses_at_six_figures() {
    let results = scenario_rows("bb72-z");
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&results, ReportFormat::Csv, dir.path()).unwrap();
    assert_eq!(files.len(), 1);
    let mut reader = csv::Reader::from_path(&files[0]).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), results.len());
    for (rec, r) in records.iter().zip(&results) {
        assert_eq!(&rec[0], r.scenario);
        assert_eq!(&rec[1], r.platform);
        assert_eq!(rec[4].parse::<u32>().unwrap(), r.distance);
        assert_eq!(rec[5].parse::<u64>().unwrap(), r.physical_qubits);
        for (cell, value) in [(&rec[3], r.p0), (&rec[6], r.qlops), (&rec[7], r.density)] {
            let parsed: f64 = cell.parse().unwrap();
            assert_eq!(format_sig(parsed), format_sig(value));
            assert!(((parsed - value) / value).abs() <= 5e-6);
        }
    }
    assert_eq!(results[0].role, RowRole::Primary);
}

#[test]
fn reports_are_deterministic() {
    let config = reference_config();
    let a = run_scenarios(&config, Some("bb90-z")).unwrap();
    let b = run_scenarios(&config, Some("bb90-z")).unwrap();
    for format in [ReportFormat::Csv, ReportFormat::Markdown, ReportFormat::PlotData] {
        let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let fa = emit_report(&a, format, da.path()).unwrap();
        let fb = emit_report(&b, format, db.path()).unwrap();
        assert_eq!(fa.len(), fb.len());
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(x.file_name(), y.file_name());
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
    }
}

#[test]
fn plot_data_has_one_series_per_platform() {
    let mut config = reference_config();
    for s in &mut config.scenarios {
        s.factory = false;
    }
    let results = run_scenarios(&config, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&results, ReportFormat::PlotData, dir.path()).unwrap();
    let names: Vec<_> = files
        .iter()
        .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        ["plot_atom-future.dat", "plot_sc-current.dat", "plot_sc-future.dat"]
    );
    let atom = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(atom.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn markdown_single_scenario() {
    let mut config = reference_config();
    config.scenarios.retain(|s| s.name == "bb288-z");
    config.scenarios[0].compare.clear();
    config.scenarios[0].factory = false;
    let results = run_scenarios(&config, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&results, ReportFormat::Markdown, dir.path()).unwrap();
    let text = std::fs::read_to_string(&files[0]).unwrap();
    let rows: Vec<_> = text.lines().filter(|l| l.starts_with("| bb288-z")).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].contains("| 576 |"), "{}", rows[0]);
    assert!(!text.contains("## Distillation"));
}

#[test]
fn unknown_code_is_a_configuration_error() {
    let mut config = reference_config();
    config.scenarios[0].code = "bb73".into();
    let err = run_scenarios(&config, Some("bb72-z")).unwrap_err().to_string();
    assert!(err.contains("bb73"), "{err}");
    assert!(err.contains("bb72-z"), "{err}");
}

#[test]
fn example_samples_calibrate_the_current_superconducting_fit() {
    let file = std::fs::File::open(data_dir().join("samples/example_surface.csv")).unwrap();
    let fit = qlops_core::error_rates::calibrate_from_csv(file).unwrap();
    assert!((fit.model.intercept + 4.43).abs() < 1e-5, "{}", fit.model.intercept);
    assert!((fit.model.slope + 0.546).abs() < 1e-6, "{}", fit.model.slope);
    assert_eq!(fit.model.range, Some((5, 13)));
}
