use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{RowRole, ScenarioResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    PlotData,
}

/// Six significant figures. Scientific notation below 1e-3 and from 1e9 up.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let magnitude = x.abs();
    if !(1e-3..1e9).contains(&magnitude) {
        return sci;
    }
    let rounded: f64 = sci.parse().expect("formatted float parses");
    let exponent = rounded.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    format!("{rounded:.decimals$}")
}

pub const CSV_HEADER: [&str; 8] = [
    "scenario",
    "platform",
    "code",
    "p0",
    "distance",
    "physical_qubits",
    "qlops",
    "density",
];

pub fn render_csv(results: &[ScenarioResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record([
            r.scenario.clone(),
            r.platform.clone(),
            r.code.clone(),
            format_sig(r.p0),
            r.distance.to_string(),
            r.physical_qubits.to_string(),
            format_sig(r.qlops),
            format_sig(r.density),
        ])?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Factory rows, laid out like the distillation cost table.
pub fn render_factory_csv(results: &[ScenarioResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario",
        "platform",
        "code",
        "p0",
        "protocol",
        "d_x",
        "d_z",
        "d_m",
        "distillation_error",
        "p_accept",
        "unit_qubits",
        "cycles",
        "units",
        "total_qubits",
    ])?;
    for r in results {
        let Some(f) = &r.factory else { continue };
        w.write_record([
            r.scenario.clone(),
            r.platform.clone(),
            r.code.clone(),
            format_sig(r.p0),
            f.protocol.to_string(),
            f.protocol.d_x.to_string(),
            f.protocol.d_z.to_string(),
            f.protocol.d_m.to_string(),
            format_sig(f.p_out),
            format_sig(f.p_accept),
            f.unit_qubits.to_string(),
            format_sig(f.expected_cycles),
            f.units.to_string(),
            f.total_qubits.to_string(),
        ])?;
    }
    into_string(w)
}

fn scenario_cell(results: &[ScenarioResult], i: usize) -> (&str, &str) {
    let r = &results[i];
    let first = i == 0 || results[i - 1].scenario != r.scenario;
    if first && r.role == RowRole::Primary {
        (&r.scenario, &r.code)
    } else if first {
        (&r.scenario, "")
    } else {
        ("", "")
    }
}

pub fn render_markdown(results: &[ScenarioResult]) -> String {
    let mut out = String::new();
    out.push_str("## QLOPS\n\n");
    out.push_str("| Scenario | Code | Platform | p_0 | Distance | Physical qubits | QLOPS | QLOPS density |\n");
    out.push_str("|---|---|---|---|---|---|---|---|\n");
    for (i, r) in results.iter().enumerate() {
        let (scenario, code) = scenario_cell(results, i);
        let p0 = if code.is_empty() {
            String::new()
        } else {
            format_sig(r.p0)
        };
        let mut qlops = format_sig(r.qlops);
        if let Some(alt) = r.boundary_qlops {
            let _ = write!(qlops, " (boundary: {})", format_sig(alt));
        }
        let _ = writeln!(
            out,
            "| {scenario} | {code} | {} | {p0} | {} | {} | {qlops} | {} |",
            r.platform,
            r.distance,
            r.physical_qubits,
            format_sig(r.density)
        );
    }

    if results.iter().any(|r| r.factory.is_some()) {
        out.push_str("\n## Distillation\n\n");
        out.push_str(
            "| Scenario | Code | Platform | p_0 | Protocol | Distillation error | Qubits per unit | Cycles | Units | Total qubits |\n",
        );
        out.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
        for (i, r) in results.iter().enumerate() {
            let Some(f) = &r.factory else { continue };
            let (scenario, code) = scenario_cell(results, i);
            let p0 = if code.is_empty() {
                String::new()
            } else {
                format_sig(r.p0)
            };
            let _ = writeln!(
                out,
                "| {scenario} | {code} | {} | {p0} | {} | {} | {} | {} | {} | {} |",
                r.platform,
                f.protocol,
                format_sig(f.p_out),
                f.unit_qubits,
                format_sig(f.expected_cycles),
                f.units,
                f.total_qubits
            );
        }
    }

    let notes: Vec<String> = results
        .iter()
        .flat_map(|r| {
            r.notes
                .iter()
                .map(move |n| format!("{} / {}: {n}", r.scenario, r.platform))
        })
        .collect();
    if !notes.is_empty() {
        out.push_str("\n## Notes\n\n");
        for n in notes {
            let _ = writeln!(out, "- {n}");
        }
    }
    out
}

/// One `(p0, density)` series per platform, keyed by file name, sorted by p0.
pub fn render_plot_data(results: &[ScenarioResult]) -> BTreeMap<String, String> {
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in results {
        series.entry(&r.platform).or_default().push((r.p0, r.density));
    }
    series
        .into_iter()
        .map(|(platform, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let mut text = format!("# platform: {platform}\n# p0 density\n");
            for (p0, density) in points {
                let _ = writeln!(text, "{} {}", format_sig(p0), format_sig(density));
            }
            (format!("plot_{}.dat", sanitize(platform)), text)
        })
        .collect()
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes the report into `out_dir` and returns the written paths in order.
pub fn emit_report(results: &[ScenarioResult], format: ReportFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if results.is_empty() {
        return Err(Error::validation("no results to report"));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut files: Vec<(String, String)> = Vec::new();
    match format {
        ReportFormat::Csv => {
            files.push(("qlops.csv".into(), render_csv(results)?));
            if results.iter().any(|r| r.factory.is_some()) {
                files.push(("factories.csv".into(), render_factory_csv(results)?));
            }
        }
        ReportFormat::Markdown => files.push(("report.md".into(), render_markdown(results))),
        ReportFormat::PlotData => files.extend(render_plot_data(results)),
    }
    let mut written = Vec::new();
    for (name, text) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
