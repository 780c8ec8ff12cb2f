use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qlops_core::error_rates::calibrate_from_csv;
use qlops_core::model::{load_config, Config};
use qlops_core::report::{
    emit_report, evaluate_case_studies, format_sig, render_factory_csv, render_markdown, run_scenarios, ReportFormat,
    ScenarioResult,
};

/// Quantum logical operations per second: resource estimates for
/// fault-tolerant hardware.
#[derive(Debug, Parser)]
#[command(name = "qlops", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
    Plotdata,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Md => ReportFormat::Markdown,
            Format::Plotdata => ReportFormat::PlotData,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate configured scenarios and write a report.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Only this scenario.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit ln p0 = a + b d to logical error samples (CSV columns d, p_L, k).
    Fit {
        #[arg(long)]
        samples: PathBuf,
        /// Platform name for the emitted configuration snippet.
        #[arg(long)]
        platform: String,
    },
    /// Size magic-state factories for every scenario using a code.
    Factory {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        code: String,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Runtime lower bounds and cross-platform ratios of the case studies.
    CaseStudy {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<Config> {
    Ok(load_config(path)?)
}

fn eval(config: &Path, scenario: Option<&str>, format: Format, out: &Path) -> Result<()> {
    let config = load(config)?;
    if config.scenarios.is_empty() && scenario.is_none() {
        log::warn!("configuration has no scenarios; nothing to do");
        return Ok(());
    }
    let results = run_scenarios(&config, scenario)?;
    for path in emit_report(&results, format.into(), out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn fit(samples: &Path, platform: &str) -> Result<()> {
    let file = File::open(samples).with_context(|| format!("cannot open {}", samples.display()))?;
    let fit = calibrate_from_csv(file).with_context(|| format!("in {}", samples.display()))?;
    let mut out = io::stdout().lock();
    writeln!(out, "intercept = {}", fit.model.intercept)?;
    writeln!(out, "slope = {}", fit.model.slope)?;
    writeln!(out, "rms residual (ln p0) = {}", format_sig(fit.rms_residual()))?;
    writeln!(out, "residuals = {:?}", fit.residuals)?;
    writeln!(out)?;
    writeln!(out, "# surface fit for platform `{platform}`")?;
    let range = fit
        .model
        .range
        .map(|(lo, hi)| format!(", range = [{lo}, {hi}]"))
        .unwrap_or_default();
    writeln!(
        out,
        "surface_fit = {{ intercept = {}, slope = {}{range} }}",
        fit.model.intercept, fit.model.slope
    )?;
    Ok(())
}

fn factory(config: &Path, code: &str, format: Format) -> Result<()> {
    let config = load(config)?;
    config.code(code)?;
    let mut results: Vec<ScenarioResult> = Vec::new();
    for def in config.scenarios.iter().filter(|s| s.code == code) {
        let mut def = def.clone();
        def.factory = true;
        let mut single = config.clone();
        single.scenarios = vec![def.clone()];
        results.extend(run_scenarios(&single, Some(&def.name))?);
    }
    if results.is_empty() {
        log::warn!("no scenario uses code `{code}`");
        return Ok(());
    }
    let text = match format {
        Format::Csv => render_factory_csv(&results)?,
        Format::Md => render_markdown(&results),
        Format::Plotdata => bail!("plotdata is not available for factory reports"),
    };
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn case_study(config: &Path) -> Result<()> {
    let config = load(config)?;
    let report = evaluate_case_studies(&config.case_studies)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "| Case study | QLOPS | Runtime (s) | Lower bound (s) | Runtime / bound |"
    )?;
    writeln!(out, "|---|---|---|---|---|")?;
    for row in &report.rows {
        writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            row.study.label,
            format_sig(row.study.q),
            format_sig(row.study.runtime.0),
            format_sig(row.lower_bound.0),
            format_sig(row.underestimation)
        )?;
    }
    let footprints: Vec<_> = report
        .rows
        .iter()
        .flat_map(|r| r.footprints.iter().map(move |f| (&r.study.label, f)))
        .collect();
    if !footprints.is_empty() {
        writeln!(
            out,
            "\n| Case study | Footprint | Physical qubits | QLOPS density | Quoted density |"
        )?;
        writeln!(out, "|---|---|---|---|---|")?;
        for (label, f) in footprints {
            let quoted = f.quoted_density.map(format_sig).unwrap_or_default();
            writeln!(
                out,
                "| {label} | {} | {} | {} | {quoted} |",
                f.label,
                f.physical_qubits,
                format_sig(f.density)
            )?;
        }
    }
    if !report.pairs.is_empty() {
        writeln!(out, "\n| A | B | (Q t)_A / (Q t)_B | per Toffoli |")?;
        writeln!(out, "|---|---|---|---|")?;
        for p in &report.pairs {
            writeln!(
                out,
                "| {} | {} | {} | {} |",
                p.a,
                p.b,
                format_sig(p.ratio),
                format_sig(p.toffoli_normalized)
            )?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval {
            config,
            scenario,
            format,
            out,
        } => eval(&config, scenario.as_deref(), format, &out),
        Command::Fit { samples, platform } => fit(&samples, &platform),
        Command::Factory { config, code, format } => factory(&config, &code, format),
        Command::CaseStudy { config } => case_study(&config),
    }
}

/// 2 for infeasible scenarios, 1 for every other error.
fn exit_code(err: &anyhow::Error) -> u8 {
    let infeasible = err
        .chain()
        .filter_map(|e| e.downcast_ref::<qlops_core::Error>())
        .any(qlops_core::Error::is_infeasible);
    if infeasible {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QLOPS_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
