use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CaseStudyDef, FootprintDef, QlopsRule, Seconds};
use crate::qlops::{physical_qubits_mixed, qlops, qlops_correlated, qlops_density};

/// An application run compared against the QLOPS bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStudy {
    pub label: String,
    pub q: f64,
    pub runtime: Seconds,
    pub toffoli_count: f64,
    pub clifford_per_toffoli: f64,
}

impl CaseStudy {
    pub fn from_def(def: &CaseStudyDef) -> Result<Self> {
        let q = match &def.qlops {
            QlopsRule::LatticeSurgery { k, t_r, t_sec, d } => qlops(*k, *t_r, *t_sec, *d)?,
            QlopsRule::Correlated {
                k,
                t_sec,
                rounds_per_op,
            } => qlops_correlated(*k, *t_sec, *rounds_per_op)?,
            QlopsRule::Given { qlops } => *qlops,
        };
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::validation(format!(
                "case study `{}`: QLOPS must be > 0",
                def.label
            )));
        }
        Ok(CaseStudy {
            label: def.label.clone(),
            q,
            runtime: def.runtime,
            toffoli_count: def.toffoli_count,
            clifford_per_toffoli: def.clifford_per_toffoli,
        })
    }
}

/// `clifford_per_toffoli * toffoli_count / q`.
pub fn runtime_lower_bound(cs: &CaseStudy) -> Seconds {
    Seconds(cs.clifford_per_toffoli * cs.toffoli_count / cs.q)
}

/// `(Q_a t_a) / (Q_b t_b)`, optionally divided by the Toffoli-count ratio.
pub fn cross_platform_ratio(a: &CaseStudy, b: &CaseStudy, normalize_by_toffoli: bool) -> f64 {
    let ratio = (a.q * a.runtime.0) / (b.q * b.runtime.0);
    if normalize_by_toffoli {
        ratio / (a.toffoli_count / b.toffoli_count)
    } else {
        ratio
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FootprintReading {
    pub label: String,
    pub physical_qubits: u64,
    pub density: f64,
    pub quoted_density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStudyRow {
    pub study: CaseStudy,
    pub lower_bound: Seconds,
    /// Actual runtime over the lower bound.
    pub underestimation: f64,
    pub footprints: Vec<FootprintReading>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRatio {
    pub a: String,
    pub b: String,
    pub ratio: f64,
    pub toffoli_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStudyReport {
    pub rows: Vec<CaseStudyRow>,
    pub pairs: Vec<PairRatio>,
}

fn footprint(q: f64, def: &FootprintDef) -> Result<FootprintReading> {
    let n = physical_qubits_mixed(&def.blocks)?;
    Ok(FootprintReading {
        label: def.label.clone(),
        physical_qubits: n,
        density: qlops_density(q, n)?,
        quoted_density: def.quoted_density,
    })
}

/// Evaluates every case study and every ordered pair `(i, j)` with `i < j`.
pub fn evaluate_case_studies(defs: &[CaseStudyDef]) -> Result<CaseStudyReport> {
    let mut rows = Vec::new();
    for def in defs {
        let study = CaseStudy::from_def(def)?;
        let lower_bound = runtime_lower_bound(&study);
        let footprints = def
            .footprints
            .iter()
            .map(|f| footprint(study.q, f))
            .collect::<Result<Vec<_>>>()?;
        for f in &footprints {
            if let Some(quoted) = f.quoted_density {
                if ((f.density - quoted) / quoted).abs() > 1e-3 {
                    log::info!(
                        "case study `{}`: footprint `{}` gives density {:.4}, quoted {quoted}",
                        def.label,
                        f.label,
                        f.density
                    );
                }
            }
        }
        rows.push(CaseStudyRow {
            underestimation: study.runtime.0 / lower_bound.0,
            lower_bound,
            study,
            footprints,
        });
    }
    let mut pairs = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            pairs.push(PairRatio {
                a: a.study.label.clone(),
                b: b.study.label.clone(),
                ratio: cross_platform_ratio(&a.study, &b.study, false),
                toffoli_normalized: cross_platform_ratio(&a.study, &b.study, true),
            });
        }
    }
    Ok(CaseStudyReport { rows, pairs })
}
