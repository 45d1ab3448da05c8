//! Entanglement of `ρ_Q(φ)` across the GenShifts family, as a function of
//! `|⟨0|φ⟩|²` for real `φ`.

use std::fmt::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{rho_q_entanglement, CertificateStatus, MeasureKind};
use crate::optimize::OptimizerOptions;
use crate::par::map_indexed;
use crate::upb::{genshifts_upb, QubitKet};

pub const CSV_HEADER: &str = "overlap,e_geometric,e_concurrence,degenerate";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub overlap: f64,
    pub e_geometric: Option<f64>,
    pub e_concurrence: Option<f64>,
    pub degenerate: bool,
    /// False when some requested measure has only an upper-bound certificate.
    #[serde(skip)]
    pub certified: bool,
}

/// `points` equally spaced overlaps in `[0, 1]`, endpoints included.
pub fn sweep(points: usize, kinds: &[MeasureKind], opts: &OptimizerOptions) -> Result<Vec<SweepRow>> {
    if points < 2 {
        return Err(Error::InvalidOptions("a sweep needs at least two points"));
    }
    opts.validate()?;
    map_indexed(points, opts.execution, |i| {
        let overlap = i as f64 / (points - 1) as f64;
        let family = genshifts_upb(QubitKet::from_overlap(overlap)?);
        let mut row = SweepRow {
            overlap,
            e_geometric: None,
            e_concurrence: None,
            degenerate: family.degenerate(),
            certified: true,
        };
        for &kind in kinds {
            let r = rho_q_entanglement(kind, &family, opts)?;
            row.certified &= r.status != CertificateStatus::UpperBoundOnly;
            match kind {
                MeasureKind::Geometric => row.e_geometric = Some(r.value),
                MeasureKind::Concurrence => row.e_concurrence = Some(r.value),
            }
        }
        Ok(row)
    })
    .into_iter()
    .collect()
}

/// Decimal notation with 12 significant digits.
pub fn format_significant(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { format!("{:.11}", 0.0) } else { v.to_string() };
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let cell = |v: Option<f64>| v.map(format_significant).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            format_significant(r.overlap),
            cell(r.e_geometric),
            cell(r.e_concurrence),
            r.degenerate
        )
        .expect("writing to a String");
    }
    out
}
