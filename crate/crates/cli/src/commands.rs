use std::fmt;
use std::io::{self, Write};

use serde_json::{json, Value};

use qent_core::certify::{certify_family, certify_state, CertReport, ScanOptions};
use qent_core::measures::{rho_q_entanglement, CertificateStatus, MeasureKind, MeasureReport};
use qent_core::optimize::OptimizerOptions;
use qent_core::sweep::{format_significant, sweep, to_csv};
use qent_core::tensor::{gram_deviation, max_abs_diff, DensityMatrix, OrthonormalBasis};
use qent_core::upb::{
    concurrence_min_basis, geometric_min_basis, genshifts_upb, optimal_product_states, q_basis, rho_q, shifts_upb,
    QubitKet, UpbFamily,
};

use crate::args::{CertifyTarget, Command, FamilyArg, Format, MeasureArg, Search, SingleMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok,
    CertificationFailure,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::CertificationFailure => 2,
        }
    }
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Core(qent_core::Error),
    Io(io::Error),
}

impl CliError {
    pub(crate) fn code(&self) -> i32 {
        1
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<qent_core::Error> for CliError {
    fn from(e: qent_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn options(search: &Search, seed_override: Option<u64>) -> Result<OptimizerOptions, CliError> {
    let opts = OptimizerOptions {
        restarts: search.restarts,
        seed: seed_override.unwrap_or(search.seed),
        ..OptimizerOptions::default()
    };
    opts.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(opts)
}

fn family(kind: FamilyArg, overlap: f64) -> Result<UpbFamily, CliError> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(CliError::Usage(format!("--overlap must lie in [0, 1], got {overlap}")));
    }
    Ok(match kind {
        FamilyArg::Shifts => shifts_upb(),
        FamilyArg::Genshifts => genshifts_upb(QubitKet::from_overlap(overlap)?),
    })
}

fn kind(m: SingleMeasure) -> MeasureKind {
    match m {
        SingleMeasure::Eg => MeasureKind::Geometric,
        SingleMeasure::Ec => MeasureKind::Concurrence,
    }
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

/// The serialized form of a measure report.
pub fn measure_report_json(r: &MeasureReport, opts: &OptimizerOptions) -> Value {
    json!({
        "family": r.family,
        "parameters": { "overlap": r.overlap, "restarts": opts.restarts, "seed": opts.seed },
        "measure": r.measure,
        "value": r.value,
        "basis": r.basis,
        "member_values": r.member_values,
        "diagnostics": r.diagnostics,
        "certification": {
            "status": r.status,
            "evidence": r.evidence,
            "degenerate": r.degenerate,
            "member_gap": r.member_gap(),
            "residuals": r.residuals,
        },
    })
}

fn reconstruction(basis: &OrthonormalBasis, rho: &DensityMatrix) -> f64 {
    max_abs_diff(basis.uniform_mixture().matrix(), rho.matrix())
}

/// The serialized form of a closed-form basis of the Shifts complement.
pub fn basis_json(m: SingleMeasure) -> Value {
    let basis = match m {
        SingleMeasure::Eg => geometric_min_basis(),
        SingleMeasure::Ec => concurrence_min_basis(),
    };
    let q = q_basis();
    let coordinates: Vec<Vec<[f64; 2]>> = basis
        .members()
        .iter()
        .map(|k| q.coordinates(k).iter().map(|z| [z.re, z.im]).collect())
        .collect();
    let span = shifts_upb().span_projector();
    let membership = basis.members().iter().map(|k| span.expectation(k)).fold(0.0, f64::max);
    let residual = reconstruction(&basis, &rho_q(&shifts_upb()));
    let mut v = json!({
        "measure": kind(m),
        "basis": basis,
        "q_coordinates": coordinates,
        "orthonormality": gram_deviation(basis.members()),
        "membership": membership,
        "reconstruction": residual < 1e-12,
        "reconstruction_residual": residual,
    });
    if m == SingleMeasure::Eg {
        let angles: Vec<_> = optimal_product_states().into_iter().map(|s| s.angles).collect();
        v["closest_product_states"] = json!(angles);
    }
    v
}

fn cert_json(target: &str, overlap: Option<f64>, tol: f64, report: &CertReport) -> Value {
    json!({
        "family": target,
        "parameters": { "overlap": overlap, "tol": tol },
        "certification": report,
        "passed": report.passes(tol),
    })
}

pub(crate) fn execute(command: Command, seed_override: Option<u64>, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    match command {
        Command::Measures {
            family: fam,
            overlap,
            measure,
            search,
            format,
        } => {
            let opts = options(&search, seed_override)?;
            let family = family(fam, overlap)?;
            let kinds: &[MeasureKind] = match measure {
                MeasureArg::Eg => &[MeasureKind::Geometric],
                MeasureArg::Ec => &[MeasureKind::Concurrence],
                MeasureArg::Both => &MeasureKind::ALL,
            };
            let reports = kinds
                .iter()
                .map(|&k| rho_q_entanglement(k, &family, &opts))
                .collect::<qent_core::Result<Vec<_>>>()?;
            match format {
                Format::Json => {
                    let mut values: Vec<Value> = reports.iter().map(|r| measure_report_json(r, &opts)).collect();
                    let v = if values.len() == 1 { values.remove(0) } else { Value::Array(values) };
                    write_json(out, &v)?;
                }
                Format::Csv => {
                    writeln!(out, "family,overlap,measure,value,status,degenerate")?;
                    for r in &reports {
                        let status = serde_json::to_value(r.status)?;
                        writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            r.family,
                            r.overlap.map(format_significant).unwrap_or_default(),
                            r.measure.short_name(),
                            format_significant(r.value),
                            status.as_str().unwrap_or_default(),
                            r.degenerate
                        )?;
                    }
                }
            }
            let failed = reports.iter().any(|r| r.status == CertificateStatus::UpperBoundOnly);
            Ok(if failed { ExitStatus::CertificationFailure } else { ExitStatus::Ok })
        }
        Command::Sweep {
            points,
            measures,
            search,
            out: path,
        } => {
            let opts = options(&search, seed_override)?;
            let mut kinds: Vec<MeasureKind> = measures.into_iter().map(kind).collect();
            kinds.sort_by_key(|k| *k as u8);
            kinds.dedup();
            let rows = sweep(points, &kinds, &opts).map_err(|e| match e {
                qent_core::Error::InvalidOptions(m) => CliError::Usage(m.to_string()),
                e => CliError::Core(e),
            })?;
            let csv = to_csv(&rows);
            match path {
                Some(p) => std::fs::write(&p, csv)
                    .map_err(|e| CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display()))))?,
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(if rows.iter().all(|r| r.certified) {
                ExitStatus::Ok
            } else {
                ExitStatus::CertificationFailure
            })
        }
        Command::Basis { measure } => {
            let v = basis_json(measure);
            write_json(out, &v)?;
            Ok(ExitStatus::Ok)
        }
        Command::Certify {
            family: target,
            overlap,
            tol,
            search,
            theta_points,
            phi_points,
        } => {
            let opts = options(&search, seed_override)?;
            let scan = ScanOptions {
                theta_points,
                phi_points,
                ..ScanOptions::default()
            };
            let (name, overlap, report) = match target {
                CertifyTarget::MaximallyMixed => ("maximally-mixed", None, certify_state(&DensityMatrix::maximally_mixed(3))?),
                CertifyTarget::Shifts | CertifyTarget::Genshifts => {
                    let fam = family(
                        if target == CertifyTarget::Shifts { FamilyArg::Shifts } else { FamilyArg::Genshifts },
                        overlap,
                    )?;
                    let overlap = fam.parameter().map(|p| p.overlap_with_zero());
                    (fam.kind().name(), overlap, certify_family(&fam, &opts, &scan)?)
                }
            };
            let v = cert_json(name, overlap, tol, &report);
            write_json(out, &v)?;
            Ok(if report.passes(tol) {
                ExitStatus::Ok
            } else {
                ExitStatus::CertificationFailure
            })
        }
    }
}
