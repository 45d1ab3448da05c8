//! Entanglement of `ρ_Q` for a UPB family, with a minimally-entangled basis
//! certificate.

use std::cmp::Ordering;

use serde::Serialize;

use super::{concurrence_objective, pure_measure, MeasureKind};
use crate::error::Result;
use crate::optimize::{product_overlap_restarts, reduce, sphere_restarts, OptResult, OptimizerOptions};
use crate::par::map_indexed;
use crate::tensor::{
    eigh, gram_deviation, max_abs_diff, project_onto, symmetric_orthonormalize, Ket, OrthonormalBasis, PartyPermutation,
    Projector,
};
use crate::tol;
use crate::upb::{concurrence_min_basis, geometric_min_basis, rho_q, FamilyKind, UpbFamily};

/// Two harvested minimizers closer than this in fidelity are the same state.
const SAME_STATE: f64 = 1e-6;
/// Harvested minimizers with pairwise fidelity below this count as orthogonal.
const NEARLY_ORTHOGONAL: f64 = 1e-4;
/// Restarts within this of the best value are harvested as minimizers.
const HARVEST_GEOMETRIC: f64 = 1e-9;
const HARVEST_CONCURRENCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    /// Every basis member attains the minimum.
    Certified,
    /// Some member exceeds the minimum: the basis average is only an upper bound.
    UpperBoundOnly,
    /// The complement contains a product state; `ρ_Q` is separable.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Evidence {
    #[serde(rename = "analytic")]
    Analytic,
    #[serde(rename = "analytic upper bound + numerical evidence")]
    AnalyticUpperBound,
    #[serde(rename = "numerical")]
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `max |G − 𝟙|` of the basis Gram matrix.
    pub orthonormality: f64,
    /// `max_i ⟨ψ_i|P̃|ψ_i⟩`.
    pub membership: f64,
    /// `max |(1/4)Σ|ψ_i⟩⟨ψ_i| − ρ_Q|`.
    pub reconstruction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub restarts: usize,
    pub converged: usize,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure: MeasureKind,
    pub family: &'static str,
    /// `|⟨0|φ⟩|²` of the family parameter.
    pub overlap: Option<f64>,
    pub value: f64,
    pub basis: OrthonormalBasis,
    pub member_values: Vec<f64>,
    pub residuals: Residuals,
    pub diagnostics: Diagnostics,
    pub degenerate: bool,
    pub status: CertificateStatus,
    pub evidence: Evidence,
}

impl MeasureReport {
    pub fn certified(&self) -> bool {
        self.status != CertificateStatus::UpperBoundOnly
    }

    /// `max_i |E(ψ_i) − value|`.
    pub fn member_gap(&self) -> f64 {
        self.member_values
            .iter()
            .map(|v| (v - self.value).abs())
            .fold(0.0, f64::max)
    }
}

fn cyclic_images(family: &UpbFamily, k: Ket) -> Vec<Ket> {
    match family.kind() {
        FamilyKind::Custom => vec![k],
        _ => {
            let cyc = PartyPermutation::cycle();
            let k1 = k.permute(&cyc);
            let k2 = k1.permute(&cyc);
            vec![k, k1, k2]
        }
    }
}

fn dedupe(family: &UpbFamily, candidates: Vec<Ket>) -> Vec<Ket> {
    let mut pool: Vec<Ket> = Vec::new();
    for k in candidates.into_iter().flat_map(|k| cyclic_images(family, k)) {
        if !pool.iter().any(|p| p.fidelity(&k) > 1.0 - SAME_STATE) {
            pool.push(k);
        }
    }
    pool
}

fn member_order(a: &Ket, b: &Ket) -> Ordering {
    let (ma, mb) = (a.amplitudes()[0].norm(), b.amplitudes()[0].norm());
    if (ma - mb).abs() > tol::TIE {
        return mb.total_cmp(&ma);
    }
    let ca = a.amplitudes().iter().flat_map(|z| [z.re, z.im]);
    let cb = b.amplitudes().iter().flat_map(|z| [z.re, z.im]);
    ca.zip(cb)
        .map(|(x, y)| x.total_cmp(&y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// The most nearly orthogonal four minimizers, symmetrically orthonormalized
/// and put in canonical order.
fn select_basis(pool: &[Ket], complement: &Projector) -> Option<OrthonormalBasis> {
    let n = pool.len();
    let f = |i: usize, j: usize| pool[i].fidelity(&pool[j]);
    let mut best: Option<(f64, [usize; 4])> = None;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let idx = [a, b, c, d];
                    let worst = (0..4)
                        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                        .map(|(i, j)| f(idx[i], idx[j]))
                        .fold(0.0, f64::max);
                    if worst < NEARLY_ORTHOGONAL && best.is_none_or(|(w, _)| worst < w) {
                        best = Some((worst, idx));
                    }
                }
            }
        }
    }
    let chosen: Vec<Ket> = match best {
        Some((_, idx)) => idx.iter().map(|&i| pool[i].clone()).collect(),
        None => complete_triple(pool, complement)?,
    };
    let mut members: Vec<Ket> = symmetric_orthonormalize(&chosen)
        .ok()?
        .into_members()
        .into_iter()
        .map(|k| k.canonical())
        .collect();
    members.sort_by(member_order);
    OrthonormalBasis::new(members).ok()
}

/// Three mutually orthogonal minimizers plus the unique state of `Q`
/// orthogonal to them.
fn complete_triple(pool: &[Ket], complement: &Projector) -> Option<Vec<Ket>> {
    let n = pool.len();
    let f = |i: usize, j: usize| pool[i].fidelity(&pool[j]);
    let mut best: Option<(f64, [usize; 3])> = None;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let worst = f(a, b).max(f(a, c)).max(f(b, c));
                if worst < NEARLY_ORTHOGONAL && best.is_none_or(|(w, _)| worst < w) {
                    best = Some((worst, [a, b, c]));
                }
            }
        }
    }
    let (_, idx) = best?;
    let mut chosen: Vec<Ket> = idx.iter().map(|&i| pool[i].clone()).collect();
    let rest = chosen
        .iter()
        .fold(complement.matrix().clone(), |m, k| m - k.outer());
    let (vals, vecs) = eigh(&rest).ok()?;
    let top = vals.len() - 1;
    if (vals[top] - 1.0).abs() > NEARLY_ORTHOGONAL.sqrt() {
        return None;
    }
    chosen.push(Ket::from_vector(vecs.column(top).into_owned()).ok()?);
    Some(chosen)
}

/// Restart outcomes of the subspace minimization, reduced, plus every
/// near-optimal argmin as a state of `Q`.
fn minimize_and_harvest(
    kind: MeasureKind,
    family: &UpbFamily,
    q: &OrthonormalBasis,
    opts: &OptimizerOptions,
) -> Result<(OptResult<Ket>, Vec<Ket>)> {
    match kind {
        MeasureKind::Geometric => {
            let span = family.span_projector();
            let complement = family.complement_projector();
            let outcomes = product_overlap_restarts(&span, opts)?;
            let best = outcomes.iter().map(|o| o.value).fold(f64::INFINITY, f64::min);
            let harvest = outcomes
                .iter()
                .filter(|o| o.converged && o.value <= best + HARVEST_GEOMETRIC)
                .filter_map(|o| project_onto(&o.argmin.to_ket(), &complement).ok())
                .map(|p| p.normalized.canonical())
                .collect();
            let r = reduce(outcomes, opts.max_iterations)?;
            let psi = project_onto(&r.argmin.to_ket(), &complement)?.normalized.canonical();
            Ok((r.map(|_| psi), harvest))
        }
        MeasureKind::Concurrence => {
            let outcomes = sphere_restarts(&concurrence_objective, q, opts)?;
            let best = outcomes.iter().map(|o| o.value).fold(f64::INFINITY, f64::min);
            let to_ket = |coords: &[crate::tensor::C64]| q.combine(coords).expect("unit coordinates").canonical();
            let harvest = outcomes
                .iter()
                .filter(|o| o.converged && o.value <= best + HARVEST_CONCURRENCE)
                .map(|o| to_ket(&o.argmin))
                .collect();
            let outcomes = outcomes
                .into_iter()
                .map(|o| crate::optimize::RestartOutcome {
                    value: o.value,
                    argmin: to_ket(&o.argmin),
                    iterations: o.iterations,
                    converged: o.converged,
                })
                .collect();
            Ok((reduce(outcomes, opts.max_iterations)?, harvest))
        }
    }
}

fn residuals(basis: &OrthonormalBasis, family: &UpbFamily) -> Residuals {
    let span = family.span_projector();
    Residuals {
        orthonormality: gram_deviation(basis.members()),
        membership: basis
            .members()
            .iter()
            .map(|m| span.expectation(m))
            .fold(0.0, f64::max),
        reconstruction: max_abs_diff(basis.uniform_mixture().matrix(), rho_q(family).matrix()),
    }
}

/// `E(ρ_Q) = min_{ψ ∈ Q} E(ψ)`, certified by an orthonormal basis of `Q`
/// whose members all attain the minimum.
///
/// Shifts uses the closed-form bases. Other families use the minimizers
/// found by the restarts, closed under cyclic relabeling. For a degenerate
/// family the value is 0 and the basis is built from product states in `Q`.
pub fn rho_q_entanglement(kind: MeasureKind, family: &UpbFamily, opts: &OptimizerOptions) -> Result<MeasureReport> {
    let q = family.complement_basis();
    let harvest_kind = if family.degenerate() { MeasureKind::Geometric } else { kind };
    let (min, harvest) = minimize_and_harvest(harvest_kind, family, &q, opts)?;
    let (min, harvest) = if harvest_kind == kind {
        (min, harvest)
    } else {
        (minimize_and_harvest(kind, family, &q, opts)?.0, harvest)
    };

    let (basis, evidence) = match (family.kind(), kind) {
        (FamilyKind::Shifts, MeasureKind::Geometric) => (Some(geometric_min_basis()), Evidence::Analytic),
        (FamilyKind::Shifts, MeasureKind::Concurrence) => (Some(concurrence_min_basis()), Evidence::AnalyticUpperBound),
        _ => (select_basis(&dedupe(family, harvest), &family.complement_projector()), Evidence::Numerical),
    };
    let found = basis.is_some();
    let basis = basis.unwrap_or(q);
    let member_values = map_indexed(basis.len(), opts.execution, |i| pure_measure(kind, &basis.members()[i], opts))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let residuals = residuals(&basis, family);

    let value = if family.degenerate() { 0.0 } else { min.value };
    let gap = member_values.iter().map(|v| (v - value).abs()).fold(0.0, f64::max);
    let status = if family.degenerate() {
        CertificateStatus::Degenerate
    } else if found && gap <= tol::CERTIFICATE_GAP && residuals.reconstruction < tol::SPECTRAL {
        CertificateStatus::Certified
    } else {
        CertificateStatus::UpperBoundOnly
    };
    Ok(MeasureReport {
        measure: kind,
        family: family.kind().name(),
        overlap: family.parameter().map(|p| p.overlap_with_zero()),
        value,
        basis,
        member_values,
        residuals,
        diagnostics: Diagnostics {
            restarts: min.restarts,
            converged: min.converged,
            spread: min.spread,
        },
        degenerate: family.degenerate(),
        status,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upb::{genshifts_upb, shifts_upb, AnalyticConstants, QubitKet};
    use approx::assert_abs_diff_eq;

    fn opts() -> OptimizerOptions {
        OptimizerOptions::default().with_restarts(32)
    }

    #[test]
    fn shifts_geometric_report() {
        let r = rho_q_entanglement(MeasureKind::Geometric, &shifts_upb(), &opts()).unwrap();
        let k = AnalyticConstants::get();
        assert_abs_diff_eq!(r.value, k.gmin, epsilon = 1e-9);
        assert!(r.member_gap() < 1e-9, "{:?}", r.member_values);
        assert_eq!(r.status, CertificateStatus::Certified);
        assert_eq!(r.evidence, Evidence::Analytic);
        assert!(r.residuals.reconstruction < 1e-12);
    }

    #[test]
    fn shifts_concurrence_report() {
        let r = rho_q_entanglement(MeasureKind::Concurrence, &shifts_upb(), &opts()).unwrap();
        assert_abs_diff_eq!(r.value, AnalyticConstants::get().cmin, epsilon = 1e-6);
        assert_eq!(r.status, CertificateStatus::Certified);
        assert_eq!(r.evidence, Evidence::AnalyticUpperBound);
    }

    #[test]
    fn genshifts_interior_certificates() {
        let fam = genshifts_upb(QubitKet::from_overlap(0.3).unwrap());
        for kind in MeasureKind::ALL {
            let r = rho_q_entanglement(kind, &fam, &opts()).unwrap();
            assert_eq!(r.status, CertificateStatus::Certified, "{kind}: {:?}", r.member_values);
            assert!(r.residuals.orthonormality < 1e-12);
            assert!(r.residuals.membership < 1e-12);
            assert!(r.residuals.reconstruction < 1e-10);
            assert!(r.member_gap() < 1e-8, "{kind}: {:?} vs {}", r.member_values, r.value);
        }
    }

    #[test]
    fn genshifts_midpoint_matches_shifts() {
        let fam = genshifts_upb(QubitKet::from_overlap(0.5).unwrap());
        let k = AnalyticConstants::get();
        let g = rho_q_entanglement(MeasureKind::Geometric, &fam, &opts()).unwrap();
        assert_abs_diff_eq!(g.value, k.gmin, epsilon = 1e-9);
        let c = rho_q_entanglement(MeasureKind::Concurrence, &fam, &opts()).unwrap();
        assert_abs_diff_eq!(c.value, k.cmin, epsilon = 1e-6);
        assert_eq!(c.status, CertificateStatus::Certified);
    }

    #[test]
    fn degenerate_endpoint() {
        let fam = genshifts_upb(QubitKet::zero());
        for kind in MeasureKind::ALL {
            let r = rho_q_entanglement(kind, &fam, &opts()).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(r.degenerate);
            assert_eq!(r.status, CertificateStatus::Degenerate);
            assert!(r.member_values.iter().all(|&v| v < 1e-8), "{kind}: {:?}", r.member_values);
        }
    }

    #[test]
    fn few_restarts_still_certify() {
        let fam = genshifts_upb(QubitKet::from_overlap(0.3).unwrap());
        for kind in MeasureKind::ALL {
            for seed in 0..4 {
                let o = OptimizerOptions::default().with_restarts(8).with_seed(seed);
                let r = rho_q_entanglement(kind, &fam, &o).unwrap();
                assert_eq!(r.status, CertificateStatus::Certified, "{kind} seed {seed}: {:?}", r.member_values);
            }
        }
    }

    #[test]
    fn canonical_member_order() {
        let fam = genshifts_upb(QubitKet::from_overlap(0.2).unwrap());
        let r = rho_q_entanglement(MeasureKind::Geometric, &fam, &opts()).unwrap();
        let firsts: Vec<f64> = r.basis.members().iter().map(|m| m.amplitudes()[0].norm()).collect();
        assert!(firsts.windows(2).all(|w| w[0] >= w[1] - tol::TIE), "{firsts:?}");
    }
}
