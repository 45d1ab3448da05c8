//! Geometric measure and generalized concurrence: pure-state values,
//! decomposition averages, subspace minima and the symmetric ansatz on `Q`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{min_on_sphere, min_product_overlap, OptResult, OptimizerOptions};
use crate::tensor::{c, partial_trace, project_onto, DensityMatrix, Ket, OrthonormalBasis, Parties, Projector};
use crate::tol;
use crate::upb::q_basis;

mod report;

pub use report::{rho_q_entanglement, CertificateStatus, Diagnostics, Evidence, MeasureReport, Residuals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Geometric,
    Concurrence,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 2] = [MeasureKind::Geometric, MeasureKind::Concurrence];

    pub fn short_name(self) -> &'static str {
        match self {
            MeasureKind::Geometric => "eg",
            MeasureKind::Concurrence => "ec",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::Geometric => "geometric",
            MeasureKind::Concurrence => "concurrence",
        })
    }
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<MeasureKind> {
        match s.to_ascii_lowercase().as_str() {
            "eg" | "geometric" => Ok(MeasureKind::Geometric),
            "ec" | "concurrence" => Ok(MeasureKind::Concurrence),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

fn require_three(psi: &Ket) -> Result<()> {
    if psi.parties() == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedRegister { parties: psi.parties() })
    }
}

/// `Σ_S Tr ρ_S²` over the six nonempty proper subsets `S`.
pub fn purity_sum(psi: &Ket) -> Result<f64> {
    require_three(psi)?;
    let rho = psi.density();
    Parties::proper_subsets(3)
        .into_iter()
        .map(|s| partial_trace(&rho, s).map(|r| r.purity()))
        .sum()
}

/// Twice the sum of the single-qubit purities, read directly off the
/// amplitudes. Equal to [`purity_sum`] for pure states.
pub(crate) fn fast_purity_sum(psi: &Ket) -> f64 {
    let a = psi.amplitudes();
    let mut total = 0.0;
    for k in 0..3 {
        let bit = 1 << (2 - k);
        let (mut r00, mut r11, mut r01) = (0.0, 0.0, c(0.0, 0.0));
        for i in (0..8).filter(|i| i & bit == 0) {
            let (x, y) = (a[i], a[i | bit]);
            r00 += x.norm_sqr();
            r11 += y.norm_sqr();
            r01 += x * y.conj();
        }
        total += r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr();
    }
    2.0 * total
}

fn concurrence_from_purity(sum: f64) -> Result<f64> {
    let radicand = 6.0 - sum;
    if radicand < tol::RADICAND_FAIL {
        return Err(Error::NegativeRadicand { radicand });
    }
    Ok((radicand.max(0.0) / 2.0).sqrt())
}

/// `2^{-1/2} √(6 − purity_sum)`.
pub fn concurrence_pure(psi: &Ket) -> Result<f64> {
    concurrence_from_purity(purity_sum(psi)?)
}

/// Objective form of [`concurrence_pure`] for optimizers.
pub(crate) fn concurrence_objective(psi: &Ket) -> f64 {
    ((6.0 - fast_purity_sum(psi)).max(0.0) / 2.0).sqrt()
}

/// The product state maximizing `|⟨ψ|φ⟩|²`, with that overlap.
pub fn closest_product_state(psi: &Ket, opts: &OptimizerOptions) -> Result<(Ket, f64)> {
    require_three(psi)?;
    let r = min_product_overlap(&Projector::complement_of_ket(psi), opts)?;
    let phi = r.argmin.to_ket();
    let overlap = psi.fidelity(&phi);
    Ok((phi, overlap))
}

/// `1 − max_φ |⟨ψ|φ⟩|²`.
pub fn geometric_pure(psi: &Ket, opts: &OptimizerOptions) -> Result<f64> {
    require_three(psi)?;
    Ok(min_product_overlap(&Projector::complement_of_ket(psi), opts)?.value)
}

pub fn pure_measure(kind: MeasureKind, psi: &Ket, opts: &OptimizerOptions) -> Result<f64> {
    match kind {
        MeasureKind::Geometric => geometric_pure(psi, opts),
        MeasureKind::Concurrence => concurrence_pure(psi),
    }
}

/// Weighted pure-state ensemble `Σ p_i |ψ_i⟩⟨ψ_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    weights: Vec<f64>,
    states: Vec<Ket>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<Ket>) -> Result<Decomposition> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidDecomposition("one weight per state required".into()));
        }
        if weights.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidDecomposition("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::InvalidDecomposition(format!("weights sum to {total}")));
        }
        if states.iter().any(|s| s.parties() != states[0].parties()) {
            return Err(Error::InvalidDecomposition("states on different registers".into()));
        }
        Ok(Decomposition { weights, states })
    }

    pub fn uniform(basis: &OrthonormalBasis) -> Decomposition {
        let w = 1.0 / basis.len() as f64;
        Decomposition {
            weights: vec![w; basis.len()],
            states: basis.members().to_vec(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    pub fn density(&self) -> DensityMatrix {
        let d = self.states[0].dim();
        let m = self
            .weights
            .iter()
            .zip(&self.states)
            .fold(crate::tensor::CMatrix::zeros(d, d), |acc, (&p, s)| acc + s.outer().scale(p));
        DensityMatrix::from_matrix_unchecked(m, self.states[0].parties())
    }
}

/// `Σ p_i E(ψ_i)`, an upper bound on the convex roof of the ensemble's state.
pub fn decomposition_average(kind: MeasureKind, d: &Decomposition, opts: &OptimizerOptions) -> Result<f64> {
    d.weights
        .iter()
        .zip(&d.states)
        .map(|(&p, s)| pure_measure(kind, s, opts).map(|e| p * e))
        .sum()
}

/// `min E(ψ)` over unit vectors of the span of `basis`. The geometric case
/// reduces to `min_φ ⟨φ|𝟙 − Π|φ⟩` over product states, `Π` the projector onto
/// the span; its argmin is the normalized projection of the optimal product
/// state.
pub fn subspace_minimum(kind: MeasureKind, basis: &OrthonormalBasis, opts: &OptimizerOptions) -> Result<OptResult<Ket>> {
    match kind {
        MeasureKind::Geometric => {
            let span = Projector::onto(basis);
            let r = min_product_overlap(&span.complement(), opts)?;
            let phi = r.argmin.to_ket();
            let psi = project_onto(&phi, &span)?.normalized.canonical();
            Ok(r.map(|_| psi))
        }
        MeasureKind::Concurrence => min_on_sphere(concurrence_objective, basis, opts),
    }
}

/// `(θ, γ)` of `cos θ q₀ + sin θ e^{iγ}(q₁ + q₂ + q₃)/√3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricPoint {
    theta: f64,
    gamma: f64,
}

impl SymmetricPoint {
    pub fn new(theta: f64, gamma: f64) -> Result<SymmetricPoint> {
        let range = 0.0..=std::f64::consts::PI;
        if !range.contains(&theta) || !range.contains(&gamma) {
            return Err(Error::InvalidOptions("symmetric point angles must lie in [0, π]"));
        }
        Ok(SymmetricPoint { theta, gamma })
    }

    /// `cos²θ = 25/52`, `γ = 0`.
    pub fn optimum() -> SymmetricPoint {
        SymmetricPoint {
            theta: (5.0 / 52f64.sqrt()).acos(),
            gamma: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

pub fn symmetric_state(pt: SymmetricPoint) -> Ket {
    let (s, co) = pt.theta.sin_cos();
    let w = crate::tensor::C64::from_polar(s / 3f64.sqrt(), pt.gamma);
    q_basis().combine(&[c(co, 0.0), w, w, w]).expect("unit coordinates")
}

/// Closed form of `purity_sum(symmetric_state(pt))`.
pub fn symmetric_purity_profile(pt: SymmetricPoint) -> f64 {
    let c2 = pt.theta.cos().powi(2);
    let s2 = 1.0 - c2;
    (10.0 + 25.0 * c2 - 26.0 * c2 * c2) / 3.0 - 4.0 * c2 * s2 * (1.0 - (2.0 * pt.gamma).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upb::{concurrence_min_basis, geometric_min_basis, reference_state, shifts_upb, AnalyticConstants};
    use approx::assert_abs_diff_eq;

    fn opts() -> OptimizerOptions {
        OptimizerOptions::default().with_restarts(16)
    }

    #[test]
    fn purity_sums_of_reference_states() {
        assert_abs_diff_eq!(purity_sum(&reference_state("product").unwrap()).unwrap(), 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(purity_sum(&reference_state("ghz").unwrap()).unwrap(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(purity_sum(&reference_state("w").unwrap()).unwrap(), 10.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn fast_purity_matches_partial_traces() {
        for b in [q_basis(), concurrence_min_basis(), geometric_min_basis()] {
            for m in b.members() {
                assert_abs_diff_eq!(fast_purity_sum(m), purity_sum(m).unwrap(), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn concurrence_reference_values() {
        assert_abs_diff_eq!(concurrence_pure(&reference_state("ghz").unwrap()).unwrap(), 1.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(concurrence_pure(&reference_state("w").unwrap()).unwrap(), 2.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_eq!(concurrence_pure(&reference_state("product").unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn radicand_guard() {
        assert_eq!(concurrence_from_purity(6.0 + 5e-13), Ok(0.0));
        assert!(matches!(concurrence_from_purity(6.0 + 1e-8), Err(Error::NegativeRadicand { .. })));
    }

    #[test]
    fn geometric_reference_values() {
        let w = reference_state("w").unwrap();
        assert_abs_diff_eq!(geometric_pure(&w, &opts()).unwrap(), 5.0 / 9.0, epsilon = 1e-9);
        let ghz = reference_state("ghz").unwrap();
        assert_abs_diff_eq!(geometric_pure(&ghz, &opts()).unwrap(), 0.5, epsilon = 1e-9);
        assert!(geometric_pure(&reference_state("product").unwrap(), &opts()).unwrap() < 1e-12);
    }

    #[test]
    fn closest_product_of_ghz() {
        let (phi, overlap) = closest_product_state(&reference_state("ghz").unwrap(), &opts()).unwrap();
        assert_abs_diff_eq!(overlap, 0.5, epsilon = 1e-9);
        let f0 = phi.fidelity(&Ket::basis(3, 0));
        let f7 = phi.fidelity(&Ket::basis(3, 7));
        assert!(f0 > 1.0 - 1e-8 || f7 > 1.0 - 1e-8);
    }

    #[test]
    fn geometric_subspace_minimum_over_q() {
        let r = subspace_minimum(MeasureKind::Geometric, &q_basis(), &opts()).unwrap();
        assert_abs_diff_eq!(r.value, AnalyticConstants::get().gmin, epsilon = 1e-9);
        assert!(shifts_upb().span_projector().expectation(&r.argmin) < 1e-12);
    }

    #[test]
    fn geometric_subspace_minimum_with_product_member() {
        let b = OrthonormalBasis::new(vec![Ket::basis(3, 1), reference_state("ghz").unwrap()]).unwrap();
        assert!(subspace_minimum(MeasureKind::Geometric, &b, &opts()).unwrap().value < 1e-12);
    }

    #[test]
    fn symmetric_profile_endpoints() {
        let p0 = SymmetricPoint::new(0.0, 0.0).unwrap();
        assert!(symmetric_state(p0).approx_eq(&q_basis().members()[0], 1e-15));
        assert_abs_diff_eq!(symmetric_purity_profile(p0), 3.0, epsilon = 1e-14);
        let opt = SymmetricPoint::optimum();
        assert_abs_diff_eq!(symmetric_purity_profile(opt), 555.0 / 104.0, epsilon = 1e-14);
        assert_abs_diff_eq!(concurrence_pure(&symmetric_state(opt)).unwrap(), AnalyticConstants::get().cmin, epsilon = 1e-12);
        assert!(symmetric_state(opt).approx_eq(&concurrence_min_basis().members()[0], 1e-14));
        assert!(SymmetricPoint::new(4.0, 0.0).is_err());
    }

    #[test]
    fn decomposition_checks() {
        let b = concurrence_min_basis();
        let d = Decomposition::uniform(&b);
        let avg = decomposition_average(MeasureKind::Concurrence, &d, &opts()).unwrap();
        assert_abs_diff_eq!(avg, AnalyticConstants::get().cmin, epsilon = 1e-12);
        let q = decomposition_average(MeasureKind::Concurrence, &Decomposition::uniform(&q_basis()), &opts()).unwrap();
        assert!(q > avg + 1e-3);
        assert!(Decomposition::new(vec![0.5, 0.6], b.members()[..2].to_vec()).is_err());
        assert!(Decomposition::new(vec![1.5, -0.5], b.members()[..2].to_vec()).is_err());
        assert!(DensityMatrix::new(d.density().matrix().clone()).is_ok());
    }

    #[test]
    fn measure_kind_names() {
        assert_eq!("eg".parse::<MeasureKind>().unwrap(), MeasureKind::Geometric);
        assert_eq!("Concurrence".parse::<MeasureKind>().unwrap(), MeasureKind::Concurrence);
        assert!("both".parse::<MeasureKind>().is_err());
    }
}
