//! Shifts and GenShifts unextendible product bases, the bound-entangled
//! states on their complements, and the closed-form bases and product states
//! that attain the entanglement minima.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::optimize::{min_product_overlap, OptimizerOptions, ProductAngles};
use crate::tensor::{
    c, gram_deviation, project_onto, tensor_product, CMatrix, DensityMatrix, Ket, OrthonormalBasis, Projector, C64,
};
use crate::tol;

/// Single-qubit state `cos(t/2)|0⟩ + e^{iχ} sin(t/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitKet {
    amps: [C64; 2],
}

impl QubitKet {
    /// Normalizes and fixes the global phase.
    pub fn new(a0: C64, a1: C64) -> Result<QubitKet> {
        let k = Ket::qubit(a0, a1)?.canonical();
        Ok(QubitKet {
            amps: [k.amplitudes()[0], k.amplitudes()[1]],
        })
    }

    pub fn from_angles(t: f64, chi: f64) -> QubitKet {
        let (s, co) = (t / 2.0).sin_cos();
        QubitKet::new(c(co, 0.0), C64::from_polar(s, chi)).expect("unit amplitudes")
    }

    /// Real state with `|⟨0|φ⟩|² = overlap`.
    pub fn from_overlap(overlap: f64) -> Result<QubitKet> {
        if !(0.0..=1.0).contains(&overlap) {
            return Err(Error::InvalidOptions("overlap must lie in [0, 1]"));
        }
        QubitKet::new(c(overlap.sqrt(), 0.0), c((1.0 - overlap).sqrt(), 0.0))
    }

    pub fn zero() -> QubitKet {
        QubitKet::from_angles(0.0, 0.0)
    }

    pub fn one() -> QubitKet {
        QubitKet::from_angles(PI, 0.0)
    }

    pub fn plus() -> QubitKet {
        QubitKet::from_angles(FRAC_PI_2, 0.0)
    }

    pub fn minus() -> QubitKet {
        QubitKet::from_angles(FRAC_PI_2, PI)
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amps
    }

    /// `(conj a1, −conj a0)` in canonical phase.
    pub fn perp(&self) -> QubitKet {
        QubitKet::new(self.amps[1].conj(), -self.amps[0].conj()).expect("unit amplitudes")
    }

    pub fn to_ket(&self) -> Ket {
        Ket::qubit(self.amps[0], self.amps[1]).expect("unit amplitudes")
    }

    /// `|⟨0|φ⟩|²`.
    pub fn overlap_with_zero(&self) -> f64 {
        self.amps[0].norm_sqr()
    }

    /// `diag(1, e^{−iχ}) |φ⟩`: the real state with the same moduli.
    pub fn real_representative(&self) -> QubitKet {
        QubitKet::new(c(self.amps[0].norm(), 0.0), c(self.amps[1].norm(), 0.0)).expect("unit amplitudes")
    }
}

impl Serialize for QubitKet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_ket().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    Shifts,
    GenShifts(QubitKet),
    /// Any other orthonormal quadruple of product states.
    Custom,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Shifts => "shifts",
            FamilyKind::GenShifts(_) => "genshifts",
            FamilyKind::Custom => "custom",
        }
    }
}

/// Four orthonormal three-qubit product states.
#[derive(Debug, Clone, PartialEq)]
pub struct UpbFamily {
    kind: FamilyKind,
    members: Vec<Ket>,
    min_product_overlap: f64,
    degenerate: bool,
}

/// Options for the extendibility probe run by every family constructor.
fn probe_options() -> OptimizerOptions {
    OptimizerOptions {
        restarts: 16,
        seed: 0,
        ..OptimizerOptions::default()
    }
}

impl UpbFamily {
    fn build(kind: FamilyKind, members: Vec<Ket>) -> Result<UpbFamily> {
        let deviation = gram_deviation(&members);
        if deviation > tol::STRUCTURAL {
            return Err(Error::NotOrthonormal { deviation });
        }
        let span = Projector::onto(&OrthonormalBasis::from_members_unchecked(members.clone()));
        let probe = min_product_overlap(&span, &probe_options())?;
        Ok(UpbFamily {
            kind,
            members,
            min_product_overlap: probe.value,
            degenerate: probe.value < tol::DEGENERATE_OVERLAP,
        })
    }

    /// A family from four orthonormal three-qubit states.
    pub fn from_members(members: Vec<Ket>) -> Result<UpbFamily> {
        if members.len() != 4 || members.iter().any(|k| k.parties() != 3) {
            return Err(Error::ShapeMismatch {
                expected: 4,
                found: members.len(),
            });
        }
        UpbFamily::build(FamilyKind::Custom, members)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn members(&self) -> &[Ket] {
        &self.members
    }

    /// True when some product state is orthogonal to every member.
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// Minimal product-state weight on the span found by the constructor's probe.
    pub fn probe_overlap(&self) -> f64 {
        self.min_product_overlap
    }

    /// `P̃`, the projector onto the span of the members.
    pub fn span_projector(&self) -> Projector {
        Projector::onto(&OrthonormalBasis::from_members_unchecked(self.members.clone()))
    }

    /// `Q̃ = 𝟙 − P̃`.
    pub fn complement_projector(&self) -> Projector {
        self.span_projector().complement()
    }

    /// Orthonormal basis of the complement `Q`: the printed `q_i` for Shifts,
    /// eigenvectors of `Q̃` otherwise.
    pub fn complement_basis(&self) -> OrthonormalBasis {
        match self.kind {
            FamilyKind::Shifts => q_basis(),
            _ => self.complement_projector().range_basis(),
        }
    }

    /// GenShifts parameter of the family, `|+⟩` for Shifts.
    pub fn parameter(&self) -> Option<QubitKet> {
        match self.kind {
            FamilyKind::Shifts => Some(QubitKet::plus()),
            FamilyKind::GenShifts(phi) => Some(phi),
            FamilyKind::Custom => None,
        }
    }
}

fn ket(parts: &[QubitKet]) -> Ket {
    tensor_product(&parts.iter().map(QubitKet::to_ket).collect::<Vec<_>>()).expect("three qubits")
}

fn shifts_members() -> Vec<Ket> {
    let (z, o, p, m) = (QubitKet::zero(), QubitKet::one(), QubitKet::plus(), QubitKet::minus());
    vec![ket(&[z, z, z]), ket(&[o, p, m]), ket(&[m, o, p]), ket(&[p, m, o])]
}

fn genshifts_members(phi: QubitKet) -> Vec<Ket> {
    let (z, o, perp) = (QubitKet::zero(), QubitKet::one(), phi.perp());
    vec![
        ket(&[z, z, z]),
        ket(&[o, phi, perp]),
        ket(&[perp, o, phi]),
        ket(&[phi, perp, o]),
    ]
}

/// `|000⟩, |1+−⟩, |−1+⟩, |+−1⟩`.
pub fn shifts_upb() -> UpbFamily {
    UpbFamily::build(FamilyKind::Shifts, shifts_members()).expect("Shifts members are orthonormal")
}

/// `|000⟩, |1,φ,φ^⊥⟩, |φ^⊥,1,φ⟩, |φ,φ^⊥,1⟩`.
pub fn genshifts_upb(phi: QubitKet) -> UpbFamily {
    UpbFamily::build(FamilyKind::GenShifts(phi), genshifts_members(phi)).expect("GenShifts members are orthonormal")
}

/// `(1/4)(𝟙 − Σ |φ_i⟩⟨φ_i|)`.
pub fn rho_q(upb: &UpbFamily) -> DensityMatrix {
    upb.complement_projector().normalized_state()
}

fn kron3(a: &CMatrix, b: &CMatrix, cm: &CMatrix) -> CMatrix {
    a.kronecker(b).kronecker(cm)
}

fn to_complex(m: Matrix2<f64>) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| c(m[(i, j)], 0.0))
}

/// Shifts `ρ_Q` assembled from its Pauli expansion with `σ± = (σ_z ± σ_x)/√2`:
/// `(1/8)[𝟙 − ½(𝟙⊗σ₊⊗σ₋ + cyclic) − (1/2√2)(σ₊^⊗3 + σ₋^⊗3)]`.
pub fn pauli_form_rho() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let id = CMatrix::identity(2, 2);
    let sp = to_complex(Matrix2::new(s, s, s, -s));
    let sm = to_complex(Matrix2::new(s, -s, -s, -s));
    let cyclic = kron3(&id, &sp, &sm) + kron3(&sm, &id, &sp) + kron3(&sp, &sm, &id);
    let cubes = kron3(&sp, &sp, &sp) + kron3(&sm, &sm, &sm);
    let m = (CMatrix::identity(8, 8) - cyclic.unscale(2.0) - cubes.unscale(2.0 * std::f64::consts::SQRT_2)).unscale(8.0);
    DensityMatrix::from_matrix_unchecked(m, 3)
}

/// The basis `q_0..q_3` of the Shifts complement.
pub fn q_basis() -> OrthonormalBasis {
    let (z, o, p, m) = (QubitKet::zero(), QubitKet::one(), QubitKet::plus(), QubitKet::minus());
    let diff = |a: Ket, b: Ket| Ket::from_vector(a.vector() - b.vector()).expect("distinct states");
    let members = vec![
        diff(ket(&[p, p, p]), ket(&[m, m, m])),
        diff(ket(&[p, o, z]), ket(&[m, z, o])),
        diff(ket(&[z, p, o]), ket(&[o, m, z])),
        diff(ket(&[o, z, p]), ket(&[z, o, m])),
    ];
    OrthonormalBasis::new(members).expect("q basis is orthonormal")
}

/// Closed-form constants of the Shifts state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticConstants {
    /// `arccos(−(√6 − 2)/2)`.
    pub theta0: f64,
    /// `1 − 3√6/8`: geometric measure of `ρ_Q`.
    pub gmin: f64,
    /// `√897/52`: generalized concurrence of `ρ_Q`.
    pub cmin: f64,
    /// `3√6/8`: weight of the optimal product states on `Q`.
    pub overlap: f64,
}

impl AnalyticConstants {
    pub fn get() -> AnalyticConstants {
        let r6 = 6f64.sqrt();
        AnalyticConstants {
            theta0: (-(r6 - 2.0) / 2.0).acos(),
            gmin: 1.0 - 3.0 * r6 / 8.0,
            cmin: 897f64.sqrt() / 52.0,
            overlap: 3.0 * r6 / 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalProductState {
    pub ket: Ket,
    pub angles: ProductAngles,
}

/// The four product states closest to `Q`, all phases zero.
pub fn optimal_product_states() -> Vec<OptimalProductState> {
    let t = AnalyticConstants::get().theta0;
    let table = [
        (t, t, t),
        (PI + t, FRAC_PI_2 - t, 1.5 * PI - t),
        (1.5 * PI - t, PI + t, FRAC_PI_2 - t),
        (FRAC_PI_2 - t, 1.5 * PI - t, PI + t),
    ];
    table
        .iter()
        .map(|&(a, b, g)| {
            let angles = ProductAngles::real(a, b, g);
            OptimalProductState {
                ket: angles.to_ket(),
                angles,
            }
        })
        .collect()
}

/// `ψ_i = Q̃|φ_i⟩ / √(3√6/8)`: a basis of `Q` whose members all have the
/// minimal geometric measure.
pub fn geometric_min_basis() -> OrthonormalBasis {
    let q = shifts_upb().complement_projector();
    let scale = AnalyticConstants::get().overlap.sqrt();
    let members = optimal_product_states()
        .iter()
        .map(|s| {
            let proj = project_onto(&s.ket, &q).expect("optimal states overlap Q");
            Ket::from_vector(proj.vector.unscale(scale)).expect("nonzero projection")
        })
        .collect();
    OrthonormalBasis::new(members).expect("projected optimal states are orthonormal")
}

/// Coordinates of `ψ'_i` in the `q` basis, before the `1/(2√13)` factor.
pub const CONCURRENCE_BASIS_COORDS: [[f64; 4]; 4] = [
    [5.0, 3.0, 3.0, 3.0],
    [3.0, -5.0, 3.0, -3.0],
    [3.0, -3.0, -5.0, 3.0],
    [3.0, 3.0, -3.0, -5.0],
];

/// `ψ'_i`: a basis of `Q` whose members all have the minimal concurrence.
pub fn concurrence_min_basis() -> OrthonormalBasis {
    let q = q_basis();
    let norm = 2.0 * 13f64.sqrt();
    let members = CONCURRENCE_BASIS_COORDS
        .iter()
        .map(|row| {
            let coords: Vec<C64> = row.iter().map(|&x| c(x / norm, 0.0)).collect();
            q.combine(&coords).expect("unit coordinates")
        })
        .collect();
    OrthonormalBasis::new(members).expect("ψ' basis is orthonormal")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceState {
    Ghz,
    W,
    Product,
}

impl FromStr for ReferenceState {
    type Err = Error;
    fn from_str(s: &str) -> Result<ReferenceState> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(ReferenceState::Ghz),
            "w" => Ok(ReferenceState::W),
            "product" => Ok(ReferenceState::Product),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

impl fmt::Display for ReferenceState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceState::Ghz => "ghz",
            ReferenceState::W => "w",
            ReferenceState::Product => "product",
        })
    }
}

impl ReferenceState {
    pub fn ket(self) -> Ket {
        let amps: [f64; 8] = match self {
            ReferenceState::Ghz => [1., 0., 0., 0., 0., 0., 0., 1.],
            ReferenceState::W => [0., 1., 1., 0., 1., 0., 0., 0.],
            ReferenceState::Product => [1., 0., 0., 0., 0., 0., 0., 0.],
        };
        Ket::from_real(&amps).expect("nonzero amplitudes")
    }
}

/// GHZ, W or `|000⟩` by name.
pub fn reference_state(name: &str) -> Result<Ket> {
    Ok(name.parse::<ReferenceState>()?.ket())
}
