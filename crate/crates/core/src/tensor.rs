//! Dense complex linear algebra for registers of at most three qubits.
//!
//! Index convention: the computational basis state `|abc⟩` has amplitude
//! index `4a + 2b + c`, i.e. party A is the most significant bit and tensor
//! factors are always ordered A⊗B⊗C. Party `k` of an `n`-party register
//! therefore owns bit `n - 1 - k` of an index.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const MAX_PARTIES: usize = 3;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// One tensor factor of the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::A, Party::B, Party::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Option<Party> {
        Party::ALL.get(k).copied()
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Party::A => "A",
            Party::B => "B",
            Party::C => "C",
        };
        f.write_str(s)
    }
}

/// A subset of parties, stored as a bitmask over party indices (A = bit 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Parties(u8);

impl Parties {
    pub const EMPTY: Parties = Parties(0);

    pub fn of(parties: &[Party]) -> Parties {
        Parties(parties.iter().fold(0, |m, p| m | (1 << p.index())))
    }

    pub fn all(n: usize) -> Parties {
        Parties(((1u16 << n) - 1) as u8)
    }

    pub fn from_mask(mask: u8) -> Parties {
        Parties(mask)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 & (1 << k) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n: usize) -> Parties {
        Parties(!self.0 & Parties::all(n).0)
    }

    /// Party indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..8).filter(|&k| self.contains(k)).collect()
    }

    /// All nonempty proper subsets of an `n`-party register, ordered by mask.
    pub fn proper_subsets(n: usize) -> Vec<Parties> {
        (1..(1u8 << n) - 1).map(Parties).collect()
    }

    fn fits(self, n: usize) -> bool {
        self.0 & !Parties::all(n).0 == 0
    }

    /// Index bits owned by this subset inside an `n`-party register.
    fn index_mask(self, n: usize) -> usize {
        self.indices().iter().map(|&k| 1usize << (n - 1 - k)).sum()
    }
}

fn parties_for_dim(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::BadDimension { len });
    }
    let n = len.trailing_zeros() as usize;
    if n == 0 || n > MAX_PARTIES {
        return Err(Error::UnsupportedRegister { parties: n });
    }
    Ok(n)
}

/// Place the bits of `local` (an index over `parties`, first party most
/// significant) into their positions inside an `n`-party index.
fn scatter(local: usize, parties: &[usize], n: usize) -> usize {
    let m = parties.len();
    parties.iter().enumerate().fold(0, |acc, (pos, &k)| {
        let bit = (local >> (m - 1 - pos)) & 1;
        acc | (bit << (n - 1 - k))
    })
}

/// Unit-norm state vector of a register of 1 to 3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
    parties: usize,
}

impl Ket {
    /// Normalizes `amps`. The length must be 2, 4 or 8.
    pub fn new(amps: Vec<C64>) -> Result<Ket> {
        Ket::from_vector(CVector::from_vec(amps))
    }

    pub fn from_vector(v: CVector) -> Result<Ket> {
        let parties = parties_for_dim(v.len())?;
        let norm = v.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Ket {
            amps: v.unscale(norm),
            parties,
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Ket> {
        Ket::new(amps.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis state `index` of an `n`-party register.
    pub fn basis(parties: usize, index: usize) -> Ket {
        let mut amps = CVector::zeros(1 << parties);
        amps[index] = ONE;
        Ket { amps, parties }
    }

    pub fn qubit(a0: C64, a1: C64) -> Result<Ket> {
        Ket::new(vec![a0, a1])
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn vector(&self) -> &CVector {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Same ray with the first significant amplitude real and positive.
    pub fn canonical(&self) -> Ket {
        Ket {
            amps: canonical_phase(&self.amps),
            parties: self.parties,
        }
    }

    /// Equality of rays: compares canonical forms entrywise.
    pub fn approx_eq(&self, other: &Ket, tol: f64) -> bool {
        self.dim() == other.dim()
            && canonical_phase(&self.amps)
                .iter()
                .zip(canonical_phase(&other.amps).iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `|self⟩⟨self|`.
    pub fn outer(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            m: self.outer(),
            parties: self.parties,
        }
    }

    /// Reorders tensor factors: factor `k` of `self` lands in slot `perm[k]`.
    pub fn permute(&self, perm: &PartyPermutation) -> Ket {
        Ket {
            amps: perm.matrix(self.parties) * &self.amps,
            parties: self.parties,
        }
    }
}

pub(crate) fn canonical_phase(v: &CVector) -> CVector {
    match v.iter().find(|a| a.norm() > tol::PHASE_CUTOFF) {
        Some(first) => {
            let phase = first.conj() / first.norm();
            v.map(|a| a * phase)
        }
        None => v.clone(),
    }
}

impl Serialize for Ket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for a in self.amps.iter() {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Ket {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Ket, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ket::new(pairs.iter().map(|p| c(p[0], p[1])).collect()).map_err(de::Error::custom)
    }
}

impl Serialize for OrthonormalBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrthonormalBasis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<OrthonormalBasis, D::Error> {
        OrthonormalBasis::new(Vec::<Ket>::deserialize(d)?).map_err(de::Error::custom)
    }
}

/// Kronecker product of the factors in order A⊗B⊗C.
pub fn tensor_product(factors: &[Ket]) -> Result<Ket> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyFactors)?;
    let parties: usize = factors.iter().map(Ket::parties).sum();
    if parties > MAX_PARTIES {
        return Err(Error::UnsupportedRegister { parties });
    }
    let amps = rest
        .iter()
        .fold(first.amps.clone(), |acc, f| acc.kronecker(&f.amps));
    Ok(Ket { amps, parties })
}

/// Max entrywise deviation of `m` from its adjoint.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Max entrywise distance between two matrices of equal shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn real_trace(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Hermitian, positive semidefinite, unit-trace operator on 1 to 3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
    parties: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace at 1e-12 and positivity at -1e-12.
    pub fn new(m: CMatrix) -> Result<DensityMatrix> {
        if !m.is_square() {
            return Err(Error::InvalidDensity {
                reason: format!("matrix is {}x{}", m.nrows(), m.ncols()),
            });
        }
        let parties = parties_for_dim(m.nrows())?;
        let dev = hermitian_deviation(&m);
        if dev > tol::STRUCTURAL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tol::STRUCTURAL {
            return Err(Error::InvalidDensity {
                reason: format!("trace {tr} differs from 1"),
            });
        }
        let lowest = eigvals_hermitian(&m)?[0];
        if lowest < -tol::STRUCTURAL {
            return Err(Error::InvalidDensity {
                reason: format!("negative eigenvalue {lowest:e}"),
            });
        }
        Ok(DensityMatrix { m, parties })
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix, parties: usize) -> DensityMatrix {
        DensityMatrix { m, parties }
    }

    pub fn maximally_mixed(parties: usize) -> DensityMatrix {
        let d = 1 << parties;
        DensityMatrix {
            m: CMatrix::identity(d, d).unscale(d as f64),
            parties,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ ρ) = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvals_hermitian(&self.m).expect("density matrices are Hermitian")
    }

    /// `Π ρ Π†` for the party permutation `perm`.
    pub fn permute(&self, perm: &PartyPermutation) -> DensityMatrix {
        let p = perm.matrix(self.parties);
        DensityMatrix {
            m: &p * &self.m * p.adjoint(),
            parties: self.parties,
        }
    }
}

/// Orthogonal projector onto a subspace of a register.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    m: CMatrix,
    rank: usize,
    parties: usize,
}

impl Projector {
    /// Validates Hermiticity and idempotence at 1e-12; the rank is the rounded trace.
    pub fn new(m: CMatrix) -> Result<Projector> {
        if !m.is_square() {
            return Err(Error::InvalidProjector {
                reason: format!("matrix is {}x{}", m.nrows(), m.ncols()),
            });
        }
        let parties = parties_for_dim(m.nrows())?;
        let dev = hermitian_deviation(&m);
        if dev > tol::STRUCTURAL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let idem = max_abs_diff(&(&m * &m), &m);
        if idem > tol::STRUCTURAL {
            return Err(Error::InvalidProjector {
                reason: format!("P² differs from P by {idem:e}"),
            });
        }
        let tr = real_trace(&m);
        let rank = tr.round();
        if (tr - rank).abs() > tol::SPECTRAL {
            return Err(Error::InvalidProjector {
                reason: format!("trace {tr} is not an integer"),
            });
        }
        Ok(Projector {
            m,
            rank: rank as usize,
            parties,
        })
    }

    pub fn identity(parties: usize) -> Projector {
        let d = 1 << parties;
        Projector {
            m: CMatrix::identity(d, d),
            rank: d,
            parties,
        }
    }

    /// Projector onto the span of an orthonormal set.
    pub fn onto(basis: &OrthonormalBasis) -> Projector {
        let d = basis.dim();
        let m = basis
            .members()
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k.outer());
        Projector {
            m,
            rank: basis.len(),
            parties: basis.parties(),
        }
    }

    /// `𝟙 − |ψ⟩⟨ψ|`.
    pub fn complement_of_ket(ket: &Ket) -> Projector {
        let d = ket.dim();
        Projector {
            m: CMatrix::identity(d, d) - ket.outer(),
            rank: d - 1,
            parties: ket.parties(),
        }
    }

    /// `𝟙 − P`.
    pub fn complement(&self) -> Projector {
        let d = self.dim();
        Projector {
            m: CMatrix::identity(d, d) - &self.m,
            rank: d - self.rank,
            parties: self.parties,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, ket: &Ket) -> f64 {
        ket.vector().dotc(&(&self.m * ket.vector())).re
    }

    /// `P / rank` as a density matrix.
    pub fn normalized_state(&self) -> DensityMatrix {
        DensityMatrix {
            m: self.m.unscale(self.rank as f64),
            parties: self.parties,
        }
    }

    /// Orthonormal basis of the range, from the eigenvectors with eigenvalue 1.
    pub fn range_basis(&self) -> OrthonormalBasis {
        let (vals, vecs) = eigh(&self.m).expect("projectors are Hermitian");
        let d = self.dim();
        let members = (d - self.rank..d)
            .map(|j| {
                debug_assert!((vals[j] - 1.0).abs() < 1e-8);
                Ket::from_vector(vecs.column(j).into_owned())
                    .expect("eigenvectors are nonzero")
                    .canonical()
            })
            .collect();
        OrthonormalBasis { members }
    }
}

/// Ordered list of mutually orthonormal kets on the same register.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    members: Vec<Ket>,
}

impl OrthonormalBasis {
    /// Validates the Gram matrix against the identity at 1e-12.
    pub fn new(members: Vec<Ket>) -> Result<OrthonormalBasis> {
        if let Some(first) = members.first() {
            if let Some(bad) = members.iter().find(|k| k.dim() != first.dim()) {
                return Err(Error::ShapeMismatch {
                    expected: first.dim(),
                    found: bad.dim(),
                });
            }
        }
        let deviation = gram_deviation(&members);
        if deviation > tol::STRUCTURAL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(OrthonormalBasis { members })
    }

    pub(crate) fn from_members_unchecked(members: Vec<Ket>) -> OrthonormalBasis {
        OrthonormalBasis { members }
    }

    pub fn members(&self) -> &[Ket] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Ket> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members.first().map_or(0, Ket::dim)
    }

    pub fn parties(&self) -> usize {
        self.members.first().map_or(0, Ket::parties)
    }

    pub fn gram(&self) -> CMatrix {
        gram(&self.members)
    }

    pub fn projector(&self) -> Projector {
        Projector::onto(self)
    }

    /// `(1/k) Σ |ψ_i⟩⟨ψ_i|`.
    pub fn uniform_mixture(&self) -> DensityMatrix {
        self.projector().normalized_state()
    }

    pub fn coordinates(&self, ket: &Ket) -> Vec<C64> {
        self.members.iter().map(|b| b.inner(ket)).collect()
    }

    /// Normalized `Σ coords[i] |b_i⟩`.
    pub fn combine(&self, coords: &[C64]) -> Result<Ket> {
        if coords.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                found: coords.len(),
            });
        }
        let v = self
            .members
            .iter()
            .zip(coords)
            .fold(CVector::zeros(self.dim()), |acc, (b, &w)| acc + b.vector() * w);
        Ket::from_vector(v)
    }

    pub fn permute(&self, perm: &PartyPermutation) -> OrthonormalBasis {
        OrthonormalBasis {
            members: self.members.iter().map(|k| k.permute(perm)).collect(),
        }
    }
}

pub fn gram(kets: &[Ket]) -> CMatrix {
    let n = kets.len();
    CMatrix::from_fn(n, n, |i, j| kets[i].inner(&kets[j]))
}

/// Max entrywise deviation of the Gram matrix from the identity.
pub fn gram_deviation(kets: &[Ket]) -> f64 {
    let g = gram(kets);
    let n = kets.len();
    max_abs_diff(&g, &CMatrix::identity(n, n))
}

/// Reduced state on `keep`. Keeping every party returns `rho` itself.
pub fn partial_trace(rho: &DensityMatrix, keep: Parties) -> Result<DensityMatrix> {
    let n = rho.parties();
    if keep.is_empty() {
        return Err(Error::InvalidParties {
            mask: keep.mask(),
            reason: "nothing to keep",
        });
    }
    if !keep.fits(n) {
        return Err(Error::InvalidParties {
            mask: keep.mask(),
            reason: "party outside the register",
        });
    }
    if keep == Parties::all(n) {
        return Ok(rho.clone());
    }
    let kept = keep.indices();
    let traced = keep.complement(n).indices();
    let dk = 1 << kept.len();
    let dt = 1 << traced.len();
    let m = rho.matrix();
    let out = CMatrix::from_fn(dk, dk, |i, j| {
        let (ri, rj) = (scatter(i, &kept, n), scatter(j, &kept, n));
        (0..dt)
            .map(|t| {
                let s = scatter(t, &traced, n);
                m[(ri | s, rj | s)]
            })
            .sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(out, kept.len()))
}

/// Transpose on the factors in `subset`. Returns a Hermitian matrix that is
/// generally not positive.
pub fn partial_transpose(rho: &DensityMatrix, subset: Parties) -> Result<CMatrix> {
    let n = rho.parties();
    if subset.is_empty() || subset == Parties::all(n) || !subset.fits(n) {
        return Err(Error::InvalidParties {
            mask: subset.mask(),
            reason: "partial transpose needs a nonempty proper subset",
        });
    }
    Ok(partial_transpose_matrix(rho.matrix(), n, subset))
}

/// Partial transpose of any `2^n × 2^n` operator on the parties in `subset`.
pub fn partial_transpose_matrix(m: &CMatrix, n: usize, subset: Parties) -> CMatrix {
    let mask = subset.index_mask(n);
    let d = m.nrows();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let ti = (i & !mask) | (j & mask);
            let tj = (j & !mask) | (i & mask);
            out[(ti, tj)] = m[(i, j)];
        }
    }
    out
}

/// Unnormalized projection of a state together with its weight `⟨φ|P|φ⟩`.
#[derive(Debug, Clone)]
pub struct Projection {
    pub vector: CVector,
    pub weight: f64,
    pub normalized: Ket,
}

/// Projects `ket` onto the range of `sub`. Weights at or below 1e-12 are
/// reported as [`Error::OrthogonalToSubspace`].
pub fn project_onto(ket: &Ket, sub: &Projector) -> Result<Projection> {
    if ket.dim() != sub.dim() {
        return Err(Error::ShapeMismatch {
            expected: sub.dim(),
            found: ket.dim(),
        });
    }
    let vector = sub.matrix() * ket.vector();
    let weight = ket.vector().dotc(&vector).re;
    if weight <= tol::ORTHOGONAL_WEIGHT {
        return Err(Error::OrthogonalToSubspace { weight });
    }
    let mut amps = vector.unscale(weight.sqrt());
    // P φ has norm² = ⟨φ|P|φ⟩ only up to rounding; renormalize exactly.
    amps.unscale_mut(amps.norm());
    let normalized = Ket {
        amps,
        parties: ket.parties(),
    };
    Ok(Projection {
        vector,
        weight,
        normalized,
    })
}

/// Sequential (modified) Gram-Schmidt with one reorthogonalization pass.
/// Deterministic given the input order; phases of the inputs are kept.
pub fn orthonormalize(kets: &[Ket]) -> Result<OrthonormalBasis> {
    let mut out: Vec<Ket> = Vec::with_capacity(kets.len());
    for (index, k) in kets.iter().enumerate() {
        if let Some(first) = out.first() {
            if k.dim() != first.dim() {
                return Err(Error::ShapeMismatch {
                    expected: first.dim(),
                    found: k.dim(),
                });
            }
        }
        let start = k.vector().unscale(k.norm());
        let mut v = start.clone();
        for _ in 0..2 {
            for b in &out {
                let overlap = b.vector().dotc(&v);
                v -= b.vector() * overlap;
            }
        }
        if v.norm_squared() <= tol::DEPENDENT_RESIDUAL {
            return Err(Error::LinearlyDependent { index });
        }
        out.push(Ket::from_vector(v)?);
    }
    Ok(OrthonormalBasis { members: out })
}

/// Löwdin orthonormalization `B (B†B)^{-1/2}`: the orthonormal set closest to
/// the inputs in Frobenius norm, treating all inputs symmetrically.
pub fn symmetric_orthonormalize(kets: &[Ket]) -> Result<OrthonormalBasis> {
    let Some(first) = kets.first() else {
        return Ok(OrthonormalBasis { members: vec![] });
    };
    let d = first.dim();
    let b = CMatrix::from_fn(d, kets.len(), |i, j| kets[j].amplitudes()[i]);
    let s = b.adjoint() * &b;
    let (vals, vecs) = eigh(&s)?;
    if let Some(index) = vals.iter().position(|&v| v <= tol::DEPENDENT_RESIDUAL) {
        return Err(Error::LinearlyDependent { index });
    }
    let inv_sqrt = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(1.0 / v.sqrt(), 0.0)),
    ));
    let s_inv_sqrt = &vecs * inv_sqrt * vecs.adjoint();
    let ortho = b * s_inv_sqrt;
    let members = (0..kets.len())
        .map(|j| Ket::from_vector(ortho.column(j).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrthonormalBasis { members })
}

fn check_hermitian_input(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let deviation = hermitian_deviation(m);
    if deviation > tol::SPECTRAL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvals_hermitian(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian_input(m)?;
    let mut vals: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Ascending eigenvalues with the matching unit eigenvectors as columns.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian_input(m)?;
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), order.len(), |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    Ok((vals, vecs))
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).unscale(2.0)
}

/// A relabeling of parties: the factor held by party `k` moves to slot `targets[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyPermutation {
    targets: Vec<usize>,
}

impl PartyPermutation {
    pub fn new(targets: Vec<usize>) -> Result<PartyPermutation> {
        let mut seen = targets.clone();
        seen.sort_unstable();
        if seen != (0..targets.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidParties {
                mask: 0,
                reason: "not a permutation",
            });
        }
        Ok(PartyPermutation { targets })
    }

    /// A→B→C→A.
    pub fn cycle() -> PartyPermutation {
        PartyPermutation {
            targets: vec![1, 2, 0],
        }
    }

    /// A↔B.
    pub fn swap_ab() -> PartyPermutation {
        PartyPermutation {
            targets: vec![1, 0, 2],
        }
    }

    pub fn identity(n: usize) -> PartyPermutation {
        PartyPermutation {
            targets: (0..n).collect(),
        }
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn inverse(&self) -> PartyPermutation {
        let mut inv = vec![0; self.targets.len()];
        for (k, &t) in self.targets.iter().enumerate() {
            inv[t] = k;
        }
        PartyPermutation { targets: inv }
    }

    /// The permutation matrix acting on an `n`-party register.
    pub fn matrix(&self, n: usize) -> CMatrix {
        assert_eq!(n, self.targets.len(), "permutation size must match the register");
        let d = 1 << n;
        let mut p = CMatrix::zeros(d, d);
        for i in 0..d {
            let j = (0..n).fold(0, |acc, k| {
                let bit = (i >> (n - 1 - k)) & 1;
                acc | (bit << (n - 1 - self.targets[k]))
            });
            p[(j, i)] = ONE;
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn q0() -> Ket {
        Ket::basis(1, 0)
    }
    fn q1() -> Ket {
        Ket::basis(1, 1)
    }
    fn plus() -> Ket {
        Ket::from_real(&[1.0, 1.0]).unwrap()
    }
    fn minus() -> Ket {
        Ket::from_real(&[1.0, -1.0]).unwrap()
    }
    fn ghz() -> Ket {
        Ket::from_real(&[1.0, 0., 0., 0., 0., 0., 0., 1.0]).unwrap()
    }
    fn w() -> Ket {
        Ket::from_real(&[0., 1., 1., 0., 1., 0., 0., 0.]).unwrap()
    }
    fn bell() -> Ket {
        Ket::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn tensor_product_of_zeros_is_first_basis_vector() {
        let k = tensor_product(&[q0(), q0(), q0()]).unwrap();
        assert_eq!(k.parties(), 3);
        assert!(k.approx_eq(&Ket::basis(3, 0), 0.0));
    }

    #[test]
    fn tensor_product_expands_in_abc_order() {
        let k = tensor_product(&[q1(), plus(), minus()]).unwrap();
        let expect = [0., 0., 0., 0., 0.5, -0.5, 0.5, -0.5];
        for (a, e) in k.amplitudes().iter().zip(expect) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn tensor_product_rejects_empty_and_oversized() {
        assert_eq!(tensor_product(&[]), Err(Error::EmptyFactors));
        assert!(matches!(
            tensor_product(&[bell(), bell()]),
            Err(Error::UnsupportedRegister { parties: 4 })
        ));
    }

    #[test]
    fn ket_constructor_validates() {
        assert!(matches!(Ket::from_real(&[1.0, 0.0, 0.0]), Err(Error::BadDimension { len: 3 })));
        assert_eq!(Ket::from_real(&[0.0, 0.0]), Err(Error::ZeroNorm));
        assert!(matches!(Ket::new(vec![ONE; 16]), Err(Error::UnsupportedRegister { parties: 4 })));
        let k = Ket::from_real(&[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(k.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn canonical_phase_makes_first_amplitude_positive() {
        let k = Ket::new(vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap();
        let can = k.canonical();
        assert_abs_diff_eq!(can.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(can.amplitudes()[1].im, 0.0);
        assert_abs_diff_eq!(can.amplitudes()[2].re, -FRAC_1_SQRT_2, epsilon = 1e-15);
        let rotated = Ket::from_vector(k.vector() * C64::from_polar(1.0, 0.7)).unwrap();
        assert!(rotated.approx_eq(&k, 1e-14));
    }

    #[test]
    fn ghz_reduces_to_maximally_mixed_qubit() {
        let r = partial_trace(&ghz().density(), Parties::of(&[Party::A])).unwrap();
        let expect = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.), c(0.5, 0.)]));
        assert!(max_abs_diff(r.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn w_reduces_to_two_thirds_one_third() {
        let r = partial_trace(&w().density(), Parties::of(&[Party::A])).unwrap();
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(1, 1)].re, 1.0 / 3.0, epsilon = 1e-15);
        assert!(r.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let a = Ket::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let bc = tensor_product(&[plus(), q1()]).unwrap();
        let full = tensor_product(&[a.clone(), bc.clone()]).unwrap();
        let ra = partial_trace(&full.density(), Parties::of(&[Party::A])).unwrap();
        assert!(max_abs_diff(ra.matrix(), &a.outer()) < 1e-15);
        let rbc = partial_trace(&full.density(), Parties::of(&[Party::B, Party::C])).unwrap();
        assert!(max_abs_diff(rbc.matrix(), &bc.outer()) < 1e-15);
        // keeping A and C of a product picks the right factors
        let rac = partial_trace(&full.density(), Parties::of(&[Party::A, Party::C])).unwrap();
        let ac = tensor_product(&[a, q1()]).unwrap();
        assert!(max_abs_diff(rac.matrix(), &ac.outer()) < 1e-15);
    }

    #[test]
    fn partial_trace_edge_cases() {
        let rho = ghz().density();
        assert!(matches!(
            partial_trace(&rho, Parties::EMPTY),
            Err(Error::InvalidParties { .. })
        ));
        assert_eq!(partial_trace(&rho, Parties::all(3)).unwrap(), rho);
    }

    #[test]
    fn bell_partial_transpose_has_negative_half() {
        let pt = partial_transpose(&bell().density(), Parties::of(&[Party::B])).unwrap();
        let vals = eigvals_hermitian(&pt).unwrap();
        let expect = [-0.5, 0.5, 0.5, 0.5];
        for (v, e) in vals.iter().zip(expect) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_transpose_of_product_and_mixed() {
        let a = Ket::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = Ket::new(vec![c(0.28, 0.96), c(1.0, 0.0)]).unwrap();
        let rho = tensor_product(&[a, b]).unwrap().density();
        let before = eigvals_hermitian(rho.matrix()).unwrap();
        let after = eigvals_hermitian(&partial_transpose(&rho, Parties::of(&[Party::A])).unwrap()).unwrap();
        for (x, y) in before.iter().zip(&after) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        let mixed = DensityMatrix::maximally_mixed(3);
        let pt = partial_transpose(&mixed, Parties::of(&[Party::B])).unwrap();
        assert_eq!(&pt, mixed.matrix());
        assert!(partial_transpose(&mixed, Parties::all(3)).is_err());
        assert!(partial_transpose(&mixed, Parties::EMPTY).is_err());
    }

    #[test]
    fn projection_weight_and_orthogonality() {
        let span = OrthonormalBasis::new(vec![Ket::basis(3, 0), Ket::basis(3, 3)]).unwrap();
        let p = span.projector();
        let proj = project_onto(&Ket::basis(3, 0), &p).unwrap();
        assert_abs_diff_eq!(proj.weight, 1.0, epsilon = 1e-15);
        let off = project_onto(&Ket::basis(3, 5), &p);
        assert!(matches!(off, Err(Error::OrthogonalToSubspace { weight }) if weight == 0.0));
        let half = Ket::from_real(&[1.0, 1.0, 0., 0., 0., 0., 0., 0.]).unwrap();
        let proj = project_onto(&half, &p).unwrap();
        assert_abs_diff_eq!(proj.weight, 0.5, epsilon = 1e-15);
        assert!(proj.normalized.approx_eq(&Ket::basis(3, 0), 1e-15));
        assert!(matches!(project_onto(&q0(), &p), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn gram_schmidt_examples() {
        let e0 = Ket::basis(1, 0);
        let e01 = Ket::from_real(&[1.0, 1.0]).unwrap();
        let b = orthonormalize(&[e0.clone(), e01]).unwrap();
        assert!(b.members()[0].approx_eq(&e0, 1e-15));
        assert!(b.members()[1].approx_eq(&Ket::basis(1, 1), 1e-15));
        let dup = orthonormalize(&[e0.clone(), plus(), minus(), e0]);
        assert_eq!(dup, Err(Error::LinearlyDependent { index: 2 }));
    }

    #[test]
    fn eigenvalues_of_scaled_identity() {
        let vals = eigvals_hermitian(&CMatrix::identity(8, 8).unscale(8.0)).unwrap();
        assert_eq!(vals.len(), 8);
        for v in vals {
            assert_abs_diff_eq!(v, 0.125, epsilon = 1e-15);
        }
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(eigvals_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(4, 4)).is_err());
        let mut m = CMatrix::identity(2, 2).unscale(2.0);
        m[(0, 1)] = c(0.6, 0.0);
        m[(1, 0)] = c(0.6, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidDensity { .. })));
        assert!(DensityMatrix::new(ghz().outer()).is_ok());
    }

    #[test]
    fn projector_validation() {
        let p = Projector::new(ghz().outer()).unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(p.complement().rank(), 7);
        let bad = CMatrix::identity(2, 2).unscale(2.0);
        assert!(Projector::new(bad).is_err());
    }

    #[test]
    fn permutation_matrix_moves_factors() {
        // |1⟩_A|0⟩_B|0⟩_C under A→B→C→A becomes |0⟩_A|1⟩_B|0⟩_C.
        let k = Ket::basis(3, 4).permute(&PartyPermutation::cycle());
        assert!(k.approx_eq(&Ket::basis(3, 2), 0.0));
        let p = PartyPermutation::cycle();
        let round = Ket::basis(3, 6).permute(&p).permute(&p.inverse());
        assert!(round.approx_eq(&Ket::basis(3, 6), 0.0));
    }

    #[test]
    fn lowdin_orthonormalizes_nearly_orthogonal_sets() {
        let a = Ket::from_real(&[1.0, 0.01]).unwrap();
        let b = Ket::from_real(&[0.0, 1.0]).unwrap();
        let o = symmetric_orthonormalize(&[a.clone(), b.clone()]).unwrap();
        assert!(gram_deviation(o.members()) < 1e-15);
        assert!(o.members()[0].fidelity(&a) > 0.9999);
        assert!(o.members()[1].fidelity(&b) > 0.9999);
    }
}
