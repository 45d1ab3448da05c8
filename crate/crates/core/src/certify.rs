//! Structural checks on `ρ_Q`: unextendibility of the family, positivity of
//! the partial transpose, relabeling symmetry, and a basis of `Q` made of
//! states separable across a chosen cut.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::Residuals;
use crate::optimize::{min_product_overlap, OptimizerOptions};
use crate::par::{map_indexed, Execution};
use crate::tensor::{
    c, eigh, eigvals_hermitian, frobenius, gram_deviation, max_abs_diff, partial_trace, partial_transpose,
    tensor_product, CMatrix, DensityMatrix, Ket, OrthonormalBasis, Parties, Party, PartyPermutation, C64,
};
use crate::tol;
use crate::upb::{rho_q, UpbFamily};

/// `min_φ ⟨φ|P̃|φ⟩` over product states; the family is unextendible iff this
/// exceeds 1e-8.
pub fn check_unextendibility(family: &UpbFamily, opts: &OptimizerOptions) -> Result<f64> {
    Ok(min_product_overlap(&family.span_projector(), opts)?.value)
}

/// Smallest eigenvalue of the partial transpose on each single-party cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptReport {
    #[serde(rename = "A|BC")]
    pub a: f64,
    #[serde(rename = "B|CA")]
    pub b: f64,
    #[serde(rename = "C|AB")]
    pub c: f64,
}

impl PptReport {
    pub fn min(&self) -> f64 {
        self.a.min(self.b).min(self.c)
    }

    pub fn values(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

pub fn ppt_report(rho: &DensityMatrix) -> Result<PptReport> {
    if rho.parties() != 3 {
        return Err(Error::UnsupportedRegister { parties: rho.parties() });
    }
    let cut = |p: Party| -> Result<f64> {
        let pt = partial_transpose(rho, Parties::of(&[p]))?;
        Ok(eigvals_hermitian(&pt)?[0])
    };
    Ok(PptReport {
        a: cut(Party::A)?,
        b: cut(Party::B)?,
        c: cut(Party::C)?,
    })
}

/// `‖ρ − Π ρ Π†‖_F` for the party permutation `Π`.
pub fn permutation_deviation(rho: &DensityMatrix, perm: &PartyPermutation) -> f64 {
    frobenius(&(rho.matrix() - rho.permute(perm).matrix()))
}

/// A bipartition into a pair and a single party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cut {
    #[serde(rename = "AB|C")]
    AbC,
    #[serde(rename = "BC|A")]
    BcA,
    #[serde(rename = "CA|B")]
    CaB,
}

impl Cut {
    pub const ALL: [Cut; 3] = [Cut::AbC, Cut::BcA, Cut::CaB];

    pub fn single(self) -> Party {
        match self {
            Cut::AbC => Party::C,
            Cut::BcA => Party::A,
            Cut::CaB => Party::B,
        }
    }

    /// Reorders the register so the pair comes first, in the cut's order.
    fn permutation(self) -> PartyPermutation {
        let targets = match self {
            Cut::AbC => vec![0, 1, 2],
            Cut::BcA => vec![2, 0, 1],
            Cut::CaB => vec![1, 2, 0],
        };
        PartyPermutation::new(targets).expect("valid permutation")
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cut::AbC => "AB|C",
            Cut::BcA => "BC|A",
            Cut::CaB => "CA|B",
        })
    }
}

impl FromStr for Cut {
    type Err = Error;
    fn from_str(s: &str) -> Result<Cut> {
        match s.to_ascii_uppercase().as_str() {
            "AB|C" | "ABC" | "C" => Ok(Cut::AbC),
            "BC|A" | "A" => Ok(Cut::BcA),
            "CA|B" | "B" => Ok(Cut::CaB),
            _ => Err(Error::InvalidParties {
                mask: 0,
                reason: "cut must be AB|C, BC|A or CA|B",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub theta_points: usize,
    pub phi_points: usize,
    /// Seeds refined per search, best first.
    pub max_seeds: usize,
    pub max_iterations: usize,
    pub execution: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            theta_points: 721,
            phi_points: 1441,
            max_seeds: 24,
            max_iterations: 2000,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiseparableMember {
    /// Two-qubit factor on the cut's pair, in the cut's order.
    pub pair: Ket,
    pub single: Ket,
    /// `pair ⊗ single` in A, B, C order.
    pub state: Ket,
    /// Purity of a one-qubit reduction of `pair`; below 1 when the pair is entangled.
    pub pair_purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiseparableBasis {
    pub cut: Cut,
    pub members: Vec<BiseparableMember>,
    pub residuals: Residuals,
}

/// `P̃` with the register reordered so the single party is last, as a dense
/// 8×8 array.
struct CutSearch {
    p: [[C64; 8]; 8],
}

impl CutSearch {
    /// `(𝟙 ⊗ ⟨s|) P̃ (𝟙 ⊗ |s⟩)`.
    fn reduced(&self, s: [C64; 2]) -> Matrix4<C64> {
        Matrix4::from_fn(|i, j| {
            let mut acc = c(0.0, 0.0);
            for k in 0..2 {
                for l in 0..2 {
                    acc += s[k].conj() * self.p[2 * i + k][2 * j + l] * s[l];
                }
            }
            acc
        })
    }

    /// `(⟨x| ⊗ 𝟙) P̃ (|x⟩ ⊗ 𝟙)`.
    fn effective(&self, x: &[C64; 4]) -> [[C64; 2]; 2] {
        let mut m = [[c(0.0, 0.0); 2]; 2];
        for (k, row) in m.iter_mut().enumerate() {
            for (l, e) in row.iter_mut().enumerate() {
                for i in 0..4 {
                    for j in 0..4 {
                        *e += x[i].conj() * self.p[2 * i + k][2 * j + l] * x[j];
                    }
                }
            }
        }
        m
    }

    fn lowest(&self, s: [C64; 2]) -> (f64, [C64; 4]) {
        let eig = self.reduced(s).symmetric_eigen();
        let (idx, val) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("four eigenvalues");
        let v = eig.eigenvectors.column(idx);
        (val.max(0.0), [v[0], v[1], v[2], v[3]])
    }

    fn value(&self, x: &[C64; 4], s: [C64; 2]) -> f64 {
        let e = self.effective(x);
        let mut v = c(0.0, 0.0);
        for k in 0..2 {
            for l in 0..2 {
                v += s[k].conj() * e[k][l] * s[l];
            }
        }
        v.re.max(0.0)
    }

    /// Alternating updates of the pair vector and the single-party state;
    /// neither step can increase `⟨x ⊗ s|P̃|x ⊗ s⟩`.
    fn refine(&self, mut s: [C64; 2], max_iterations: usize) -> (f64, [C64; 4], [C64; 2]) {
        let (_, mut x) = self.lowest(s);
        let mut value = self.value(&x, s);
        for _ in 0..max_iterations {
            if value < 1e-30 {
                break;
            }
            let e = self.effective(&x);
            let m = CMatrix::from_fn(2, 2, |k, l| e[k][l]);
            let (_, vecs) = eigh(&m).expect("Hermitian effective matrix");
            let cand_s = [vecs[(0, 0)], vecs[(1, 0)]];
            let (_, cand_x) = self.lowest(cand_s);
            let cand = self.value(&cand_x, cand_s);
            if cand >= value {
                break;
            }
            s = cand_s;
            x = cand_x;
            value = cand;
        }
        (value, x, s)
    }
}

fn bloch(theta: f64, phi: f64) -> [C64; 2] {
    let (sn, cs) = (theta / 2.0).sin_cos();
    [c(cs, 0.0), C64::from_polar(sn, phi)]
}

fn reduced_purity(pair: &Ket) -> f64 {
    partial_trace(&pair.density(), Parties::of(&[Party::A]))
        .expect("two-qubit state")
        .purity()
}

/// Four orthonormal states of `Q`, each a two-qubit state on the cut's pair
/// times a single-qubit state, together reconstructing `ρ_Q`.
///
/// The single-party factor is scanned over a Bloch-sphere grid for points
/// where the restriction of `P̃` to `ℂ⁴ ⊗ |s⟩` loses rank; local minima of its
/// smallest eigenvalue are refined by alternating eigenvector updates.
pub fn biseparable_basis_search(family: &UpbFamily, cut: Cut, scan: &ScanOptions) -> Result<BiseparableBasis> {
    let not_found = |reason: String| Error::NotFoundAtResolution {
        theta_points: scan.theta_points,
        phi_points: scan.phi_points,
        reason,
    };
    if family.degenerate() {
        return Err(Error::DegenerateFamily("the complement contains a product state"));
    }
    if scan.theta_points < 3 || scan.phi_points < 3 {
        return Err(Error::InvalidOptions("scan grid needs at least 3 points per axis"));
    }
    let perm = cut.permutation();
    let pm = perm.matrix(3);
    let p = &pm * family.span_projector().matrix() * pm.adjoint();
    let search = CutSearch {
        p: std::array::from_fn(|i| std::array::from_fn(|j| p[(i, j)])),
    };

    let (nt, np) = (scan.theta_points, scan.phi_points);
    let theta = |i: usize| std::f64::consts::PI * i as f64 / (nt - 1) as f64;
    let phi = |j: usize| std::f64::consts::TAU * j as f64 / (np - 1) as f64;
    let grid: Vec<Vec<f64>> = map_indexed(nt, scan.execution, |i| {
        (0..np).map(|j| search.lowest(bloch(theta(i), phi(j))).0).collect()
    });

    let mut minima: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..nt {
        for j in 0..np - 1 {
            let v = grid[i][j];
            let is_min = (-1i64..=1).all(|di| {
                (-1i64..=1).all(|dj| {
                    let ii = i as i64 + di;
                    if ii < 0 || ii >= nt as i64 {
                        return true;
                    }
                    let jj = (j as i64 + dj).rem_euclid(np as i64 - 1) as usize;
                    grid[ii as usize][jj] >= v
                })
            });
            if is_min {
                minima.push((v, i, j));
            }
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut seeds: Vec<[C64; 2]> = Vec::new();
    for &(_, i, j) in &minima {
        if seeds.len() >= scan.max_seeds {
            break;
        }
        let s = bloch(theta(i), phi(j));
        let near = |t: &[C64; 2]| (t[0].conj() * s[0] + t[1].conj() * s[1]).norm_sqr() > 1.0 - 1e-6;
        if !seeds.iter().any(near) {
            seeds.push(s);
        }
    }

    let refined = map_indexed(seeds.len(), scan.execution, |k| search.refine(seeds[k], scan.max_iterations));
    let mut found: Vec<(Ket, Ket)> = Vec::new();
    for (value, x, s) in refined {
        if value > tol::STRUCTURAL {
            continue;
        }
        let pair = Ket::new(x.to_vec())?.canonical();
        let single = Ket::qubit(s[0], s[1])?.canonical();
        let state = tensor_product(&[pair.clone(), single.clone()])?;
        if !found
            .iter()
            .any(|(a, b)| tensor_product(&[a.clone(), b.clone()]).expect("three qubits").fidelity(&state) > 1.0 - 1e-8)
        {
            found.push((pair, single));
        }
    }
    if found.len() < 4 {
        return Err(not_found(format!("{} rank-deficient points found, 4 needed", found.len())));
    }

    let states: Vec<Ket> = found
        .iter()
        .map(|(a, b)| tensor_product(&[a.clone(), b.clone()]).expect("three qubits"))
        .collect();
    let n = states.len();
    let mut best: Option<(f64, [usize; 4])> = None;
    for a in 0..n {
        for b in a + 1..n {
            for cc in b + 1..n {
                for d in cc + 1..n {
                    let idx = [a, b, cc, d];
                    let sub: Vec<Ket> = idx.iter().map(|&i| states[i].clone()).collect();
                    let dev = gram_deviation(&sub);
                    if best.is_none_or(|(w, _)| dev < w) {
                        best = Some((dev, idx));
                    }
                }
            }
        }
    }
    let (_, idx) = best.expect("at least four candidates");
    let inverse = perm.inverse();
    let members: Vec<BiseparableMember> = idx
        .iter()
        .map(|&i| {
            let (pair, single) = found[i].clone();
            BiseparableMember {
                pair_purity: reduced_purity(&pair),
                state: states[i].permute(&inverse).canonical(),
                pair,
                single,
            }
        })
        .collect();

    let kets: Vec<Ket> = members.iter().map(|m| m.state.clone()).collect();
    let span = family.span_projector();
    let residuals = Residuals {
        orthonormality: gram_deviation(&kets),
        membership: kets.iter().map(|k| span.expectation(k)).fold(0.0, f64::max),
        reconstruction: max_abs_diff(
            OrthonormalBasis::from_members_unchecked(kets).uniform_mixture().matrix(),
            rho_q(family).matrix(),
        ),
    };
    let limit = 1e-8;
    if residuals.orthonormality > limit || residuals.membership > limit || residuals.reconstruction > limit {
        return Err(not_found(format!(
            "no orthonormal quadruple among {n} candidates (residuals {:.2e}, {:.2e}, {:.2e})",
            residuals.orthonormality, residuals.membership, residuals.reconstruction
        )));
    }
    Ok(BiseparableBasis { cut, members, residuals })
}

/// A check that was run, or the reason it was not.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Check<T> {
    Done(T),
    Skipped { skipped: String },
}

impl<T> Check<T> {
    pub fn skipped(reason: impl Into<String>) -> Check<T> {
        Check::Skipped { skipped: reason.into() }
    }

    pub fn done(&self) -> Option<&T> {
        match self {
            Check::Done(t) => Some(t),
            Check::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub unextendibility: Check<f64>,
    pub ppt: PptReport,
    pub cyclic_deviation: f64,
    pub transposition_deviation: f64,
    pub biseparable: Check<BiseparableBasis>,
}

impl CertReport {
    /// Bound-entanglement evidence at tolerance `tol`: unextendible family,
    /// PPT on every cut, cyclic symmetry, and a biseparable basis when one was
    /// searched for.
    pub fn passes(&self, tol: f64) -> bool {
        let unext = match &self.unextendibility {
            Check::Done(v) => *v > tol::UNEXTENDIBLE,
            Check::Skipped { .. } => true,
        };
        let bisep = !matches!(&self.biseparable, Check::Skipped { skipped } if skipped.contains("not found"));
        unext && self.ppt.min() >= -tol && self.cyclic_deviation <= tol && bisep
    }
}

/// State-level checks only, for an arbitrary three-qubit density matrix.
pub fn certify_state(rho: &DensityMatrix) -> Result<CertReport> {
    Ok(CertReport {
        unextendibility: Check::skipped("no product basis supplied"),
        ppt: ppt_report(rho)?,
        cyclic_deviation: permutation_deviation(rho, &PartyPermutation::cycle()),
        transposition_deviation: permutation_deviation(rho, &PartyPermutation::swap_ab()),
        biseparable: Check::skipped("no product basis supplied"),
    })
}

/// Every check for `ρ_Q` of `family`, the biseparable search on the AB|C cut.
pub fn certify_family(family: &UpbFamily, opts: &OptimizerOptions, scan: &ScanOptions) -> Result<CertReport> {
    let unext = check_unextendibility(family, opts)?;
    let mut report = certify_state(&rho_q(family))?;
    report.unextendibility = Check::Done(unext);
    report.biseparable = if unext <= tol::UNEXTENDIBLE {
        Check::skipped("family is extendible")
    } else {
        match biseparable_basis_search(family, Cut::AbC, scan) {
            Ok(b) => Check::Done(b),
            Err(e @ Error::NotFoundAtResolution { .. }) => Check::skipped(e.to_string()),
            Err(e) => return Err(e),
        }
    };
    Ok(report)
}
