//! Minimization of `⟨φ|P|φ⟩` over three-qubit product states.
//!
//! Each sweep fixes two factors and replaces the third by the lowest
//! eigenvector of the induced 2×2 matrix, so the objective never increases.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_unit, reduce, Coordinates, OptResult, OptimizerOptions, RestartOutcome};
use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::tensor::{c, tensor_product, Ket, Projector, C64, ZERO};
use crate::tol;

type Qubit = [C64; 2];
type Factors = [Qubit; 3];

/// Product state `|a⟩|b⟩|c⟩` with `|a⟩ = cos(α/2)|0⟩ + e^{iφ_a} sin(α/2)|1⟩`
/// and likewise for `b`, `c`. Canonical ranges: `α, β, γ ∈ [0, 2π]`,
/// `φ_a, φ_b, φ_c ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub phi_c: f64,
}

impl ProductAngles {
    pub fn real(alpha: f64, beta: f64, gamma: f64) -> ProductAngles {
        ProductAngles {
            alpha,
            beta,
            gamma,
            phi_a: 0.0,
            phi_b: 0.0,
            phi_c: 0.0,
        }
    }

    pub fn factors(&self) -> [Ket; 3] {
        self.qubits().map(|q| Ket::qubit(q[0], q[1]).expect("unit qubit"))
    }

    pub fn to_ket(&self) -> Ket {
        tensor_product(&self.factors()).expect("three qubits")
    }

    fn qubits(&self) -> Factors {
        [
            qubit(self.alpha, self.phi_a),
            qubit(self.beta, self.phi_b),
            qubit(self.gamma, self.phi_c),
        ]
    }

    /// Canonical angles of the product of three qubit factors.
    pub fn from_qubits(a: Qubit, b: Qubit, cq: Qubit) -> ProductAngles {
        let (alpha, phi_a) = angles_of(a);
        let (beta, phi_b) = angles_of(b);
        let (gamma, phi_c) = angles_of(cq);
        ProductAngles {
            alpha,
            beta,
            gamma,
            phi_a,
            phi_b,
            phi_c,
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.alpha, self.beta, self.gamma, self.phi_a, self.phi_b, self.phi_c]
    }
}

impl Coordinates for ProductAngles {
    fn coordinates(&self) -> Vec<f64> {
        self.as_array().to_vec()
    }
}

fn qubit(theta: f64, phi: f64) -> Qubit {
    let (s, co) = (theta / 2.0).sin_cos();
    [c(co, 0.0), C64::from_polar(s, phi)]
}

/// Maps a qubit ray to `(θ, φ)` with `θ ∈ [0, 2π]`, `φ ∈ [0, π]`.
fn angles_of(q: Qubit) -> (f64, f64) {
    let norm = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
    let (a0, a1) = (q[0] / norm, q[1] / norm);
    if a0.norm() <= tol::PHASE_CUTOFF {
        return (PI, 0.0);
    }
    let a1 = a1 * (a0.conj() / a0.norm());
    let theta = 2.0 * a1.norm().atan2(a0.norm());
    if a1.norm() <= tol::PHASE_CUTOFF {
        return (theta, 0.0);
    }
    let phi = a1.arg();
    if phi < 0.0 {
        // (θ, φ) and (2π − θ, φ + π) describe the same ray.
        (TAU - theta, phi + PI)
    } else {
        (theta, phi)
    }
}

struct Search<'a> {
    p: &'a [C64],
    real_only: bool,
}

impl Search<'_> {
    fn new(p: &Projector, real_only: bool) -> Result<Search<'_>> {
        if p.parties() != 3 {
            return Err(Error::UnsupportedRegister {
                parties: p.parties(),
            });
        }
        Ok(Search {
            p: p.matrix().as_slice(),
            real_only,
        })
    }

    // Column-major 8×8 storage.
    fn apply(&self, v: &[C64; 8]) -> [C64; 8] {
        let mut out = [ZERO; 8];
        for (j, &vj) in v.iter().enumerate() {
            if vj == ZERO {
                continue;
            }
            let col = &self.p[8 * j..8 * j + 8];
            for (o, &pij) in out.iter_mut().zip(col) {
                *o += pij * vj;
            }
        }
        out
    }

    fn value(&self, f: &Factors) -> f64 {
        let v = product_vector(f);
        let pv = self.apply(&v);
        v.iter().zip(&pv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    fn effective(&self, f: &Factors, k: usize) -> [[C64; 2]; 2] {
        let mut basis = [*f, *f];
        basis[0][k] = [c(1.0, 0.0), ZERO];
        basis[1][k] = [ZERO, c(1.0, 0.0)];
        let w = [product_vector(&basis[0]), product_vector(&basis[1])];
        let pw = [self.apply(&w[0]), self.apply(&w[1])];
        let mut h = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = w[i].iter().zip(&pw[j]).map(|(a, b)| a.conj() * b).sum();
            }
        }
        if self.real_only {
            for row in h.iter_mut() {
                for z in row.iter_mut() {
                    *z = c(z.re, 0.0);
                }
            }
        }
        h
    }

    fn descend(&self, start: Factors, max_iterations: usize, tolerance: f64) -> Descent {
        let mut f = start;
        let mut value = self.value(&f);
        let mut trace = vec![value];
        let mut converged = false;
        for _ in 0..max_iterations {
            for k in 0..3 {
                if let Some(v) = lowest_eigvec(&self.effective(&f, k)) {
                    let mut trial = f;
                    trial[k] = v;
                    if self.value(&trial) <= self.value(&f) {
                        f = trial;
                    }
                }
            }
            let next = self.value(&f);
            debug_assert!(next <= value + 1e-14, "sweep increased {value} -> {next}");
            trace.push(next);
            let gain = value - next;
            value = next;
            if gain < tolerance {
                converged = true;
                break;
            }
        }
        Descent {
            argmin: ProductAngles::from_qubits(f[0], f[1], f[2]),
            value,
            iterations: trace.len() - 1,
            converged,
            trace,
        }
    }
}

fn product_vector(f: &Factors) -> [C64; 8] {
    let mut v = [ZERO; 8];
    for (i, slot) in v.iter_mut().enumerate() {
        *slot = f[0][(i >> 2) & 1] * f[1][(i >> 1) & 1] * f[2][i & 1];
    }
    v
}

/// Unit eigenvector of the smaller eigenvalue of a 2×2 Hermitian matrix, or
/// `None` when the matrix is a multiple of the identity.
fn lowest_eigvec(h: &[[C64; 2]; 2]) -> Option<Qubit> {
    let (a, d, b) = (h[0][0].re, h[1][1].re, h[0][1]);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return None;
    }
    let lambda = 0.5 * (a + d) - r;
    let u = [b, c(lambda - a, 0.0)];
    let v = [c(lambda - d, 0.0), b.conj()];
    let nu = u[0].norm_sqr() + u[1].norm_sqr();
    let nv = v[0].norm_sqr() + v[1].norm_sqr();
    let (w, n) = if nu >= nv { (u, nu) } else { (v, nv) };
    let n = n.sqrt();
    Some([w[0] / n, w[1] / n])
}

/// One alternating-descent run with its per-sweep objective trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub argmin: ProductAngles,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective before the first sweep followed by the value after each sweep.
    pub trace: Vec<f64>,
}

/// Alternating descent on `⟨φ|p|φ⟩` from a given product state.
pub fn alternating_descent(
    p: &Projector,
    start: &ProductAngles,
    max_iterations: usize,
    tolerance: f64,
) -> Result<Descent> {
    let search = Search::new(p, false)?;
    Ok(search.descend(start.qubits(), max_iterations, tolerance))
}

fn restarts(p: &Projector, opts: &OptimizerOptions, real_only: bool) -> Result<Vec<RestartOutcome<ProductAngles>>> {
    opts.validate()?;
    let search = Search::new(p, real_only)?;
    Ok(map_indexed(opts.restarts, opts.execution, |i| {
        let mut rng = opts.restart_rng(i);
        let start: Factors = std::array::from_fn(|_| {
            if real_only {
                qubit(rng.random_range(0.0..TAU), 0.0)
            } else {
                let v = random_unit(&mut rng, 2);
                [v[0], v[1]]
            }
        });
        let d = search.descend(start, opts.max_iterations, opts.tolerance);
        RestartOutcome {
            value: p.expectation(&d.argmin.to_ket()),
            argmin: d.argmin,
            iterations: d.iterations,
            converged: d.converged,
        }
    }))
}

/// Every restart of [`min_product_overlap`], in restart order.
pub fn product_overlap_restarts(
    p: &Projector,
    opts: &OptimizerOptions,
) -> Result<Vec<RestartOutcome<ProductAngles>>> {
    restarts(p, opts, false)
}

/// `min_{φ ∈ Π} ⟨φ|p|φ⟩` over all three-qubit product states, phases included.
pub fn min_product_overlap(p: &Projector, opts: &OptimizerOptions) -> Result<OptResult<ProductAngles>> {
    reduce(restarts(p, opts, false)?, opts.max_iterations)
}

/// As [`min_product_overlap`] with all three relative phases held at zero.
pub fn min_product_overlap_real(p: &Projector, opts: &OptimizerOptions) -> Result<OptResult<ProductAngles>> {
    reduce(restarts(p, opts, true)?, opts.max_iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::OrthonormalBasis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn angle_roundtrip_keeps_the_ray() {
        for (t, p) in [(0.3, 2.5), (2.0, -1.0), (5.5, 0.2), (PI, 0.0), (0.0, 1.0)] {
            let q = qubit(t, p);
            let (t2, p2) = angles_of(q);
            assert!((0.0..=TAU).contains(&t2) && (0.0..=PI).contains(&p2));
            let back = qubit(t2, p2);
            let overlap = (q[0].conj() * back[0] + q[1].conj() * back[1]).norm();
            assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn lowest_eigvec_of_diagonal_and_offdiagonal() {
        let v = lowest_eigvec(&[[c(2.0, 0.0), ZERO], [ZERO, c(1.0, 0.0)]]).unwrap();
        assert_abs_diff_eq!(v[1].norm(), 1.0, epsilon = 1e-15);
        let v = lowest_eigvec(&[[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(1.0, 0.0)]]).unwrap();
        // eigenvalue 0 eigenvector ∝ (1, i)·...
        let hv0 = v[0] + c(0.0, 1.0) * v[1];
        assert!(hv0.norm() < 1e-15);
        assert!(lowest_eigvec(&[[c(1.0, 0.0), ZERO], [ZERO, c(1.0, 0.0)]]).is_none());
    }

    #[test]
    fn full_space_projector_gives_one() {
        let r = min_product_overlap(&Projector::identity(3), &OptimizerOptions::default().with_restarts(4)).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn even_weight_span_is_avoided_by_111() {
        let span = OrthonormalBasis::new([0, 3, 5, 6].map(|i| Ket::basis(3, i)).to_vec()).unwrap();
        let r = min_product_overlap(&span.projector(), &OptimizerOptions::default()).unwrap();
        assert!(r.value < 1e-12, "{}", r.value);
    }

    #[test]
    fn non_three_qubit_projector_rejected() {
        let err = min_product_overlap(&Projector::identity(2), &OptimizerOptions::default());
        assert!(matches!(err, Err(Error::UnsupportedRegister { parties: 2 })));
    }

    #[test]
    fn descent_trace_is_monotone() {
        let psi = Ket::from_real(&[0.1, 0.7, -0.2, 0.3, 0.5, 0.1, -0.6, 0.4]).unwrap();
        let p = Projector::complement_of_ket(&psi);
        let d = alternating_descent(&p, &ProductAngles::real(1.0, 2.0, 3.0), 500, 1e-14).unwrap();
        assert!(d.trace.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(d.converged);
    }
}
