//! Multistart minimization of a phase-invariant objective over unit vectors
//! of a subspace.
//!
//! A state is `Σ c_i |b_i⟩` with `‖c‖ = 1`. Around the current point the
//! search uses a chart of the `2k − 2` real tangent directions orthogonal to
//! both `c` and `i·c`, runs a simplex in that chart, then re-centres the chart
//! on the result. Rounds repeat until one round gains less than the tolerance.

use super::simplex::{nelder_mead, SimplexOptions};
use super::{random_unit, reduce, OptResult, OptimizerOptions, RestartOutcome};
use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::tensor::{c, canonical_phase, CVector, Ket, OrthonormalBasis, C64};

const FIRST_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-4;
const MAX_ROUNDS: usize = 200;

fn to_real(v: &[C64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn to_complex(r: &[f64]) -> Vec<C64> {
    r.chunks_exact(2).map(|p| c(p[0], p[1])).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal real basis of the tangent directions at `point` that change
/// neither its norm nor only its global phase.
fn tangent_chart(point: &[C64]) -> Vec<Vec<f64>> {
    let radial = to_real(point);
    let phase = to_real(&point.iter().map(|z| z * c(0.0, 1.0)).collect::<Vec<_>>());
    let dim = radial.len();
    let mut frame = vec![radial, phase];
    for e in 0..dim {
        if frame.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[e] = 1.0;
        for _ in 0..2 {
            for f in &frame {
                let d = dot(&v, f);
                v.iter_mut().zip(f).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-6 {
            v.iter_mut().for_each(|x| *x /= n);
            frame.push(v);
        }
    }
    frame.split_off(2)
}

fn retract(point: &[C64], chart: &[Vec<f64>], x: &[f64]) -> Vec<C64> {
    let mut r = to_real(point);
    for (t, &w) in chart.iter().zip(x) {
        r.iter_mut().zip(t).for_each(|(a, b)| *a += w * b);
    }
    let n = dot(&r, &r).sqrt();
    r.iter_mut().for_each(|a| *a /= n);
    canonical_phase(&CVector::from_vec(to_complex(&r))).as_slice().to_vec()
}

fn coords_to_ket(basis: &OrthonormalBasis, coords: &[C64]) -> Ket {
    basis.combine(coords).expect("unit coordinates give a nonzero state")
}

/// Every restart of [`min_on_sphere`], in restart order. The argmin of each
/// outcome is the canonical subspace coordinate vector.
pub fn sphere_restarts<F>(
    objective: &F,
    basis: &OrthonormalBasis,
    opts: &OptimizerOptions,
) -> Result<Vec<RestartOutcome<Vec<C64>>>>
where
    F: Fn(&Ket) -> f64 + Sync,
{
    opts.validate()?;
    let k = basis.len();
    if k == 0 {
        return Err(Error::InvalidOptions("empty subspace basis"));
    }
    Ok(map_indexed(opts.restarts, opts.execution, |i| {
        let mut rng = opts.restart_rng(i);
        let start = random_unit(&mut rng, k);
        let mut point = canonical_phase(&CVector::from_vec(start)).as_slice().to_vec();
        let mut value = objective(&coords_to_ket(basis, &point));
        let mut step = FIRST_STEP;
        let mut iterations = 0;
        let mut converged = k == 1;
        for _ in 0..MAX_ROUNDS {
            if converged || iterations >= opts.max_iterations {
                break;
            }
            let chart = tangent_chart(&point);
            let simplex = SimplexOptions {
                initial_step: step,
                ftol: opts.tolerance * 0.1,
                xtol: 1e-12,
                max_iterations: opts.max_iterations - iterations,
            };
            let r = nelder_mead(
                |x| objective(&coords_to_ket(basis, &retract(&point, &chart, x))),
                &vec![0.0; chart.len()],
                &simplex,
            );
            iterations += r.iterations;
            let gain = value - r.value;
            if r.value < value {
                point = retract(&point, &chart, &r.x);
                value = objective(&coords_to_ket(basis, &point));
            }
            let moved = dot(&r.x, &r.x).sqrt();
            step = moved.clamp(MIN_STEP, FIRST_STEP);
            if r.converged && gain < opts.tolerance {
                converged = true;
            }
        }
        RestartOutcome {
            value,
            argmin: point,
            iterations,
            converged,
        }
    }))
}

/// `min ‖c‖=1 objective(Σ c_i |b_i⟩)`. The objective must not depend on the
/// global phase of its argument. The returned argmin is in canonical form.
pub fn min_on_sphere<F>(
    objective: F,
    basis: &OrthonormalBasis,
    opts: &OptimizerOptions,
) -> Result<OptResult<Ket>>
where
    F: Fn(&Ket) -> f64 + Sync,
{
    let outcomes = sphere_restarts(&objective, basis, opts)?
        .into_iter()
        .map(|o| RestartOutcome {
            value: o.value,
            argmin: coords_to_ket(basis, &o.argmin).canonical(),
            iterations: o.iterations,
            converged: o.converged,
        })
        .collect();
    reduce(outcomes, opts.max_iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Projector;
    use approx::assert_abs_diff_eq;

    fn computational(k: usize) -> OrthonormalBasis {
        OrthonormalBasis::new((0..k).map(|i| Ket::basis(3, i)).collect()).unwrap()
    }

    #[test]
    fn chart_is_orthonormal_and_tangent() {
        let p = vec![c(0.5, 0.1), c(-0.3, 0.4), c(0.2, -0.6), c(0.1, 0.25)];
        let n = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let p: Vec<C64> = p.into_iter().map(|z| z / n).collect();
        let chart = tangent_chart(&p);
        assert_eq!(chart.len(), 6);
        let radial = to_real(&p);
        let phase = to_real(&p.iter().map(|z| z * c(0.0, 1.0)).collect::<Vec<_>>());
        for (i, t) in chart.iter().enumerate() {
            assert!(dot(t, &radial).abs() < 1e-14);
            assert!(dot(t, &phase).abs() < 1e-14);
            for (j, u) in chart.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot(t, u), e, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn constant_objective() {
        let r = min_on_sphere(|_| 0.75, &computational(4), &OptimizerOptions::default().with_restarts(3)).unwrap();
        assert_eq!(r.value, 0.75);
        assert_eq!(r.converged, 3);
    }

    #[test]
    fn weighted_quadratic_finds_lowest_axis() {
        // ⟨ψ|H|ψ⟩ with H = diag(3, 2, 1, 5) restricted to the first four basis states.
        let weights = [3.0, 2.0, 1.0, 5.0];
        let objective = |k: &Ket| -> f64 {
            k.amplitudes().iter().take(4).zip(weights).map(|(a, w)| w * a.norm_sqr()).sum()
        };
        let r = min_on_sphere(objective, &computational(4), &OptimizerOptions::default().with_restarts(8)).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.argmin.fidelity(&Ket::basis(3, 2)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn projector_expectation_minimum() {
        // minimum of ⟨ψ|P|ψ⟩ over span{e0, e1} with P = |+⟩⟨+| on those two is 0.
        let plus = Ket::from_real(&[1.0, 1.0, 0., 0., 0., 0., 0., 0.]).unwrap();
        let p = Projector::new(plus.outer()).unwrap();
        let r = min_on_sphere(|k| p.expectation(k), &computational(2), &OptimizerOptions::default().with_restarts(4)).unwrap();
        assert!(r.value < 1e-12);
    }
}
