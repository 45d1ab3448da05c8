//! Numerical engines: the closed-form overlap function, alternating
//! minimization over product states, multistart simplex search on the unit
//! sphere of a subspace, and an exhaustive grid oracle.

mod closed_form;
mod grid;
mod product;
mod simplex;
mod sphere;

pub use closed_form::{det_m, f_closed_form, m_matrix, ClosedForm, HADAMARD_BOUND};
pub use grid::{grid_oracle, GridMinimum, MAX_GRID_EVALUATIONS, MIN_GRID_RESOLUTION};
pub use product::{
    alternating_descent, min_product_overlap, min_product_overlap_real, product_overlap_restarts,
    Descent, ProductAngles,
};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};
pub use sphere::{min_on_sphere, sphere_restarts};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::tensor::{c, C64};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop a restart once one iteration improves the objective by less than this.
    pub tolerance: f64,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            restarts: 64,
            max_iterations: 10_000,
            tolerance: 1e-12,
            seed: 42,
            execution: Execution::default(),
        }
    }
}

impl OptimizerOptions {
    pub fn with_seed(self, seed: u64) -> Self {
        OptimizerOptions { seed, ..self }
    }

    pub fn with_restarts(self, restarts: usize) -> Self {
        OptimizerOptions { restarts, ..self }
    }

    pub fn with_execution(self, execution: Execution) -> Self {
        OptimizerOptions { execution, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidOptions("restarts must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions("max_iterations must be positive"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidOptions("tolerance must be positive"));
        }
        Ok(())
    }

    /// Generator for restart `index`; a function of `(seed, index)` only.
    pub fn restart_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartOutcome<T> {
    pub value: f64,
    pub argmin: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult<T> {
    pub value: f64,
    pub argmin: T,
    pub restarts: usize,
    pub converged: usize,
    pub best_restart: usize,
    /// Spread of the objective over the five best restarts.
    pub spread: f64,
}

impl<T> OptResult<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> OptResult<U> {
        OptResult {
            value: self.value,
            argmin: f(self.argmin),
            restarts: self.restarts,
            converged: self.converged,
            best_restart: self.best_restart,
            spread: self.spread,
        }
    }
}

/// Coordinate vector used for lexicographic tie-breaking.
pub trait Coordinates {
    fn coordinates(&self) -> Vec<f64>;
}

impl Coordinates for crate::tensor::Ket {
    fn coordinates(&self) -> Vec<f64> {
        self.canonical()
            .amplitudes()
            .iter()
            .flat_map(|a| [a.re, a.im])
            .collect()
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Global minimum over restarts. Values within [`tol::TIE`] of the best are
/// tied; ties go to the lexicographically smallest coordinate vector.
pub(crate) fn reduce<T: Coordinates>(
    outcomes: Vec<RestartOutcome<T>>,
    max_iterations: usize,
) -> Result<OptResult<T>> {
    let restarts = outcomes.len();
    let converged = outcomes.iter().filter(|o| o.converged).count();
    let best_value = outcomes
        .iter()
        .map(|o| o.value)
        .fold(f64::INFINITY, f64::min);
    if converged == 0 {
        return Err(Error::NotConverged {
            best_value,
            max_iterations,
        });
    }
    let mut values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    values.sort_by(f64::total_cmp);
    let top = &values[..values.len().min(5)];
    let spread = top[top.len() - 1] - top[0];

    let best_restart = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.value <= best_value + tol::TIE)
        .map(|(i, o)| (i, o.argmin.coordinates()))
        .min_by(|(ia, ca), (ib, cb)| lex_cmp(ca, cb).then(ia.cmp(ib)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best = outcomes.into_iter().nth(best_restart).expect("index in range");
    Ok(OptResult {
        value: best.value,
        argmin: best.argmin,
        restarts,
        converged,
        best_restart,
        spread,
    })
}

/// Complex standard Gaussian vector of length `n`, normalized: uniform on the
/// unit sphere of `C^n`.
pub(crate) fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}
