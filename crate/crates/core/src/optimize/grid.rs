//! Exhaustive evaluation on a uniform grid; the reference oracle for values
//! the optimizers are checked against.

use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};

pub const MIN_GRID_RESOLUTION: usize = 8;
pub const MAX_GRID_EVALUATIONS: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMinimum {
    pub value: f64,
    pub point: Vec<f64>,
    pub evaluations: u64,
}

/// Minimum of `objective` over `resolution` equally spaced points per axis,
/// endpoints of each `[lo, hi]` range included. The first minimal point in
/// row-major order wins.
pub fn grid_oracle<F>(
    ranges: &[(f64, f64)],
    resolution: usize,
    objective: F,
    execution: Execution,
) -> Result<GridMinimum>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let evaluations = (resolution as f64).powi(ranges.len() as i32);
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::GridRejected {
            evaluations,
            reason: "resolution below 8 points per axis",
        });
    }
    if evaluations > MAX_GRID_EVALUATIONS {
        return Err(Error::GridRejected {
            evaluations,
            reason: "more than 1e9 evaluations",
        });
    }
    let Some((&(lo0, hi0), rest)) = ranges.split_first() else {
        return Err(Error::GridRejected {
            evaluations,
            reason: "no axes",
        });
    };
    let axis = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
    let inner = resolution.pow(rest.len() as u32);

    let slices = map_indexed(resolution, execution, |i0| {
        let mut point = vec![0.0; ranges.len()];
        point[0] = axis(lo0, hi0, i0);
        let mut best = (f64::INFINITY, point.clone());
        for flat in 0..inner {
            let mut rem = flat;
            for (k, &(lo, hi)) in rest.iter().enumerate().rev() {
                point[k + 1] = axis(lo, hi, rem % resolution);
                rem /= resolution;
            }
            let v = objective(&point);
            if v < best.0 {
                best = (v, point.clone());
            }
        }
        best
    });
    let (value, point) = slices
        .into_iter()
        .fold((f64::INFINITY, vec![]), |acc, s| if s.0 < acc.0 { s } else { acc });
    Ok(GridMinimum {
        value,
        point,
        evaluations: evaluations as u64,
    })
}
