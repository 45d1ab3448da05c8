//! Nelder–Mead simplex search with dimension-adaptive coefficients
//! (Gao & Han), suited to the 6- to 16-dimensional charts used here.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub initial_step: f64,
    /// Stop when the spread of simplex values drops below this.
    pub ftol: f64,
    /// Stop when every vertex lies within this distance of the best vertex.
    pub xtol: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            initial_step: 0.25,
            ftol: 1e-13,
            xtol: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(x0);
        return SimplexResult {
            x: vec![],
            value,
            iterations: 0,
            evaluations: 1,
            converged: true,
        };
    }

    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.ftol || size <= opts.xtol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / nf)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(alpha * beta);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(alpha * gamma);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + delta * (*x - b);
            }
            values[i] = eval(&simplex[i]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("nonempty simplex");
    SimplexResult {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rosenbrock_2d() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &SimplexOptions {
                initial_step: 0.5,
                ftol: 1e-20,
                xtol: 1e-12,
                max_iterations: 20_000,
            },
        );
        assert!(r.converged);
        assert_abs_diff_eq!(r.x[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.x[1], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn shifted_quadratic_6d() {
        let target = [0.1, -0.2, 0.3, 0.05, -0.4, 0.25];
        let r = nelder_mead(
            |x| x.iter().zip(&target).enumerate().map(|(i, (a, b))| (i as f64 + 1.0) * (a - b).powi(2)).sum(),
            &[0.0; 6],
            &SimplexOptions::default(),
        );
        assert!(r.value < 1e-12);
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        let r = nelder_mead(|x| x[0].powi(2) + x[1].powi(2), &[3.0, 3.0], &SimplexOptions {
            max_iterations: 3,
            ..SimplexOptions::default()
        });
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
