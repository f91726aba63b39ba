//! Derivative-free Nelder-Mead minimization with dimension-adaptive coefficients.

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    /// Cap on iterations, shared across restarts.
    pub max_iter: usize,
    /// Stop when `f(worst) − f(best)` falls below this.
    pub f_tol: f64,
    pub initial_step: f64,
    /// Fresh simplices built around the incumbent after convergence.
    pub max_restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            f_tol: 1e-8,
            initial_step: 0.2,
            max_restarts: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult {
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x);
    let mut iterations = 0;
    let mut converged = false;
    let mut step = opts.initial_step;

    for _ in 0..=opts.max_restarts {
        let budget = opts.max_iter.saturating_sub(iterations);
        if budget == 0 {
            break;
        }
        let run = run_simplex(&mut eval, &best_x, best_f, step, opts.f_tol, budget);
        iterations += run.iterations;
        let improvement = best_f - run.f;
        if run.f < best_f {
            best_f = run.f;
            best_x = run.x;
        }
        converged = run.converged;
        if !run.converged || improvement <= opts.f_tol {
            break;
        }
        step *= 0.5;
    }

    SimplexResult {
        x: best_x,
        f: best_f,
        iterations,
        evaluations,
        converged,
    }
}

struct Run {
    x: Vec<f64>,
    f: f64,
    iterations: usize,
    converged: bool,
}

fn run_simplex(
    eval: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    f0: f64,
    step: f64,
    f_tol: f64,
    max_iter: usize,
) -> Run {
    let n = x0.len();
    let nf = n.max(1) as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    let mut vals = vec![f0];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += if x[i].abs() > 1e-3 {
            step * x[i].abs().max(0.25)
        } else {
            step
        };
        vals.push(eval(&x));
        pts.push(x);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, worst, second) = (order[0], order[n], order[n.saturating_sub(1)]);
        if vals[worst] - vals[best] <= f_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[k]) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < vals[best] {
            let xe = along(alpha * beta);
            let fe = eval(&xe);
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < vals[worst] {
            let xc = along(alpha * gamma);
            let fc = eval(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc);
            (xc, fc, fc < vals[worst])
        };
        if accept {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best].clone();
        for &k in &order[1..] {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&pts[k])
                .map(|(b, x)| b + delta * (x - b))
                .collect();
            vals[k] = eval(&x);
            pts[k] = x;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap();
    Run {
        x: pts[best].clone(),
        f: vals[best],
        iterations,
        converged,
    }
}
