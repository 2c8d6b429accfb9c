//! Small deterministic optimizers: dense grid + golden-section refinement in
//! one dimension, Nelder–Mead in several.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximize a unimodal `f` on `[a, b]` to abscissa tolerance `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Global maximum on the open interval `(lo, hi)`: evaluate `points` interior
/// grid points, then refine around the best one (ties go to the smaller
/// abscissa).
pub fn grid_then_golden<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> (f64, f64) {
    let h = (hi - lo) / (points as f64 + 1.0);
    let mut best_k = 1;
    let mut best = f64::NEG_INFINITY;
    for k in 1..=points {
        let v = f(lo + h * k as f64);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let a = lo + h * (best_k as f64 - 1.0);
    let b = lo + h * (best_k as f64 + 1.0);
    let (x, v) = golden_section_max(&f, a, b, tol);
    if v >= best {
        (x, v)
    } else {
        (lo + h * best_k as f64, best)
    }
}

/// Nelder–Mead maximization from `start` with initial simplex edge `step`.
/// Stops when the spread of simplex values falls below `ftol` or after
/// `max_iter` iterations.
pub fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    step: f64,
    ftol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let neg = |x: &[f64]| -f(x);
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for k in 0..n {
        let mut p = start.to_vec();
        p[k] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| neg(p)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&k| simplex[k].clone()).collect();
        values = order.iter().map(|&k| values[k]).collect();
        if (values[n] - values[0]).abs() <= ftol {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let reflected = along(-1.0);
        let fr = neg(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = neg(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = neg(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for k in 1..=n {
                    simplex[k] = best
                        .iter()
                        .zip(&simplex[k])
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    values[k] = neg(&simplex[k]);
                }
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    (simplex[best].clone(), -values[best])
}
