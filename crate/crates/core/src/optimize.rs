//! Small derivative-free optimizers: golden-section search on an interval and
//! Nelder-Mead on ℝᵈ. Both minimize; negate the objective to maximize.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[a, b]`, assuming it is unimodal there.
/// Returns the best abscissa seen and its value.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
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
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadParams {
    pub initial_step: f64,
    /// Stop once the simplex diameter and the value spread fall below these.
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        NelderMeadParams {
            initial_step: 0.1,
            x_tol: 1e-10,
            f_tol: 1e-14,
            max_evals: 2000,
        }
    }
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction ½, shrink ½)
/// from an axis-aligned initial simplex.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], params: NelderMeadParams) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += params.initial_step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut evals = d + 1;
    let point = |base: &[f64], dir: &[f64], t: f64| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, x)| b + t * (x - b)).collect()
    };
    while evals < params.max_evals {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter <= params.x_tol && spread <= params.f_tol {
            break;
        }

        let mut centroid = vec![0.0; d];
        for x in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d as f64;
            }
        }
        let reflected = point(&centroid, &simplex[d], -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = point(&centroid, &simplex[d], -2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[d] {
            let x = point(&centroid, &reflected, 0.5);
            let v = f(&x);
            (x, v)
        } else {
            let x = point(&centroid, &simplex[d], 0.5);
            let v = f(&x);
            (x, v)
        };
        evals += 1;
        if fc < values[d].min(fr) {
            simplex[d] = contracted;
            values[d] = fc;
            continue;
        }
        for i in 1..=d {
            simplex[i] = point(&simplex[0], &simplex[i], 0.5);
            values[i] = f(&simplex[i]);
        }
        evals += d;
    }
    let best = (0..=d).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    (simplex[best].clone(), values[best])
}

/// Nelder-Mead restarted from its own optimum with a shrinking step until
/// a restart no longer improves the value.
pub fn nelder_mead_restarts(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    params: NelderMeadParams,
    restarts: usize,
) -> (Vec<f64>, f64) {
    let (mut x, mut fx) = nelder_mead(&f, x0, params);
    let mut step = params.initial_step;
    for _ in 0..restarts {
        step *= 0.25;
        let (y, fy) = nelder_mead(&f, &x, NelderMeadParams { initial_step: step, ..params });
        if fy < fx {
            let gain = fx - fy;
            x = y;
            fx = fy;
            if gain <= params.f_tol {
                break;
            }
        } else {
            break;
        }
    }
    (x, fx)
}
