//! Nelder–Mead simplex minimization.

/// Stopping rules for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Stop once the largest vertex distance from the best vertex falls below this.
    pub diameter_tol: f64,
    pub max_evals: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { diameter_tol: 1e-9, max_evals: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub diameter: f64,
    pub converged: bool,
}

/// Minimizes `f` from the simplex spanned by `x0` and `x0 + steps[i]·e_i`.
///
/// Non-finite objective values are treated as +∞.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], steps: &[f64], opts: SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol || evals >= opts.max_evals {
            return SimplexResult {
                x: pts[0].clone(),
                value: vals[0],
                evals,
                diameter,
                converged: diameter < opts.diameter_tol,
            };
        }

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (w - c)).collect() };

        let xr = along(-alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-gamma);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(-rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = pts[0].clone();
        for i in 1..=n {
            for (v, b) in pts[i].iter_mut().zip(&best) {
                *v = b + sigma * (*v - b);
            }
            vals[i] = eval(&pts[i], &mut evals);
        }
    }
}
