//! Nelder-Mead simplex minimization (reflection 1, expansion 2, contraction ½, shrink ½).

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop once every vertex is within this max-norm distance of the best one.
    pub diameter_tol: f64,
    /// Relative size of the initial simplex along each coordinate.
    pub relative_step: f64,
    /// Step used for coordinates that start at zero.
    pub zero_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 2000,
            diameter_tol: 1e-8,
            relative_step: 0.05,
            zero_step: 0.00025,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Vertex {
    point: Vec<f64>,
    value: f64,
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, point: Vec<f64>) -> Vertex {
    let v = f(&point);
    Vertex {
        point,
        value: if v.is_nan() { f64::INFINITY } else { v },
    }
}

fn diameter(simplex: &[Vertex]) -> f64 {
    let best = &simplex[0].point;
    simplex[1..]
        .iter()
        .flat_map(|v| v.point.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

/// Minimizes `f` starting from `start`.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = start.len();
    let mut simplex: Vec<Vertex> = Vec::with_capacity(n + 1);
    simplex.push(eval(&f, start.to_vec()));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] = if p[i] != 0.0 {
            p[i] * (1.0 + opts.relative_step)
        } else {
            opts.zero_step
        };
        simplex.push(eval(&f, p));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.value.total_cmp(&b.value));
        if diameter(&simplex) < opts.diameter_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v.point[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].point)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = eval(&f, along(-1.0));
        if reflected.value < simplex[0].value {
            let expanded = eval(&f, along(-2.0));
            simplex[n] = if expanded.value < reflected.value { expanded } else { reflected };
            continue;
        }
        if reflected.value < simplex[n - 1].value {
            simplex[n] = reflected;
            continue;
        }
        let contracted = if reflected.value < simplex[n].value {
            eval(&f, along(-0.5))
        } else {
            eval(&f, along(0.5))
        };
        if contracted.value < reflected.value.min(simplex[n].value) {
            simplex[n] = contracted;
            continue;
        }
        let best = simplex[0].point.clone();
        for v in simplex.iter_mut().skip(1) {
            let p = v.point.iter().zip(&best).map(|(x, b)| b + 0.5 * (x - b)).collect();
            *v = eval(&f, p);
        }
    }

    let best = simplex.swap_remove(0);
    SimplexResult {
        point: best.point,
        value: best.value,
        iterations,
        converged,
    }
}
