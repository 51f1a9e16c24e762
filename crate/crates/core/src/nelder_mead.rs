//! Box-constrained Nelder-Mead simplex search.
//!
//! Vertices are clamped into the box after every move. Objective values of
//! `NaN` are treated as `+inf` so callers can mark infeasible parameters.

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub max_iter: usize,
    /// Stop once the spread of simplex values is below this.
    pub ftol: f64,
    /// ... and the simplex diameter is below this.
    pub xtol: f64,
    /// Stop as soon as any vertex value falls to or below this.
    pub target: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_iter: 200, ftol: 1e-15, xtol: 1e-12, target: f64::NEG_INFINITY }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

fn clamp_into(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimize `f` over the box starting from `x0` with initial edge lengths `step`.
pub fn minimize<F>(mut f: F, x0: &[f64], bounds: &[(f64, f64)], step: &[f64], opts: Options) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut start = x0.to_vec();
    clamp_into(&mut start, bounds);
    let f0 = eval(&mut f, &start);
    if n == 0 || f0 <= opts.target {
        return Minimum { x: start, value: f0, iterations: 0 };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let mut v = start.clone();
        let (lo, hi) = bounds[i];
        let h = if step[i] > 0.0 { step[i] } else { 1e-3 };
        v[i] = if v[i] + h <= hi { v[i] + h } else { v[i] - h };
        v[i] = v[i].clamp(lo, hi);
        let fv = eval(&mut f, &v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    while iterations < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 <= opts.target {
            break;
        }
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            .fold(0.0f64, f64::max);
        if (spread.is_finite() && spread <= opts.ftol && diameter <= opts.xtol) || diameter == 0.0 {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (v, _) in &simplex[..n] {
            for (c, a) in centroid.iter_mut().zip(v) {
                *c += a / n as f64;
            }
        }
        let worst = simplex[n].0.clone();
        let point_along = |t: f64, out: &mut Vec<f64>| {
            for i in 0..n {
                out[i] = centroid[i] + t * (worst[i] - centroid[i]);
            }
            clamp_into(out, bounds);
        };

        point_along(-1.0, &mut trial);
        let fr = eval(&mut f, &trial);
        if fr < simplex[0].1 {
            let reflected = trial.clone();
            point_along(-2.0, &mut trial);
            let fe = eval(&mut f, &trial);
            simplex[n] = if fe < fr { (trial.clone(), fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (trial.clone(), fr);
            continue;
        }
        let (t, reference) = if fr < simplex[n].1 { (-0.5, fr) } else { (0.5, simplex[n].1) };
        point_along(t, &mut trial);
        let fc = eval(&mut f, &trial);
        if fc < reference {
            simplex[n] = (trial.clone(), fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for (v, fv) in simplex.iter_mut().skip(1) {
            for (a, b) in v.iter_mut().zip(&best) {
                *a = b + 0.5 * (*a - b);
            }
            *fv = eval(&mut f, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, iterations }
}

/// Repeated restarts from the incumbent with a shrinking initial simplex;
/// helps when the first run collapses early on a kink.
pub fn minimize_with_restarts<F>(
    mut f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    step: &[f64],
    opts: Options,
    restarts: usize,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best = minimize(&mut f, x0, bounds, step, opts);
    let mut scale = 0.1;
    for _ in 0..restarts {
        if best.value <= opts.target {
            break;
        }
        let s: Vec<f64> = step.iter().map(|h| h * scale).collect();
        let m = minimize(&mut f, &best.x, bounds, &s, opts);
        let improved = m.value < best.value;
        let iterations = best.iterations + m.iterations;
        if improved {
            best = m;
        }
        best.iterations = iterations;
        scale *= 0.1;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = Options { max_iter: 5000, ..Options::default() };
        let m = minimize(f, &[-1.2, 1.0], &[(-5.0, 5.0), (-5.0, 5.0)], &[0.5, 0.5], opts);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{m:?}");
    }

    #[test]
    fn respects_bounds() {
        let m = minimize(|x: &[f64]| x[0], &[0.5], &[(0.25, 1.0)], &[0.1], Options::default());
        assert_eq!(m.x[0], 0.25);
    }

    #[test]
    fn nan_is_infeasible() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.1).abs() };
        let m = minimize(f, &[1.0], &[(-1.0, 2.0)], &[0.5], Options::default());
        assert!((m.x[0] - 0.1).abs() < 1e-10);
    }

    #[test]
    fn zero_dimensional() {
        let m = minimize(|_: &[f64]| 3.0, &[], &[], &[], Options::default());
        assert_eq!(m.value, 3.0);
    }

    #[test]
    fn target_stops_early() {
        let opts = Options { target: 0.5, ..Options::default() };
        let m = minimize(|x: &[f64]| x[0] * x[0], &[2.0], &[(-4.0, 4.0)], &[1.0], opts);
        assert!(m.value <= 0.5);
    }
}
