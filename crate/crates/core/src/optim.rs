//! Nelder–Mead simplex minimization.

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the simplex diameter (max-abs metric) falls below this.
    pub x_tol: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 4000,
            x_tol: 1e-10,
            f_tol: 1e-13,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` starting from an axis-aligned simplex of size `step` around `x0`.
///
/// NaN values are treated as +∞.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, opts: NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((eval(x0), x0.to_vec()));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push((eval(&x), x));
    }

    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };

    loop {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let best = simplex[0].0;
        let worst = simplex[n].0;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(_, x)| x.iter().zip(&simplex[0].1).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let spread = if worst.is_finite() {
            (worst - best).abs()
        } else {
            f64::INFINITY
        };
        if evals.get() >= opts.max_evals
            || (diameter <= opts.x_tol && spread <= opts.f_tol)
            || diameter == 0.0
        {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (_, x) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst_x = simplex[n].1.clone();
        let reflected = point(&centroid, &worst_x, -REFLECT);
        let fr = eval(&reflected);

        if fr < best {
            let expanded = point(&centroid, &worst_x, -EXPAND);
            let fe = eval(&expanded);
            simplex[n] = if fe < fr {
                (fe, expanded)
            } else {
                (fr, reflected)
            };
            continue;
        }
        if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflected);
            continue;
        }
        let (target, ft) = if fr < worst {
            (reflected.clone(), fr)
        } else {
            (worst_x.clone(), worst)
        };
        let contracted = point(&centroid, &target, CONTRACT);
        let fc = eval(&contracted);
        if fc < ft {
            simplex[n] = (fc, contracted);
            continue;
        }
        let best_x = simplex[0].1.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x = point(&best_x, &entry.1, SHRINK);
            *entry = (eval(&x), x);
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (value, x) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        evals: evals.get(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(
            f,
            &[-1.2, 1.0],
            0.5,
            NelderMeadOptions {
                max_evals: 10_000,
                ..Default::default()
            },
        );
        assert!(
            (m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5,
            "{m:?}"
        );
    }

    #[test]
    fn quadratic_in_four_dimensions() {
        let target = [0.3, -1.0, 2.0, 0.5];
        let f = |x: &[f64]| {
            x.iter()
                .zip(&target)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
        };
        let m = nelder_mead(f, &[0.0; 4], 1.0, NelderMeadOptions::default());
        assert!(m.value < 1e-12);
    }

    #[test]
    fn nan_is_treated_as_infinite() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 1.0).powi(2)
            }
        };
        let m = nelder_mead(f, &[0.5], 0.2, NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-5);
    }
}
