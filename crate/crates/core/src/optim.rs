//! Small deterministic optimizers shared by the null models, the test
//! function classes and the saddle solver.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)` once the bracket is narrower than `tol`. The
/// endpoints are compared against the interior optimum so maxima on the
/// boundary are returned exactly.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
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
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Maximizer of a concave function on `[lo, hi]` given its first and second
/// derivatives, `deriv(x) = (f'(x), f''(x))`.
///
/// Safeguarded Newton on `f'`: the root of the derivative is kept bracketed
/// and any Newton step that leaves the bracket is replaced by bisection.
/// Infinite derivatives at the endpoints (log barriers) are fine.
pub fn concave_argmax_1d(deriv: impl Fn(f64) -> (f64, f64), lo: f64, hi: f64, start: Option<f64>, tol: f64) -> f64 {
    let (d_lo, _) = deriv(lo);
    if d_lo <= 0.0 {
        return lo;
    }
    let (d_hi, _) = deriv(hi);
    if d_hi >= 0.0 {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    let mut x = start.filter(|s| *s > lo && *s < hi).unwrap_or(0.5 * (lo + hi));
    for _ in 0..200 {
        let (g, h) = deriv(x);
        if g == 0.0 {
            return x;
        }
        if g > 0.0 {
            a = x;
        } else {
            b = x;
        }
        if b - a <= tol {
            break;
        }
        let newton = if h < 0.0 && h.is_finite() { x - g / h } else { f64::NAN };
        let next = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= tol * (1.0 + x.abs()) {
            x = next;
            break;
        }
        x = next;
    }
    x.clamp(lo, hi)
}

/// Minimizer of a convex function on `[lo, hi]` from the sign of its
/// (sub)derivative alone, by bisection to width `tol`.
pub fn convex_argmin_bisect(deriv: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    if deriv(lo) >= 0.0 {
        return lo;
    }
    if deriv(hi) <= 0.0 {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let g = deriv(mid);
        if g == 0.0 {
            return mid;
        }
        if g < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Result of [`simplex_maximize`].
#[derive(Debug, Clone)]
pub struct SimplexSolution {
    pub weights: Vec<f64>,
    pub value: f64,
    /// Frank-Wolfe gap `max_k g_k - <g, w>`, an upper bound on `max - value`
    /// for concave objectives.
    pub gap: f64,
    pub iterations: usize,
}

/// Frank-Wolfe gap of a gradient at `w`.
pub fn frank_wolfe_gap(grad: &[f64], w: &[f64]) -> f64 {
    let max = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inner: f64 = grad.iter().zip(w).map(|(g, w)| g * w).sum();
    max - inner
}

/// Exponentiated-gradient (mirror) ascent over the probability simplex with
/// an adaptive step and Armijo backtracking.
///
/// `eval(w, grad)` writes the gradient into `grad` and returns the objective.
/// Stops once the Frank-Wolfe gap drops below `tol`.
pub fn simplex_maximize(
    mut eval: impl FnMut(&[f64], &mut [f64]) -> f64,
    start: &[f64],
    tol: f64,
    max_iters: usize,
) -> SimplexSolution {
    let k = start.len();
    // Pull the start off the boundary: a warm start with a vanishing weight
    // would otherwise need an astronomically small first step.
    let mut w: Vec<f64> = start.iter().map(|&x| x.max(0.0)).collect();
    normalize(&mut w);
    w.iter_mut().for_each(|x| *x = (1.0 - 1e-9) * *x + 1e-9 / k as f64);
    let mut grad = vec![0.0; k];
    let mut trial_grad = vec![0.0; k];
    let mut trial = vec![0.0; k];
    let mut value = eval(&w, &mut grad);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut gap = frank_wolfe_gap(&grad, &w);
    while gap > tol && iterations < max_iters {
        iterations += 1;
        let gmax = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut accepted = false;
        for _ in 0..120 {
            for i in 0..k {
                trial[i] = w[i] * (step * (grad[i] - gmax)).exp();
            }
            normalize(&mut trial);
            let predicted: f64 = (0..k).map(|i| grad[i] * (trial[i] - w[i])).sum();
            let trial_value = eval(&trial, &mut trial_grad);
            if trial_value.is_finite() && trial_value >= value + 1e-4 * predicted {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        std::mem::swap(&mut w, &mut trial);
        std::mem::swap(&mut grad, &mut trial_grad);
        value = eval(&w, &mut grad);
        gap = frank_wolfe_gap(&grad, &w);
        step = (step * 2.0).min(1e12);
    }
    SimplexSolution {
        weights: w,
        value,
        gap,
        iterations,
    }
}

pub(crate) fn normalize(w: &mut [f64]) {
    let total: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_section_finds_interior_and_boundary_maxima() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(fx, 0.0, epsilon = 1e-15);
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn newton_matches_closed_form() {
        // f = 7 log(x) + 3 log(1 - x), argmax 0.7
        let x = concave_argmax_1d(
            |x| {
                (
                    7.0 / x - 3.0 / (1.0 - x),
                    -7.0 / (x * x) - 3.0 / ((1.0 - x) * (1.0 - x)),
                )
            },
            0.0,
            1.0,
            None,
            1e-14,
        );
        assert_abs_diff_eq!(x, 0.7, epsilon = 1e-12);
    }

    #[test]
    fn bisection_min() {
        let x = convex_argmin_bisect(|x| 2.0 * (x - 0.25), 0.0, 1.0, 1e-14);
        assert_abs_diff_eq!(x, 0.25, epsilon = 1e-13);
        assert_eq!(convex_argmin_bisect(|x| x + 1.0, 0.0, 1.0, 1e-14), 0.0);
    }

    #[test]
    fn simplex_ascent_on_log_objective() {
        // max sum c_k log w_k on the simplex is at w = c / sum c.
        let c = [1.0, 2.0, 3.0, 4.0];
        let sol = simplex_maximize(
            |w, g| {
                for i in 0..4 {
                    g[i] = c[i] / w[i] / 10.0;
                }
                c.iter().zip(w).map(|(c, w)| c * w.ln()).sum::<f64>() / 10.0
            },
            &[0.25; 4],
            1e-12,
            10_000,
        );
        for (w, ci) in sol.weights.iter().zip(c) {
            assert_abs_diff_eq!(*w, ci / 10.0, epsilon = 1e-6);
        }
        assert!(sol.gap <= 1e-12);
    }
}
