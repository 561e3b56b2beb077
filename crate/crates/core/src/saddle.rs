//! Convex-concave saddle problems behind the finite-alphabet log-ratio class.
//!
//! For empirical frequencies `p` and a hull null with vertices `V_k`, the
//! objective is
//!
//! ```text
//! J(f, w) = <p, f> - log sum_x q_w[x] exp(f[x]),    q_w = sum_k w_k V_k,
//! ```
//!
//! with `f = log(phi)` ranging over the box `[log eps, log(1/eps)]^m` and `w`
//! over the vertex-weight simplex. `J` is concave in `f` and convex in `w`.
//!
//! Two facts make the gap cheap to certify exactly:
//! * `inf_w J(f, w) = <p, f> - psi0(f)`, a maximum over vertices.
//! * `sup_f J(f, w)` for fixed `w` has a water-filling solution:
//!   `f[x] = clamp(log(p[x] / q[x]) + t)` with a scalar `t` found by a scan
//!   over breakpoints.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::null::ConvexHullNull;
use crate::optim::{convex_argmin_bisect, normalize, simplex_maximize};
use crate::prob::SeededStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GapSchedule {
    /// `gap_tol` at every round.
    #[default]
    Fixed,
    /// `min(1e-4, 1/n^2)`, cheaper early rounds with a vanishing tolerance.
    InverseSquare,
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub max_iters: usize,
    pub schedule: GapSchedule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            max_iters: 200_000,
            schedule: GapSchedule::Fixed,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0) {
            return Err(Error::Config(format!("gap_tol must be positive, got {}", self.gap_tol)));
        }
        Ok(())
    }

    /// Gap tolerance for the fit used at round `n`.
    pub fn tol_at(&self, n: u64) -> f64 {
        match self.schedule {
            GapSchedule::Fixed => self.gap_tol,
            GapSchedule::InverseSquare => {
                let n = n.max(1) as f64;
                (1.0 / (n * n)).min(1e-4).max(self.gap_tol)
            }
        }
    }
}

/// One instance of the saddle problem.
#[derive(Debug, Clone)]
pub struct SaddleProblem<'a> {
    freqs: Vec<f64>,
    null: &'a ConvexHullNull,
    /// Box half-width `log(1/eps)` in log-ratio coordinates.
    log_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    /// Ratio parameters `phi = exp(f)` in `[eps, 1/eps]^m`.
    pub phi: Vec<f64>,
    pub log_phi: Vec<f64>,
    pub theta_weights: Vec<f64>,
    /// `inf_w J(f, w)`, the value the returned test function guarantees.
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
}

impl<'a> SaddleProblem<'a> {
    pub fn new(counts: &[u64], null: &'a ConvexHullNull, epsilon: f64) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::Domain("saddle problem needs at least one observation".into()));
        }
        let freqs = counts.iter().map(|&c| c as f64 / n as f64).collect();
        Self::from_freqs(freqs, null, epsilon)
    }

    pub fn from_freqs(freqs: Vec<f64>, null: &'a ConvexHullNull, epsilon: f64) -> Result<Self> {
        if freqs.len() != null.alphabet_size() {
            return Err(Error::Dimension {
                expected: null.alphabet_size(),
                got: freqs.len(),
            });
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self {
            freqs,
            null,
            log_bound: (1.0 / epsilon).ln(),
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn null(&self) -> &ConvexHullNull {
        self.null
    }

    /// `(lo, hi)` bounds on each `log phi[x]`.
    pub fn log_box(&self) -> (f64, f64) {
        (-self.log_bound, self.log_bound)
    }

    fn empirical(&self, f: &[f64]) -> f64 {
        self.freqs
            .iter()
            .zip(f)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, fx)| p * fx)
            .sum()
    }

    /// `J(f, w)`.
    pub fn value(&self, f: &[f64], w: &[f64]) -> f64 {
        let q = self.null.point(w);
        self.empirical(f) - log_mgf(&q, f)
    }

    /// `inf_w J(f, w) = <p, f> - psi0(f)`.
    pub fn lower_value(&self, f: &[f64]) -> f64 {
        let psi = self
            .null
            .psi0(f)
            .expect("log-ratio coordinates are finite and sized to the alphabet");
        self.empirical(f) - psi
    }

    /// `sup_f J(f, w)` and its maximizer.
    pub fn upper_value(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let q = self.null.point(w);
        let f = best_response(&self.freqs, &q, -self.log_bound, self.log_bound);
        (self.empirical(&f) - log_mgf(&q, &f), f)
    }

    /// Gradient of `w -> sup_f J(f, w)` at the best response `f` (Danskin).
    fn dual_gradient(&self, w: &[f64], f: &[f64], grad: &mut [f64]) {
        let q = self.null.point(w);
        let z: f64 = q.iter().zip(f).map(|(q, f)| q * f.exp()).sum();
        for (k, g) in grad.iter_mut().enumerate() {
            let ek: f64 = self.null.vertices()[k]
                .probs()
                .iter()
                .zip(f)
                .map(|(v, f)| v * f.exp())
                .sum();
            *g = -ek / z;
        }
    }

    fn clamp_box(&self, f: &mut [f64]) {
        for x in f.iter_mut() {
            *x = x.clamp(-self.log_bound, self.log_bound);
        }
    }
}

fn log_mgf(q: &[f64], f: &[f64]) -> f64 {
    let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + q.iter().zip(f).map(|(q, f)| q * (f - max).exp()).sum::<f64>().ln()
}

/// Maximizer of `<p, f> - log sum_x q[x] exp(f[x])` over `[lo, hi]^m`.
///
/// At the optimum `f[x] = clamp(r[x] + t)` with `r = log(p / q)` and
/// `t = log sum_x q[x] exp(f[x])`. `G(t) = log sum q exp(f(t)) - t` is
/// non-increasing with `G(lo) >= 0 >= G(hi)`, and between consecutive
/// breakpoints the root has the closed form `exp(t) = A / (1 - P_I)`.
/// Symbols without empirical mass sit at `lo`.
pub fn best_response(p: &[f64], q: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let r: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(&px, &qx)| {
            if px <= 0.0 {
                f64::NEG_INFINITY
            } else if qx <= 0.0 {
                f64::INFINITY
            } else {
                (px / qx).ln()
            }
        })
        .collect();
    let at = |t: f64| -> Vec<f64> { r.iter().map(|rx| (rx + t).clamp(lo, hi)).collect() };
    let g = |t: f64| -> f64 {
        let f = at(t);
        log_mgf(q, &f) - t
    };

    let mut knots = vec![lo, hi];
    for &rx in r.iter().filter(|x| x.is_finite()) {
        for t in [lo - rx, hi - rx] {
            if t > lo && t < hi {
                knots.push(t);
            }
        }
    }
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup();

    let values: Vec<f64> = knots.iter().map(|&t| g(t)).collect();
    let mut t_star = hi;
    for i in 0..knots.len() {
        if values[i] == 0.0 {
            t_star = knots[i];
            break;
        }
        if i + 1 < knots.len() && values[i] > 0.0 && values[i + 1] <= 0.0 {
            let (a, b) = (knots[i], knots[i + 1]);
            if values[i + 1] == 0.0 {
                t_star = b;
                break;
            }
            let mid = 0.5 * (a + b);
            let mut interior_mass = 0.0;
            let mut clamped = 0.0;
            for x in 0..r.len() {
                let v = r[x] + mid;
                if v > lo && v < hi {
                    interior_mass += p[x];
                } else {
                    clamped += q[x] * v.clamp(lo, hi).exp();
                }
            }
            let slack = 1.0 - interior_mass;
            t_star = if slack > 1e-15 && clamped > 0.0 {
                (clamped.ln() - slack.ln()).clamp(a, b)
            } else {
                mid
            };
            break;
        }
    }
    at(t_star)
}

/// Duality gap `sup_f J(f, w) - inf_w' J(log phi, w')` of a feasible point.
pub fn certify_gap(problem: &SaddleProblem<'_>, phi: &[f64], theta_weights: &[f64]) -> f64 {
    let f: Vec<f64> = phi.iter().map(|x| x.ln()).collect();
    let (upper, _) = problem.upper_value(theta_weights);
    upper - problem.lower_value(&f)
}

/// Minimizes the convex dual `w -> sup_f J(f, w)` over the simplex and takes
/// the best response to the minimizer, falling back to averaged gradient
/// ascent-descent when that point does not certify.
pub fn solve(problem: &SaddleProblem<'_>, gap_tol: f64, max_iters: usize) -> Result<SaddleSolution> {
    solve_warm(problem, gap_tol, max_iters, None)
}

pub fn solve_warm(
    problem: &SaddleProblem<'_>,
    gap_tol: f64,
    max_iters: usize,
    warm_weights: Option<&[f64]>,
) -> Result<SaddleSolution> {
    if !(gap_tol > 0.0) {
        return Err(Error::Config(format!("gap_tol must be positive, got {gap_tol}")));
    }
    let k = problem.null.num_vertices();
    let (weights, iterations) = match k {
        1 => (vec![1.0], 0),
        2 => {
            let deriv = |w: f64| {
                let ws = [w, 1.0 - w];
                let (_, f) = problem.upper_value(&ws);
                let mut grad = [0.0; 2];
                problem.dual_gradient(&ws, &f, &mut grad);
                grad[0] - grad[1]
            };
            (vec_pair(convex_argmin_bisect(deriv, 0.0, 1.0, 1e-15)), 50)
        }
        _ => {
            let start = warm_weights
                .filter(|w| w.len() == k)
                .map(|w| w.to_vec())
                .unwrap_or_else(|| vec![1.0 / k as f64; k]);
            let sol = simplex_maximize(
                |w, grad| {
                    let (upper, f) = problem.upper_value(w);
                    problem.dual_gradient(w, &f, grad);
                    grad.iter_mut().for_each(|g| *g = -*g);
                    -upper
                },
                &start,
                gap_tol * 1e-3,
                max_iters.min(10_000),
            );
            (sol.weights, sol.iterations)
        }
    };
    let (upper, f) = problem.upper_value(&weights);
    let lower = problem.lower_value(&f);
    let gap = (upper - lower).max(0.0);
    if gap <= gap_tol {
        return Ok(solution(f, weights, lower, gap, iterations));
    }

    let budget = max_iters.saturating_sub(iterations);
    let run = ascent_descent(problem, &f, &weights, budget, gap_tol);
    let total = iterations + run.iterations;
    if run.gap <= gap_tol {
        let lower = problem.lower_value(&run.f);
        return Ok(solution(run.f, run.weights, lower, run.gap, total));
    }
    let (best_f, best_w, best_gap) = if run.gap < gap {
        (run.f, run.weights, run.gap)
    } else {
        (f, weights, gap)
    };
    Err(Error::SolverFailure {
        gap: best_gap,
        tol: gap_tol,
        iterations: total,
        phi: best_f.iter().map(|x| x.exp()).collect(),
        weights: best_w,
    })
}

fn vec_pair(w: f64) -> Vec<f64> {
    vec![w, 1.0 - w]
}

fn solution(f: Vec<f64>, weights: Vec<f64>, value: f64, gap: f64, iterations: usize) -> SaddleSolution {
    SaddleSolution {
        phi: f.iter().map(|x| x.exp()).collect(),
        log_phi: f,
        theta_weights: weights,
        value,
        gap,
        iterations,
    }
}

/// Averaged iterates of a gradient ascent-descent run.
#[derive(Debug, Clone)]
pub struct AscentDescentRun {
    pub f: Vec<f64>,
    pub weights: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    /// `(iteration, certified gap of the running average)` at each power of two.
    pub trace: Vec<(usize, f64)>,
}

/// Projected gradient ascent in `f` (box) simultaneous with mirror descent in
/// `w` (simplex), step `1/sqrt(t)`, with uniform iterate averaging.
///
/// Stops early once the averaged iterate certifies `gap_tol`.
pub fn ascent_descent(
    problem: &SaddleProblem<'_>,
    f0: &[f64],
    w0: &[f64],
    iters: usize,
    gap_tol: f64,
) -> AscentDescentRun {
    let m = f0.len();
    let k = w0.len();
    let mut f = f0.to_vec();
    problem.clamp_box(&mut f);
    let mut w: Vec<f64> = w0.iter().map(|x| x.max(1e-12)).collect();
    normalize(&mut w);
    let mut f_sum = vec![0.0; m];
    let mut w_sum = vec![0.0; k];
    let mut trace = Vec::new();
    let mut best = (f.clone(), w.clone(), f64::INFINITY);
    let mut grad_w = vec![0.0; k];
    let mut next_check = 1;
    for t in 1..=iters {
        let step = 1.0 / (t as f64).sqrt();
        let q = problem.null.point(&w);
        let lm = log_mgf(&q, &f);
        let exp_f: Vec<f64> = f.iter().map(|x| (x - lm).exp()).collect();
        // d/df: p - softmax_q(f)
        let new_f: Vec<f64> = (0..m)
            .map(|x| (f[x] + step * (problem.freqs[x] - q[x] * exp_f[x])).clamp(-problem.log_bound, problem.log_bound))
            .collect();
        // d/dw_k: -E_{V_k}[e^f] / E_q[e^f]
        for (kk, g) in grad_w.iter_mut().enumerate() {
            *g = -problem.null.vertices()[kk]
                .probs()
                .iter()
                .zip(&exp_f)
                .map(|(v, e)| v * e)
                .sum::<f64>();
        }
        let gmin = grad_w.iter().copied().fold(f64::INFINITY, f64::min);
        for kk in 0..k {
            w[kk] *= (-step * (grad_w[kk] - gmin)).exp();
        }
        normalize(&mut w);
        f = new_f;
        for x in 0..m {
            f_sum[x] += f[x];
        }
        for kk in 0..k {
            w_sum[kk] += w[kk];
        }
        if t == next_check || t == iters {
            let f_avg: Vec<f64> = f_sum.iter().map(|s| s / t as f64).collect();
            let w_avg: Vec<f64> = w_sum.iter().map(|s| s / t as f64).collect();
            let gap = (problem.upper_value(&w_avg).0 - problem.lower_value(&f_avg)).max(0.0);
            if t == next_check {
                trace.push((t, gap));
                next_check *= 2;
            }
            if gap < best.2 {
                best = (f_avg, w_avg, gap);
            }
            if gap <= gap_tol {
                return AscentDescentRun {
                    f: best.0,
                    weights: best.1,
                    gap: best.2,
                    iterations: t,
                    trace,
                };
            }
        }
    }
    AscentDescentRun {
        f: best.0,
        weights: best.1,
        gap: best.2,
        iterations: iters,
        trace,
    }
}

/// A uniformly random feasible starting point, for restarts and tests.
pub fn random_start(problem: &SaddleProblem<'_>, stream: SeededStream) -> (Vec<f64>, Vec<f64>) {
    let mut rng = stream.rng();
    let m = problem.freqs.len();
    let k = problem.null.num_vertices();
    let f = (0..m)
        .map(|_| rng.random_range(-problem.log_bound..=problem.log_bound))
        .collect();
    let mut w: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    normalize(&mut w);
    (f, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::golden_section_max;
    use approx::assert_abs_diff_eq;

    fn hull(rows: &[&[f64]]) -> ConvexHullNull {
        ConvexHullNull::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Dense grid over the box for sup_f J(f, q) with a fixed q.
    fn grid_upper(p: &[f64], q: &[f64], lo: f64, hi: f64, steps: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let f = [
                    lo + (hi - lo) * i as f64 / steps as f64,
                    lo + (hi - lo) * j as f64 / steps as f64,
                ];
                let v = p[0] * f[0] + p[1] * f[1] - (q[0] * f[0].exp() + q[1] * f[1].exp()).ln();
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn best_response_matches_grid() {
        let lo = 0.5f64.ln();
        let hi = 2.0f64.ln();
        for (p, q) in [
            ([0.7, 0.3], [0.5, 0.5]),
            ([1.0, 0.0], [0.5, 0.5]),
            ([0.55, 0.45], [0.5, 0.5]),
            ([0.2, 0.8], [0.9, 0.1]),
            ([0.5, 0.5], [1.0, 0.0]),
        ] {
            let f = best_response(&p, &q, lo, hi);
            let v = p[0] * f[0] + p[1] * f[1] - log_mgf(&q, &f);
            let grid = grid_upper(&p, &q, lo, hi, 2000);
            assert!(v >= grid - 1e-12, "p={p:?} q={q:?}: {v} < {grid}");
            assert!(v - grid <= 1e-5, "p={p:?} q={q:?}: {v} >> {grid}");
        }
    }

    #[test]
    fn best_response_unconstrained_is_log_ratio() {
        let p = [0.5, 0.3, 0.2];
        let q = [0.4, 0.35, 0.25];
        let f = best_response(&p, &q, -5.0, 5.0);
        for x in 0..3 {
            assert_abs_diff_eq!(f[x] - f[0], (p[x] / q[x]).ln() - (p[0] / q[0]).ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn point_mass_instance_cancels() {
        let null = hull(&[&[1.0, 0.0]]);
        let problem = SaddleProblem::new(&[7, 0], &null, 0.5).unwrap();
        let sol = solve(&problem, 1e-8, 1000).unwrap();
        assert!(sol.gap <= 1e-8);
        assert_abs_diff_eq!(sol.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn corner_instance() {
        let null = hull(&[&[0.5, 0.5]]);
        let problem = SaddleProblem::new(&[10, 0], &null, 0.5).unwrap();
        let sol = solve(&problem, 1e-8, 1000).unwrap();
        assert_abs_diff_eq!(sol.phi[0] / sol.phi[1], 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.phi[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.phi[1], 0.5, epsilon = 1e-9);
        let expected = 2.0f64.ln() - 1.25f64.ln();
        assert_abs_diff_eq!(sol.value, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(expected, 0.470004, epsilon = 1e-6);
        assert!(sol.gap <= 1e-8);
    }

    #[test]
    fn two_vertex_instance_matches_nested_oracle() {
        let null = hull(&[&[0.6, 0.2, 0.2], &[0.2, 0.6, 0.2]]);
        let problem = SaddleProblem::new(&[5, 3, 2], &null, 0.25).unwrap();
        let sol = solve(&problem, 1e-8, 200_000).unwrap();
        assert!(sol.gap <= 1e-8, "gap {}", sol.gap);
        let oracle = crate::saddle::tests::nested_oracle(&problem);
        assert_abs_diff_eq!(sol.value, oracle, epsilon = 1e-6);
    }

    /// Max over f of min over w, with f on faces where one coordinate sits at
    /// the upper bound (shift invariance), coarse-to-fine grid in f and a
    /// golden-section search over the single hull weight.
    pub(crate) fn nested_oracle(problem: &SaddleProblem<'_>) -> f64 {
        let (lo, hi) = problem.log_box();
        let inner = |f: &[f64]| -> f64 {
            let (_, v) = golden_section_max(|w| -problem.value(f, &[w, 1.0 - w]), 0.0, 1.0, 1e-12);
            -v
        };
        let mut best = f64::NEG_INFINITY;
        for fixed in 0..3 {
            let free: Vec<usize> = (0..3).filter(|&x| x != fixed).collect();
            let (mut a0, mut b0, mut a1, mut b1) = (lo, hi, lo, hi);
            let mut face_best = (f64::NEG_INFINITY, 0.0, 0.0);
            for _ in 0..12 {
                let steps = 40;
                for i in 0..=steps {
                    for j in 0..=steps {
                        let mut f = [hi; 3];
                        f[free[0]] = a0 + (b0 - a0) * i as f64 / steps as f64;
                        f[free[1]] = a1 + (b1 - a1) * j as f64 / steps as f64;
                        let v = inner(&f);
                        if v > face_best.0 {
                            face_best = (v, f[free[0]], f[free[1]]);
                        }
                    }
                }
                let h0 = (b0 - a0) / 8.0;
                let h1 = (b1 - a1) / 8.0;
                a0 = (face_best.1 - h0).max(lo);
                b0 = (face_best.1 + h0).min(hi);
                a1 = (face_best.2 - h1).max(lo);
                b1 = (face_best.2 + h1).min(hi);
            }
            best = best.max(face_best.0);
        }
        best
    }

    #[test]
    fn certify_gap_at_saddle_and_perturbed() {
        let null = hull(&[&[0.5, 0.5]]);
        let problem = SaddleProblem::new(&[10, 0], &null, 0.5).unwrap();
        assert!(certify_gap(&problem, &[2.0, 0.5], &[1.0]) <= 1e-9);
        assert!(certify_gap(&problem, &[2.0, 0.6], &[1.0]) > 0.0);
    }

    #[test]
    fn weak_duality_along_ascent_descent() {
        let null = hull(&[&[0.6, 0.2, 0.2], &[0.2, 0.6, 0.2]]);
        let problem = SaddleProblem::new(&[5, 3, 2], &null, 0.25).unwrap();
        let value = solve(&problem, 1e-10, 200_000).unwrap().value;
        let (f0, w0) = random_start(&problem, SeededStream::new(3, 0));
        let run = ascent_descent(&problem, &f0, &w0, 512, 0.0);
        for (_, gap) in &run.trace {
            assert!(*gap >= 0.0);
        }
        assert!(problem.lower_value(&run.f) <= value + 1e-12);
        assert!(problem.upper_value(&run.weights).0 >= value - 1e-12);
    }

    #[test]
    fn averaged_gap_shrinks_when_iterations_double() {
        let point = hull(&[&[1.0, 0.0]]);
        let single = hull(&[&[0.5, 0.5]]);
        let pair = hull(&[&[0.6, 0.2, 0.2], &[0.2, 0.6, 0.2]]);
        let problems = [
            SaddleProblem::new(&[10, 0], &point, 0.5).unwrap(),
            SaddleProblem::new(&[10, 0], &single, 0.5).unwrap(),
            SaddleProblem::new(&[5, 3, 2], &pair, 0.25).unwrap(),
        ];
        for problem in &problems {
            for seed in 0..5 {
                let (f0, w0) = random_start(problem, SeededStream::new(seed, 0));
                let run = ascent_descent(problem, &f0, &w0, 1 << 14, 0.0);
                // Past the burn-in where the average still carries the start.
                let late: Vec<_> = run.trace.iter().filter(|(t, _)| *t >= 1024).collect();
                for pair in late.windows(2) {
                    assert!(
                        pair[1].1 <= pair[0].1 + 1e-12,
                        "{:?} {seed} {:?}",
                        problem.freqs(),
                        run.trace
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let null = hull(&[&[0.5, 0.5]]);
        assert!(SaddleProblem::new(&[0, 0], &null, 0.5).is_err());
        assert!(SaddleProblem::new(&[1, 0, 0], &null, 0.5).is_err());
        assert!(SaddleProblem::new(&[1, 0], &null, 1.5).is_err());
        let problem = SaddleProblem::new(&[1, 1], &null, 0.5).unwrap();
        assert!(matches!(solve(&problem, 0.0, 10), Err(Error::Config(_))));
    }

    #[test]
    fn gap_schedule() {
        let cfg = SolverConfig {
            gap_tol: 1e-12,
            max_iters: 10,
            schedule: GapSchedule::InverseSquare,
        };
        assert_eq!(cfg.tol_at(2), 1e-4);
        assert_abs_diff_eq!(cfg.tol_at(1000), 1e-6, epsilon = 1e-18);
        assert_eq!(SolverConfig::default().tol_at(5), 1e-8);
    }
}
