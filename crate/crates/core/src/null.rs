//! Composite null models.
//!
//! Each null supplies the three quantities an e-process needs: the worst-case
//! log moment generating function `psi0(f) = sup_Q log E_Q[exp f]`, the
//! running maximum likelihood, and the `KL_inf` projection of an alternative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{concave_argmax_1d, frank_wolfe_gap, simplex_maximize};
use crate::prob::{kl_slices, log_sum_exp, BoundedDistSpec, Pmf};

/// Frank-Wolfe gap tolerance on the count-normalized likelihood.
const HULL_FIT_TOL: f64 = 1e-13;
const HULL_FIT_MAX_ITERS: usize = 10_000;

/// The convex hull of finitely many pmfs on a common alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHullNull {
    vertices: Vec<Pmf>,
    log_vertices: Vec<Vec<f64>>,
}

/// Best hull point for a weighted log-likelihood `sum_x c[x] log theta[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullFit {
    /// `sup_theta sum_x c[x] log theta[x]`; `-inf` if no hull point charges
    /// every symbol with positive weight.
    pub value: f64,
    pub weights: Vec<f64>,
    /// Frank-Wolfe duality gap of the returned weights (an upper bound on the
    /// remaining suboptimality of `value`).
    pub gap: f64,
}

impl ConvexHullNull {
    pub fn new(vertices: Vec<Pmf>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::Config("convex hull null needs at least one vertex".into()))?;
        let m = first.alphabet_size();
        if let Some(bad) = vertices.iter().find(|v| v.alphabet_size() != m) {
            return Err(Error::Dimension {
                expected: m,
                got: bad.alphabet_size(),
            });
        }
        let log_vertices = vertices
            .iter()
            .map(|v| v.probs().iter().map(|p| p.ln()).collect())
            .collect();
        Ok(Self { vertices, log_vertices })
    }

    pub fn singleton(vertex: Pmf) -> Self {
        Self::new(vec![vertex]).expect("one vertex is always a valid hull")
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(Pmf::new).collect::<Result<_>>()?)
    }

    pub fn vertices(&self) -> &[Pmf] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.vertices[0].alphabet_size()
    }

    /// The hull point with the given vertex weights.
    pub fn point(&self, weights: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.alphabet_size()];
        for (v, &w) in self.vertices.iter().zip(weights) {
            for (t, p) in theta.iter_mut().zip(v.probs()) {
                *t += w * p;
            }
        }
        theta
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.alphabet_size() {
            return Err(Error::Dimension {
                expected: self.alphabet_size(),
                got: len,
            });
        }
        Ok(())
    }

    /// `log E_{vertex k}[exp f]`.
    pub fn vertex_log_mgf(&self, k: usize, f: &[f64]) -> f64 {
        log_sum_exp(self.log_vertices[k].iter().zip(f).map(|(lv, fx)| lv + fx))
    }

    /// Worst-case log-MGF over the hull together with the attaining vertex.
    ///
    /// `E_theta[exp f]` is linear in `theta`, so the supremum over the hull is
    /// attained at a vertex and this is exact.
    pub fn psi0_with_vertex(&self, f: &[f64]) -> Result<(f64, usize)> {
        self.check_len(f.len())?;
        if let Some(bad) = f.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("test function value {bad} is not finite")));
        }
        let mut best = (f64::NEG_INFINITY, 0);
        for k in 0..self.num_vertices() {
            let v = self.vertex_log_mgf(k, f);
            if v > best.0 {
                best = (v, k);
            }
        }
        Ok(best)
    }

    pub fn psi0(&self, f: &[f64]) -> Result<f64> {
        Ok(self.psi0_with_vertex(f)?.0)
    }

    /// Maximizes `sum_x c[x] log theta[x]` over the hull.
    ///
    /// `c` must be non-negative with a positive total. `warm` optionally seeds
    /// the vertex weights.
    pub fn fit_weighted(&self, c: &[f64], warm: Option<&[f64]>) -> Result<HullFit> {
        self.check_len(c.len())?;
        let total: f64 = c.iter().sum();
        if !(total > 0.0) || c.iter().any(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::Domain(
                "likelihood weights must be non-negative with positive total".into(),
            ));
        }
        let k = self.num_vertices();
        let uncovered = c
            .iter()
            .enumerate()
            .any(|(x, &cx)| cx > 0.0 && self.vertices.iter().all(|v| v.probs()[x] == 0.0));
        if uncovered {
            return Ok(HullFit {
                value: f64::NEG_INFINITY,
                weights: vec![1.0 / k as f64; k],
                gap: 0.0,
            });
        }
        let norm: Vec<f64> = c.iter().map(|x| x / total).collect();
        let weights = match k {
            1 => vec![1.0],
            2 => self.fit_two_vertices(&norm, warm),
            _ => {
                let start = warm
                    .filter(|w| w.len() == k)
                    .map(|w| w.to_vec())
                    .unwrap_or_else(|| vec![1.0 / k as f64; k]);
                let sol = simplex_maximize(
                    |w, grad| self.normalized_loglik_grad(&norm, w, grad),
                    &start,
                    HULL_FIT_TOL,
                    HULL_FIT_MAX_ITERS,
                );
                sol.weights
            }
        };
        let mut grad = vec![0.0; k];
        self.normalized_loglik_grad(&norm, &weights, &mut grad);
        let gap = frank_wolfe_gap(&grad, &weights).max(0.0) * total;
        let theta = self.point(&weights);
        let value = c
            .iter()
            .zip(&theta)
            .filter(|(cx, _)| **cx > 0.0)
            .map(|(cx, t)| cx * t.ln())
            .sum();
        Ok(HullFit { value, weights, gap })
    }

    /// `theta(w) = w V_0 + (1 - w) V_1`; the log-likelihood is concave in `w`.
    fn fit_two_vertices(&self, c: &[f64], warm: Option<&[f64]>) -> Vec<f64> {
        let v0 = self.vertices[0].probs();
        let v1 = self.vertices[1].probs();
        let terms: Vec<(f64, f64, f64)> = c
            .iter()
            .enumerate()
            .filter(|(_, cx)| **cx > 0.0)
            .map(|(x, &cx)| (cx, v1[x], v0[x] - v1[x]))
            .collect();
        let deriv = |w: f64| {
            let mut g = 0.0;
            let mut h = 0.0;
            for &(cx, a, d) in &terms {
                if d == 0.0 {
                    continue;
                }
                let t = a + w * d;
                g += cx * d / t;
                h -= cx * d * d / (t * t);
            }
            (g, h)
        };
        let w = concave_argmax_1d(deriv, 0.0, 1.0, warm.map(|w| w[0]), 1e-15);
        vec![w, 1.0 - w]
    }

    fn normalized_loglik_grad(&self, c: &[f64], w: &[f64], grad: &mut [f64]) -> f64 {
        let theta = self.point(w);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut value = 0.0;
        for (x, &cx) in c.iter().enumerate() {
            if cx == 0.0 {
                continue;
            }
            value += cx * theta[x].ln();
            for (k, v) in self.vertices.iter().enumerate() {
                grad[k] += cx * v.probs()[x] / theta[x];
            }
        }
        value
    }

    /// Running null maximum likelihood `sup_theta sum_x counts[x] log theta[x]`.
    pub fn mle_loglik(&self, counts: &[u64]) -> Result<HullFit> {
        self.mle_loglik_warm(counts, None)
    }

    pub fn mle_loglik_warm(&self, counts: &[u64], warm: Option<&[f64]>) -> Result<HullFit> {
        let c: Vec<f64> = counts.iter().map(|&x| x as f64).collect();
        self.fit_weighted(&c, warm)
    }

    /// `KL_inf(p, hull) = min_theta KL(p || theta)`.
    pub fn kl_inf(&self, p: &Pmf) -> Result<KlInfResult> {
        let fit = self.fit_weighted(p.probs(), None)?;
        if fit.value == f64::NEG_INFINITY {
            return Ok(KlInfResult {
                gamma_star: f64::INFINITY,
                projection: Projection::HullWeights(fit.weights),
                dual_certificate: None,
            });
        }
        let theta = self.point(&fit.weights);
        Ok(KlInfResult {
            gamma_star: kl_slices(p.probs(), &theta),
            projection: Projection::HullWeights(fit.weights),
            dual_certificate: Some(fit.gap),
        })
    }
}

/// Null of all distributions on `[0, 1]` with mean exactly `mu0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedMeanNull {
    mu0: f64,
}

impl BoundedMeanNull {
    pub fn new(mu0: f64) -> Result<Self> {
        if !(mu0 > 0.0 && mu0 < 1.0) {
            return Err(Error::Config(format!("bounded-mean null needs 0 < mu0 < 1, got {mu0}")));
        }
        Ok(Self { mu0 })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// Widest bet range keeping `1 + phi (x - mu0) >= 0` on `[0, 1]`.
    pub fn full_bet_range(&self) -> (f64, f64) {
        (-1.0 / (1.0 - self.mu0), 1.0 / self.mu0)
    }
}

/// Either kind of null, as configured.
#[derive(Debug, Clone, PartialEq)]
pub enum NullModel {
    ConvexHull(ConvexHullNull),
    BoundedMean(BoundedMeanNull),
}

/// Where the infimum in `KL_inf` is attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Weights on the hull vertices.
    HullWeights(Vec<f64>),
    /// A pmf on the listed atoms of `[0, 1]`.
    Atoms { atoms: Vec<f64>, weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlInfResult {
    /// `f64::INFINITY` when no null element dominates the alternative.
    pub gamma_star: f64,
    pub projection: Projection,
    /// Hull fits report their Frank-Wolfe gap; bounded-mean fits report the
    /// maximizing dual bet.
    pub dual_certificate: Option<f64>,
}

/// `KL_inf` against a bounded-mean null through the one-dimensional dual
/// `sup_phi E_P[log(1 + phi (X - mu0))]`, for alternatives with finite
/// support.
pub fn kl_inf_bounded_mean(
    dist: &BoundedDistSpec,
    null: &BoundedMeanNull,
    phi_range: Option<(f64, f64)>,
) -> Result<KlInfResult> {
    dist.validate()?;
    let support = dist
        .finite_support()
        .ok_or_else(|| Error::Config("KL_inf for a bounded-mean null needs a finite-support alternative".into()))?;
    if support.is_empty() {
        return Err(Error::Config("alternative has empty support".into()));
    }
    let mu0 = null.mu0();
    let (full_lo, full_hi) = null.full_bet_range();
    let (lo, hi) = phi_range.unwrap_or((full_lo, full_hi));
    if lo > hi || lo < full_lo - 1e-15 || hi > full_hi + 1e-15 {
        return Err(Error::Config(format!(
            "phi range [{lo}, {hi}] must lie within [{full_lo}, {full_hi}]"
        )));
    }
    let objective = |phi: f64| -> f64 {
        support
            .iter()
            .map(|&(x, w)| w * (1.0 + phi * (x - mu0)).max(0.0).ln())
            .sum()
    };
    let deriv = |phi: f64| {
        support.iter().fold((0.0, 0.0), |(g, h), &(x, w)| {
            let d = x - mu0;
            let t = 1.0 + phi * d;
            (g + w * d / t, h - w * d * d / (t * t))
        })
    };
    let phi = concave_argmax_1d(deriv, lo, hi, None, 1e-15);
    let value = objective(phi);
    let gamma_star = value.max(0.0);

    // The projection reweights P by 1 / (1 + phi (x - mu0)); at a boundary bet
    // the leftover mass sits on the endpoint where the factor vanishes.
    let mut atoms: Vec<f64> = support.iter().map(|s| s.0).collect();
    let mut weights: Vec<f64> = support.iter().map(|&(x, w)| w / (1.0 + phi * (x - mu0))).collect();
    let leftover = 1.0 - weights.iter().sum::<f64>();
    if leftover > 1e-12 {
        let endpoint = if phi > 0.0 { 0.0 } else { 1.0 };
        match atoms.iter().position(|&a| a == endpoint) {
            Some(i) => weights[i] += leftover,
            None => {
                atoms.push(endpoint);
                weights.push(leftover);
            }
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(KlInfResult {
        gamma_star,
        projection: Projection::Atoms { atoms, weights },
        dual_certificate: Some(phi),
    })
}
