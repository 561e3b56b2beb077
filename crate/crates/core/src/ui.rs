//! Universal-inference e-process on a finite alphabet: the Krichevsky-Trofimov
//! (add-1/2) mixture likelihood divided by the running null maximum
//! likelihood.

use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::class::Observation;
use crate::eprocess::EProcess;
use crate::error::{Error, Result};
use crate::null::ConvexHullNull;
use crate::prob::{draw_symbol, Pmf, SeededStream};

/// Sequential state of the KT mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct KtState {
    counts: Vec<u64>,
    n: u64,
    log_mix: f64,
}

impl KtState {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(format!("alphabet size must be at least 2, got {m}")));
        }
        Ok(Self {
            counts: vec![0; m],
            n: 0,
            log_mix: 0.0,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `log` of the KT mixture probability of the sequence so far.
    pub fn log_mix(&self) -> f64 {
        self.log_mix
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// `(1/2 + counts[x]) / (m/2 + n)`.
    pub fn predict(&self, x: usize) -> Result<f64> {
        let c = self
            .counts
            .get(x)
            .ok_or_else(|| Error::Domain(format!("symbol {x} outside alphabet of size {}", self.counts.len())))?;
        Ok((0.5 + *c as f64) / (0.5 * self.counts.len() as f64 + self.n as f64))
    }

    /// Absorbs `x`; returns the log predictive probability it was assigned.
    pub fn observe(&mut self, x: usize) -> Result<f64> {
        let lp = self.predict(x)?.ln();
        self.counts[x] += 1;
        self.n += 1;
        self.log_mix += lp;
        Ok(lp)
    }
}

/// KT log mixture probability of any sequence with these counts, via the
/// add-1/2 product (it depends on the counts only).
pub fn kt_log_mixture(counts: &[u64]) -> f64 {
    let m = counts.len() as f64;
    let n: u64 = counts.iter().sum();
    let numerator: f64 = counts
        .iter()
        .map(|&c| (0..c).map(|j| (0.5 + j as f64).ln()).sum::<f64>())
        .sum();
    let denominator: f64 = (0..n).map(|i| (0.5 * m + i as f64).ln()).sum();
    numerator - denominator
}

/// Realized regret `sup_theta log theta^n[x^n] - log KT(x^n)`, where the
/// unrestricted maximum likelihood is attained at the empirical pmf.
pub fn kt_regret(counts: &[u64]) -> Result<f64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::Domain("regret needs at least one observation".into()));
    }
    Ok(max_loglik(counts, n) - kt_log_mixture(counts))
}

fn max_loglik(counts: &[u64], n: u64) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (c as f64 / n).ln())
        .sum()
}

/// `W_n = KT(X^n) / sup_{theta in hull} theta^n(X^n)`, tracked in log space.
#[derive(Debug, Clone)]
pub struct UiEProcess {
    kt: KtState,
    null: ConvexHullNull,
    weights: Vec<f64>,
    log_wealth: f64,
    history: Vec<f64>,
}

impl UiEProcess {
    pub fn new(null: ConvexHullNull) -> Self {
        let m = null.alphabet_size();
        let k = null.num_vertices();
        Self {
            kt: KtState::new(m).expect("pmfs have at least two symbols"),
            null,
            weights: vec![1.0 / k as f64; k],
            log_wealth: 0.0,
            history: Vec::new(),
        }
    }

    /// Absorbs one symbol and returns `log W_n`; `+inf` once the null gives
    /// the data probability zero.
    pub fn update(&mut self, x: usize) -> Result<f64> {
        self.kt.observe(x)?;
        let fit = self.null.mle_loglik_warm(self.kt.counts(), Some(&self.weights))?;
        self.weights = fit.weights;
        self.log_wealth = if fit.value == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            self.kt.log_mix() - fit.value
        };
        self.history.push(self.log_wealth);
        Ok(self.log_wealth)
    }

    pub fn kt(&self) -> &KtState {
        &self.kt
    }

    pub fn null(&self) -> &ConvexHullNull {
        &self.null
    }

    /// Hull weights of the current null maximum-likelihood point.
    pub fn null_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }
}

impl EProcess for UiEProcess {
    fn step(&mut self, x: Observation) -> Result<f64> {
        match x {
            Observation::Symbol(s) => self.update(s),
            Observation::Real(v) => Err(Error::Domain(format!(
                "universal-inference process needs a symbol, got real {v}"
            ))),
        }
    }

    fn log_wealth(&self) -> f64 {
        self.log_wealth
    }

    fn steps(&self) -> u64 {
        self.kt.n()
    }
}

/// Summary of a regret sweep over random sequences for one alphabet size.
#[derive(Debug, Clone, Serialize)]
pub struct RegretSweep {
    pub m: usize,
    pub horizon: u64,
    pub sequences: usize,
    /// Largest realized regret seen at any prefix of any sequence.
    pub max_regret: f64,
    /// Largest `regret - ((m-1)/2 log n + m)`; non-positive when the envelope
    /// holds everywhere.
    pub max_excess: f64,
    /// Prefix length where `max_excess` occurred.
    pub worst_n: u64,
}

/// Realized KT regret at every prefix of `sequences` random sequences of
/// length `horizon` over `m` symbols, against the envelope
/// `(m-1)/2 log n + m`.
///
/// The first `m` sequences are constant (the worst case for KT), the rest are
/// i.i.d. from pmfs drawn uniformly on the simplex.
pub fn regret_sweep(m: usize, horizon: u64, sequences: usize, seed: u64) -> Result<RegretSweep> {
    if m < 2 || horizon == 0 {
        return Err(Error::Config("regret sweep needs m >= 2 and n >= 1".into()));
    }
    let mut max_regret = f64::NEG_INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst_n = 0;
    let unit_gamma = Gamma::new(1.0, 1.0).expect("valid gamma parameters");
    for s in 0..sequences {
        let mut rng = SeededStream::new(seed, s as u64).rng();
        let pmf = if s < m {
            Pmf::point_mass(m, s)?
        } else {
            let raw: Vec<f64> = (0..m).map(|_| unit_gamma.sample(&mut rng)).collect();
            let total: f64 = raw.iter().sum();
            Pmf::new(raw.iter().map(|x| x / total).collect())?
        };
        let mut kt = KtState::new(m)?;
        for n in 1..=horizon {
            let x = if s < m { s } else { draw_symbol(&pmf, &mut rng) };
            kt.observe(x)?;
            let regret = max_loglik(kt.counts(), n) - kt.log_mix();
            let excess = regret - (0.5 * (m as f64 - 1.0) * (n as f64).ln() + m as f64);
            max_regret = max_regret.max(regret);
            if excess > max_excess {
                max_excess = excess;
                worst_n = n;
            }
        }
    }
    Ok(RegretSweep {
        m,
        horizon,
        sequences,
        max_regret,
        max_excess,
        worst_n,
    })
}
