//! Test-function classes and their empirical risk maximizers.
//!
//! Two classes are supported:
//! * log-ratio functions `x -> log phi[x]` with `phi in [eps, 1/eps]^m` on a
//!   finite alphabet, paired with a convex-hull null;
//! * bets `x -> log(1 + phi (x - mu0))` on `[0, 1]` with
//!   `phi in [-(1-eps)/(1-mu0), (1-eps)/mu0]`, paired with a bounded-mean null.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::null::{BoundedMeanNull, ConvexHullNull, NullModel};
use crate::optim::concave_argmax_1d;
use crate::saddle::{self, SaddleProblem, SaddleSolution};

/// A single observation: a symbol index or a real in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Symbol(usize),
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRatioClass {
    epsilon: f64,
    m: usize,
}

impl LogRatioClass {
    pub fn new(epsilon: f64, m: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if m < 2 {
            return Err(Error::Config(format!("alphabet size must be at least 2, got {m}")));
        }
        Ok(Self { epsilon, m })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    /// `log(1/eps)`, the sup-norm bound on every member.
    pub fn value_bound(&self) -> f64 {
        (1.0 / self.epsilon).ln()
    }

    /// The member with `phi` clamped into the class box.
    pub fn member(&self, phi: &[f64]) -> Result<TestFunction> {
        if phi.len() != self.m {
            return Err(Error::Dimension {
                expected: self.m,
                got: phi.len(),
            });
        }
        let phi: Vec<f64> = phi.iter().map(|p| p.clamp(self.epsilon, 1.0 / self.epsilon)).collect();
        Ok(TestFunction::LogRatio(LogRatioFn::new(phi)))
    }

    /// `phi = 1`, the zero function.
    pub fn neutral(&self) -> TestFunction {
        TestFunction::LogRatio(LogRatioFn::new(vec![1.0; self.m]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetClass {
    epsilon: f64,
    mu0: f64,
}

impl BetClass {
    pub fn new(epsilon: f64, mu0: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        BoundedMeanNull::new(mu0)?;
        Ok(Self { epsilon, mu0 })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// `[-(1-eps)/(1-mu0), (1-eps)/mu0]`.
    pub fn phi_range(&self) -> (f64, f64) {
        (
            -(1.0 - self.epsilon) / (1.0 - self.mu0),
            (1.0 - self.epsilon) / self.mu0,
        )
    }

    pub fn member(&self, phi: f64) -> TestFunction {
        let (lo, hi) = self.phi_range();
        TestFunction::Bet {
            phi: phi.clamp(lo, hi),
            mu0: self.mu0,
        }
    }

    pub fn neutral(&self) -> TestFunction {
        self.member(0.0)
    }

    /// Largest value of `log(1 + phi (x - mu0))` over the class and `[0, 1]`.
    pub fn value_upper_bound(&self) -> f64 {
        let (lo, hi) = self.phi_range();
        let a = (1.0 + hi * (1.0 - self.mu0)).ln();
        let b = (1.0 - lo * self.mu0).ln();
        a.max(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRatioFn {
    phi: Vec<f64>,
    log_phi: Vec<f64>,
}

impl LogRatioFn {
    fn new(phi: Vec<f64>) -> Self {
        let log_phi = phi.iter().map(|p| p.ln()).collect();
        Self { phi, log_phi }
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn log_phi(&self) -> &[f64] {
        &self.log_phi
    }
}

/// A member of one of the two classes.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    LogRatio(LogRatioFn),
    Bet { phi: f64, mu0: f64 },
}

impl TestFunction {
    /// `f(x)`: `log phi[x]` or `log(1 + phi (x - mu0))`.
    pub fn evaluate(&self, x: Observation) -> Result<f64> {
        match (self, x) {
            (TestFunction::LogRatio(f), Observation::Symbol(s)) => f
                .log_phi
                .get(s)
                .copied()
                .ok_or_else(|| Error::Domain(format!("symbol {s} outside alphabet of size {}", f.phi.len()))),
            (TestFunction::Bet { phi, mu0 }, Observation::Real(v)) => {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Domain(format!("observation {v} outside [0, 1]")));
                }
                Ok((1.0 + phi * (v - mu0)).ln())
            }
            (TestFunction::LogRatio(_), Observation::Real(v)) => Err(Error::Domain(format!(
                "log-ratio function needs a symbol, got real {v}"
            ))),
            (TestFunction::Bet { .. }, Observation::Symbol(s)) => Err(Error::Domain(format!(
                "bet function needs a real in [0, 1], got symbol {s}"
            ))),
        }
    }

    /// Largest value of `f` over its domain.
    pub fn sup_value(&self) -> f64 {
        match self {
            TestFunction::LogRatio(f) => f.log_phi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            TestFunction::Bet { phi, mu0 } => (1.0 + phi * (1.0 - mu0)).max(1.0 - phi * mu0).ln(),
        }
    }
}

/// `psi0(f)` for a compatible (function, null) pair. Bets have `psi0 = 0`
/// in closed form because `E_Q[1 + phi (X - mu0)] = 1` under every null `Q`.
pub fn psi0_of(f: &TestFunction, null: &NullModel) -> Result<f64> {
    match (f, null) {
        (TestFunction::Bet { .. }, NullModel::BoundedMean(_)) => Ok(0.0),
        (TestFunction::LogRatio(g), NullModel::ConvexHull(hull)) => hull.psi0(&g.log_phi),
        _ => Err(Error::Config(
            "test function class does not match the null model".into(),
        )),
    }
}

/// Multiset of real observations, kept as `(value, count)` pairs keyed by the
/// exact bit pattern. Finite-support data compresses to one entry per atom;
/// continuous data degenerates to the full sample.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RealTally {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl RealTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        *self.counts.entry(x.to_bits()).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.counts.iter().map(|(&bits, &c)| (f64::from_bits(bits), c))
    }
}

impl FromIterator<f64> for RealTally {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut tally = Self::new();
        for x in iter {
            tally.push(x);
        }
        tally
    }
}

/// Empirical log-wealth `sum_i log(1 + phi (x_i - mu0)) / n` of a bet.
pub fn bet_objective(class: &BetClass, tally: &RealTally, phi: f64) -> f64 {
    let n = tally.len() as f64;
    tally
        .iter()
        .map(|(x, c)| c as f64 * (1.0 + phi * (x - class.mu0)).ln())
        .sum::<f64>()
        / n
}

/// GRAPA bet: the maximizer of the empirical log-wealth over the class range.
pub fn erm_bet(class: &BetClass, observations: &[f64]) -> Result<TestFunction> {
    let tally: RealTally = observations.iter().copied().collect();
    erm_bet_tally(class, &tally, None)
}

pub fn erm_bet_tally(class: &BetClass, tally: &RealTally, warm: Option<f64>) -> Result<TestFunction> {
    if tally.is_empty() {
        return Err(Error::Domain(
            "ERM needs at least one observation; use the neutral bet".into(),
        ));
    }
    let terms: Vec<(f64, f64)> = tally
        .iter()
        .map(|(x, c)| (c as f64, x - class.mu0))
        .filter(|(_, d)| *d != 0.0)
        .collect();
    if terms.is_empty() {
        return Ok(class.neutral());
    }
    let (lo, hi) = class.phi_range();
    let deriv = |phi: f64| {
        let mut g = 0.0;
        let mut h = 0.0;
        for &(c, d) in &terms {
            let t = 1.0 + phi * d;
            g += c * d / t;
            h -= c * d * d / (t * t);
        }
        (g, h)
    };
    let phi = concave_argmax_1d(deriv, lo, hi, warm, 1e-14);
    Ok(class.member(phi))
}

/// Result of the log-ratio ERM, carrying the solver certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRatioFit {
    pub function: TestFunction,
    pub solution: SaddleSolution,
}

/// Log-ratio ERM: solves `max_phi min_theta J(phi, theta)` to the requested
/// certified gap.
pub fn erm_log_ratio(
    class: &LogRatioClass,
    null: &ConvexHullNull,
    counts: &[u64],
    gap_tol: f64,
    max_iters: usize,
    warm_weights: Option<&[f64]>,
) -> Result<LogRatioFit> {
    if null.alphabet_size() != class.m {
        return Err(Error::Dimension {
            expected: class.m,
            got: null.alphabet_size(),
        });
    }
    let problem = SaddleProblem::new(counts, null, class.epsilon)?;
    let solution = saddle::solve_warm(&problem, gap_tol, max_iters, warm_weights)?;
    let function = class.member(&solution.phi)?;
    Ok(LogRatioFit { function, solution })
}
