//! Donsker-Varadhan e-processes.
//!
//! `W_n = W_{n-1} exp(f_n(X_n) - psi0(f_n))` where `f_n` is the empirical
//! risk maximizer over `X_1..X_{n-1}`. Also here: the corrected process for
//! an estimated `psi0` and countable mixtures over classes.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::class::{
    erm_bet_tally, erm_log_ratio, psi0_of, BetClass, LogRatioClass, Observation, RealTally, TestFunction,
};
use crate::eprocess::EProcess;
use crate::error::{Error, Result};
use crate::null::{BoundedMeanNull, ConvexHullNull, NullModel};
use crate::prob::{draw_symbol, log_sum_exp, SeededStream};
use crate::saddle::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DvClass {
    Bet(BetClass),
    LogRatio(LogRatioClass),
}

#[derive(Debug, Clone, PartialEq)]
enum Tally {
    Symbols(Vec<u64>),
    Reals(RealTally),
}

/// Counters for fits that did not certify and were skipped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub fits: u64,
    pub solver_failures: u64,
    /// Largest certified gap among accepted log-ratio fits.
    pub max_gap: f64,
}

/// Plain DV e-process with an exactly known `psi0`.
#[derive(Debug, Clone)]
pub struct DvEProcess {
    class: DvClass,
    null: NullModel,
    current: TestFunction,
    current_psi0: f64,
    tally: Tally,
    log_wealth: f64,
    n: u64,
    refit_every: u64,
    solver: SolverConfig,
    warm_weights: Option<Vec<f64>>,
    diagnostics: FitDiagnostics,
}

impl DvEProcess {
    pub fn new(class: DvClass, null: NullModel, solver: SolverConfig, refit_every: u64) -> Result<Self> {
        if refit_every == 0 {
            return Err(Error::Config("refit_every must be at least 1".into()));
        }
        solver.validate()?;
        let (current, tally) = match (&class, &null) {
            (DvClass::Bet(c), NullModel::BoundedMean(b)) => {
                if c.mu0() != b.mu0() {
                    return Err(Error::Config(format!(
                        "bet class mu0 {} differs from null mu0 {}",
                        c.mu0(),
                        b.mu0()
                    )));
                }
                (c.neutral(), Tally::Reals(RealTally::new()))
            }
            (DvClass::LogRatio(c), NullModel::ConvexHull(h)) => {
                if c.alphabet_size() != h.alphabet_size() {
                    return Err(Error::Dimension {
                        expected: h.alphabet_size(),
                        got: c.alphabet_size(),
                    });
                }
                (c.neutral(), Tally::Symbols(vec![0; h.alphabet_size()]))
            }
            _ => {
                return Err(Error::Config(
                    "test function class does not match the null model".into(),
                ))
            }
        };
        let current_psi0 = psi0_of(&current, &null)?;
        Ok(Self {
            class,
            null,
            current,
            current_psi0,
            tally,
            log_wealth: 0.0,
            n: 0,
            refit_every,
            solver,
            warm_weights: None,
            diagnostics: FitDiagnostics::default(),
        })
    }

    pub fn bet(epsilon: f64, mu0: f64) -> Result<Self> {
        Self::new(
            DvClass::Bet(BetClass::new(epsilon, mu0)?),
            NullModel::BoundedMean(BoundedMeanNull::new(mu0)?),
            SolverConfig::default(),
            1,
        )
    }

    pub fn log_ratio(epsilon: f64, null: ConvexHullNull, solver: SolverConfig) -> Result<Self> {
        Self::new(
            DvClass::LogRatio(LogRatioClass::new(epsilon, null.alphabet_size())?),
            NullModel::ConvexHull(null),
            solver,
            1,
        )
    }

    /// The predictable function that will be applied to the next observation.
    pub fn current_function(&self) -> &TestFunction {
        &self.current
    }

    pub fn current_psi0(&self) -> f64 {
        self.current_psi0
    }

    pub fn class(&self) -> &DvClass {
        &self.class
    }

    pub fn null(&self) -> &NullModel {
        &self.null
    }

    pub fn diagnostics(&self) -> FitDiagnostics {
        self.diagnostics
    }

    /// `f_n(x) - psi0(f_n)` for the next observation, without consuming it.
    pub fn increment(&self, x: Observation) -> Result<f64> {
        Ok(self.current.evaluate(x)? - self.current_psi0)
    }

    /// Applies the current function to `x`, then absorbs `x` and refits. The
    /// order matters: `f_n` never sees `X_n`.
    fn advance(&mut self, x: Observation) -> Result<f64> {
        let value = self.current.evaluate(x)?;
        match (&mut self.tally, x) {
            (Tally::Symbols(counts), Observation::Symbol(s)) => counts[s] += 1,
            (Tally::Reals(t), Observation::Real(v)) => t.push(v),
            _ => unreachable!("evaluate rejects mismatched observations"),
        }
        self.n += 1;
        if self.n.is_multiple_of(self.refit_every) {
            self.refit()?;
        }
        Ok(value)
    }

    fn refit(&mut self) -> Result<()> {
        self.diagnostics.fits += 1;
        let fitted = match (&self.class, &self.tally, &self.null) {
            (DvClass::Bet(class), Tally::Reals(tally), _) => {
                let warm = match self.current {
                    TestFunction::Bet { phi, .. } => Some(phi),
                    _ => None,
                };
                erm_bet_tally(class, tally, warm)
            }
            (DvClass::LogRatio(class), Tally::Symbols(counts), NullModel::ConvexHull(hull)) => {
                let tol = self.solver.tol_at(self.n + 1);
                match erm_log_ratio(
                    class,
                    hull,
                    counts,
                    tol,
                    self.solver.max_iters,
                    self.warm_weights.as_deref(),
                ) {
                    Ok(fit) => {
                        self.diagnostics.max_gap = self.diagnostics.max_gap.max(fit.solution.gap);
                        self.warm_weights = Some(fit.solution.theta_weights);
                        Ok(fit.function)
                    }
                    Err(e) => Err(e),
                }
            }
            _ => unreachable!("class, tally and null are matched at construction"),
        };
        match fitted {
            Ok(f) => {
                self.current_psi0 = psi0_of(&f, &self.null)?;
                self.current = f;
                Ok(())
            }
            // Keeping the previous function is still predictable.
            Err(Error::SolverFailure { .. }) => {
                self.diagnostics.solver_failures += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }
}

impl EProcess for DvEProcess {
    fn step(&mut self, x: Observation) -> Result<f64> {
        let psi0 = self.current_psi0;
        let value = self.advance(x)?;
        self.log_wealth += value - psi0;
        Ok(self.log_wealth)
    }

    fn log_wealth(&self) -> f64 {
        self.log_wealth
    }

    fn steps(&self) -> u64 {
        self.n
    }
}

/// `eta_n = scale / n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaSchedule {
    pub scale: f64,
    pub exponent: f64,
}

impl EtaSchedule {
    pub const ZERO: Self = Self {
        scale: 0.0,
        exponent: 2.0,
    };

    /// Requires `eta_n` in `[0, 1)` and a summable `sum_n eta_n B` for a
    /// constant bound `B`, which holds iff `scale = 0` or `exponent > 1`.
    pub fn validate(&self) -> Result<()> {
        if !(self.scale >= 0.0 && self.scale < 1.0) {
            return Err(Error::Config(format!(
                "eta scale must lie in [0, 1), got {}",
                self.scale
            )));
        }
        if self.scale > 0.0 && !(self.exponent > 1.0) {
            return Err(Error::Config(format!(
                "eta exponent must exceed 1 for a summable correction, got {}",
                self.exponent
            )));
        }
        Ok(())
    }

    pub fn at(&self, n: u64) -> f64 {
        self.scale / (n.max(1) as f64).powf(self.exponent)
    }

    /// Upper bound on `sum_{n>=1} eta_n`: `scale * (1 + 1/(exponent - 1))`.
    pub fn total_bound(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * (1.0 + 1.0 / (self.exponent - 1.0))
        }
    }
}

/// Hoeffding upper-confidence estimate of `psi0(f)` from samples of each
/// hull vertex. Exceeds the true value with probability at least `1 - eta`.
#[derive(Debug, Clone)]
pub struct MonteCarloPsi {
    samples: usize,
    rng: ChaCha8Rng,
}

impl MonteCarloPsi {
    pub fn new(samples: usize, stream: SeededStream) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Config("psi estimator needs at least one sample".into()));
        }
        Ok(Self {
            samples,
            rng: stream.rng(),
        })
    }

    pub fn estimate(&mut self, f: &[f64], hull: &ConvexHullNull, eta: f64) -> Result<f64> {
        if eta <= 0.0 {
            return hull.psi0(f);
        }
        let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = f.iter().copied().fold(f64::INFINITY, f64::min);
        let range = max.exp() - min.exp();
        let k = hull.num_vertices() as f64;
        let margin = range * ((k / eta).ln() / (2.0 * self.samples as f64)).sqrt();
        let mut best = f64::NEG_INFINITY;
        for v in hull.vertices() {
            let mean = (0..self.samples)
                .map(|_| f[draw_symbol(v, &mut self.rng)].exp())
                .sum::<f64>()
                / self.samples as f64;
            best = best.max((mean + margin).min(max.exp()).ln());
        }
        Ok(best)
    }
}

/// `W~_n = W~_{n-1} exp(f_n(X_n) - psi_hat_n) / (1 + eta_n B_n)`: a test
/// supermartingale whenever `psi_hat_n >= psi0(f_n)` with conditional
/// probability at least `1 - eta_n` and `exp(f_n - psi_hat_n) <= B_n`.
#[derive(Debug, Clone)]
pub struct CorrectedEProcess {
    inner: DvEProcess,
    eta: EtaSchedule,
    bound: f64,
    estimator: Option<MonteCarloPsi>,
    log_wealth: f64,
}

impl CorrectedEProcess {
    /// `bound` is the constant `B_n`. With an estimator the process runs on
    /// its own through [`EProcess::step`]; without one, drive it with
    /// [`CorrectedEProcess::corrected_step`].
    pub fn new(inner: DvEProcess, eta: EtaSchedule, bound: f64, estimator: Option<MonteCarloPsi>) -> Result<Self> {
        eta.validate()?;
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::Config(format!(
                "bound B must be positive and finite, got {bound}"
            )));
        }
        if estimator.is_some() && !matches!(inner.class, DvClass::LogRatio(_)) {
            return Err(Error::Config(
                "the Monte Carlo psi estimator needs the log-ratio class".into(),
            ));
        }
        if inner.steps() > 0 {
            return Err(Error::Config("corrected process must start before any data".into()));
        }
        Ok(Self {
            inner,
            eta,
            bound,
            estimator,
            log_wealth: 0.0,
        })
    }

    /// `B = 1/eps^2` bounds `exp(f - psi_hat)` for log-ratio members whenever
    /// `psi_hat` lies between `min f` and `max f`, which the estimator ensures.
    pub fn log_ratio_bound(epsilon: f64) -> f64 {
        1.0 / (epsilon * epsilon)
    }

    pub fn inner(&self) -> &DvEProcess {
        &self.inner
    }

    /// Wealth of the same path with the exact `psi0` and no correction.
    pub fn uncorrected_log_wealth(&self) -> f64 {
        self.inner.log_wealth()
    }

    pub fn eta(&self) -> EtaSchedule {
        self.eta
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// One corrected step with an externally supplied `psi_hat`, `eta_n` and
    /// `B_n`. Fails before touching any state if `exp(sup f - psi_hat)`
    /// exceeds `B_n`.
    pub fn corrected_step(&mut self, x: Observation, psi_hat: f64, eta: f64, bound: f64) -> Result<f64> {
        if !(eta >= 0.0) {
            return Err(Error::Config(format!("eta must be non-negative, got {eta}")));
        }
        let sup = self.inner.current.sup_value();
        if sup - psi_hat > bound.ln() + 1e-12 {
            return Err(Error::Config(format!(
                "exp(f - psi_hat) can reach {:.6e}, above the bound {bound:.6e}",
                (sup - psi_hat).exp()
            )));
        }
        let increment = corrected_increment(self.inner.current.evaluate(x)?, psi_hat, eta, bound);
        self.inner.step(x)?;
        self.log_wealth += increment;
        Ok(self.log_wealth)
    }

    /// The `psi_hat` the built-in estimator would use for the next round.
    pub fn next_psi_hat(&mut self) -> Result<f64> {
        let eta = self.eta.at(self.inner.steps() + 1);
        match (&mut self.estimator, &self.inner.current, &self.inner.null) {
            (Some(est), TestFunction::LogRatio(g), NullModel::ConvexHull(hull)) => est.estimate(g.log_phi(), hull, eta),
            _ => Ok(self.inner.current_psi0),
        }
    }
}

/// `f(x) - psi_hat - log(1 + eta B)`.
pub fn corrected_increment(fx: f64, psi_hat: f64, eta: f64, bound: f64) -> f64 {
    fx - psi_hat - (eta * bound).ln_1p()
}

impl EProcess for CorrectedEProcess {
    fn step(&mut self, x: Observation) -> Result<f64> {
        let eta = self.eta.at(self.inner.steps() + 1);
        let psi_hat = self.next_psi_hat()?;
        self.corrected_step(x, psi_hat, eta, self.bound)
    }

    fn log_wealth(&self) -> f64 {
        self.log_wealth
    }

    fn steps(&self) -> u64 {
        self.inner.steps()
    }
}

/// `c_j = 6 / (pi^2 (j+1)^2)`; these sum to one over `j >= 0`.
pub fn mixture_weight(j: usize) -> f64 {
    6.0 / (PI * PI * ((j + 1) * (j + 1)) as f64)
}

/// `W_n = sum_j c_j W_n^j` over finitely many components. The weights of the
/// dropped tail are not redistributed, so the total weight stays below one.
#[derive(Debug, Clone)]
pub struct MixtureEProcess {
    components: Vec<DvEProcess>,
    log_weights: Vec<f64>,
    log_wealth: f64,
    n: u64,
}

impl MixtureEProcess {
    /// Component `j` gets weight [`mixture_weight`]`(j)`.
    pub fn new(components: Vec<DvEProcess>) -> Result<Self> {
        let weights = (0..components.len()).map(mixture_weight).collect();
        Self::with_weights(components, weights)
    }

    pub fn with_weights(components: Vec<DvEProcess>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("mixture needs at least one component".into()));
        }
        if components.len() != weights.len() {
            return Err(Error::Dimension {
                expected: components.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(*w > 0.0)) || weights.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::Config(
                "mixture weights must be positive with total at most 1".into(),
            ));
        }
        let log_weights: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
        let log_wealth = log_sum_exp(log_weights.iter().copied());
        Ok(Self {
            components,
            log_weights,
            log_wealth,
            n: 0,
        })
    }

    /// Bet classes with `eps_j = 2^-(j+1)`, `j < components`, widening toward
    /// the full bet range.
    pub fn bet_ladder(mu0: f64, components: usize) -> Result<Self> {
        let parts = (0..components)
            .map(|j| DvEProcess::bet(0.5f64.powi(j as i32 + 1), mu0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    /// Log-ratio classes with `eps_j = 2^-(j+1)` against a hull null.
    pub fn log_ratio_ladder(null: &ConvexHullNull, components: usize, solver: SolverConfig) -> Result<Self> {
        let parts = (0..components)
            .map(|j| DvEProcess::log_ratio(0.5f64.powi(j as i32 + 1), null.clone(), solver))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn components(&self) -> &[DvEProcess] {
        &self.components
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }
}

impl EProcess for MixtureEProcess {
    fn step(&mut self, x: Observation) -> Result<f64> {
        // Validate against every component before mutating any of them.
        for c in &self.components {
            c.increment(x)?;
        }
        for c in &mut self.components {
            c.step(x)?;
        }
        self.n += 1;
        self.log_wealth = log_sum_exp(
            self.components
                .iter()
                .zip(&self.log_weights)
                .map(|(c, lw)| lw + c.log_wealth()),
        );
        Ok(self.log_wealth)
    }

    fn log_wealth(&self) -> f64 {
        self.log_wealth
    }

    fn steps(&self) -> u64 {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Pmf;
    use approx::assert_abs_diff_eq;

    fn real(x: f64) -> Observation {
        Observation::Real(x)
    }

    #[test]
    fn first_bet_step_is_neutral() {
        for x in [0.0, 0.3, 1.0] {
            let mut p = DvEProcess::bet(0.2, 0.5).unwrap();
            assert_eq!(p.step(real(x)).unwrap(), 0.0);
        }
    }

    #[test]
    fn bet_step_after_fit() {
        let mut p = DvEProcess::bet(0.2, 0.5).unwrap();
        for x in [1.0, 1.0, 0.0] {
            p.step(real(x)).unwrap();
        }
        let before = p.log_wealth();
        let after = p.step(real(1.0)).unwrap();
        assert_abs_diff_eq!(after - before, (4.0f64 / 3.0).ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(after - before, 0.287682, epsilon = 1e-6);
    }

    #[test]
    fn log_ratio_step_after_skewed_counts() {
        let null = ConvexHullNull::singleton(Pmf::new(vec![0.5, 0.5]).unwrap());
        let mut p = DvEProcess::log_ratio(0.5, null, SolverConfig::default()).unwrap();
        for _ in 0..10 {
            p.step(Observation::Symbol(0)).unwrap();
        }
        let inc = p.increment(Observation::Symbol(0)).unwrap();
        assert_abs_diff_eq!(inc, 2.0f64.ln() - 1.25f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(inc, 0.470004, epsilon = 1e-6);
    }

    #[test]
    fn mismatched_pairs_are_rejected() {
        let hull = NullModel::ConvexHull(ConvexHullNull::singleton(Pmf::uniform(2).unwrap()));
        let bet = DvClass::Bet(BetClass::new(0.2, 0.5).unwrap());
        assert!(DvEProcess::new(bet, hull, SolverConfig::default(), 1).is_err());
        let bm = NullModel::BoundedMean(BoundedMeanNull::new(0.4).unwrap());
        assert!(DvEProcess::new(bet, bm, SolverConfig::default(), 1).is_err());
    }

    #[test]
    fn domain_errors_leave_state_untouched() {
        let mut p = DvEProcess::bet(0.2, 0.5).unwrap();
        p.step(real(1.0)).unwrap();
        assert!(p.step(Observation::Symbol(1)).is_err());
        assert!(p.step(real(2.0)).is_err());
        assert_eq!(p.steps(), 1);
    }

    #[test]
    fn refit_cadence_holds_function_between_fits() {
        let null = BoundedMeanNull::new(0.5).unwrap();
        let class = BetClass::new(0.2, 0.5).unwrap();
        let mut p = DvEProcess::new(
            DvClass::Bet(class),
            NullModel::BoundedMean(null),
            SolverConfig::default(),
            3,
        )
        .unwrap();
        p.step(real(1.0)).unwrap();
        p.step(real(1.0)).unwrap();
        assert_eq!(p.current_function(), &class.neutral());
        p.step(real(1.0)).unwrap();
        assert_ne!(p.current_function(), &class.neutral());
    }

    #[test]
    fn corrected_increment_examples() {
        assert_eq!(corrected_increment(0.4, 0.1, 0.0, 10.0), 0.4 - 0.1);
        assert_abs_diff_eq!(
            0.4 - 0.1 - corrected_increment(0.4, 0.1, 0.01, 10.0),
            1.1f64.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(1.1f64.ln(), 0.095310, epsilon = 1e-6);
    }

    #[test]
    fn corrected_step_checks_bound() {
        let null = ConvexHullNull::singleton(Pmf::new(vec![0.5, 0.5]).unwrap());
        let inner = DvEProcess::log_ratio(0.5, null, SolverConfig::default()).unwrap();
        let mut p = CorrectedEProcess::new(inner, EtaSchedule::ZERO, 4.0, None).unwrap();
        for _ in 0..5 {
            p.corrected_step(Observation::Symbol(0), p.inner().current_psi0(), 0.0, 4.0)
                .unwrap();
        }
        // phi = (2, 0.5) now, so sup f - psi_hat = log 2 + 10 exceeds log 4.
        let err = p.corrected_step(Observation::Symbol(0), -10.0, 0.0, 4.0);
        assert!(matches!(err, Err(Error::Config(_))));
        assert_eq!(p.steps(), 5);
    }

    #[test]
    fn eta_schedule_validation() {
        assert!(EtaSchedule {
            scale: 0.5,
            exponent: 1.0
        }
        .validate()
        .is_err());
        assert!(EtaSchedule {
            scale: 1.0,
            exponent: 2.0
        }
        .validate()
        .is_err());
        assert!(EtaSchedule {
            scale: 0.0,
            exponent: 0.5
        }
        .validate()
        .is_ok());
        let eta = EtaSchedule {
            scale: 0.5,
            exponent: 2.0,
        };
        assert_eq!(eta.at(10), 0.005);
        let partial: f64 = (1..100_000).map(|n| eta.at(n)).sum();
        assert!(partial <= eta.total_bound());
    }

    #[test]
    fn monte_carlo_psi_is_conservative_on_average() {
        let hull = ConvexHullNull::from_rows(vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.3, 0.5]]).unwrap();
        let f = [0.7f64.ln(), 1.2f64.ln(), 1.5f64.ln()];
        let exact = hull.psi0(&f).unwrap();
        let mut est = MonteCarloPsi::new(500, SeededStream::new(5, 0)).unwrap();
        let trials = 2000;
        let below = (0..trials)
            .filter(|_| est.estimate(&f, &hull, 0.05).unwrap() < exact)
            .count();
        assert!((below as f64) / (trials as f64) <= 0.05);
        assert_eq!(est.estimate(&f, &hull, 0.0).unwrap(), exact);
    }

    #[test]
    fn mixture_examples() {
        let c0 = mixture_weight(0);
        assert_abs_diff_eq!(c0, 0.607927, epsilon = 1e-6);

        let mut single = MixtureEProcess::new(vec![DvEProcess::bet(0.2, 0.5).unwrap()]).unwrap();
        let mut alone = DvEProcess::bet(0.2, 0.5).unwrap();
        for x in [1.0, 0.0, 1.0, 1.0, 0.7] {
            let mix = single.step(real(x)).unwrap();
            let comp = alone.step(real(x)).unwrap();
            assert_abs_diff_eq!(mix, c0.ln() + comp, epsilon = 1e-12);
        }

        let parts: Vec<_> = (0..3).map(|_| DvEProcess::bet(0.2, 0.5).unwrap()).collect();
        let mut equal = MixtureEProcess::new(parts).unwrap();
        let mut alone = DvEProcess::bet(0.2, 0.5).unwrap();
        let total: f64 = (0..3).map(mixture_weight).sum();
        for x in [1.0, 0.0, 1.0, 1.0, 0.9] {
            let mix = equal.step(real(x)).unwrap();
            let comp = alone.step(real(x)).unwrap();
            assert_abs_diff_eq!(mix, total.ln() + comp, epsilon = 1e-12);
        }
    }

    #[test]
    fn mixture_dominates_each_weighted_component() {
        let mut mix = MixtureEProcess::bet_ladder(0.5, 8).unwrap();
        assert!(mix.weights().iter().sum::<f64>() < 1.0);
        let weights = mix.weights();
        for x in [1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.2, 1.0] {
            let lw = mix.step(real(x)).unwrap();
            for (c, w) in mix.components().iter().zip(&weights) {
                assert!(lw >= w.ln() + c.log_wealth() - 1e-12);
            }
        }
    }
}
