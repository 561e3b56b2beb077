//! Experiment configuration and the process factory.

use std::path::{Path, PathBuf};

use rand::Rng;

use serde::{Deserialize, Serialize};

use crate::class::{BetClass, LogRatioClass, Observation};
use crate::dv::{CorrectedEProcess, DvClass, DvEProcess, EtaSchedule, MixtureEProcess, MonteCarloPsi};
use crate::eprocess::EProcess;
use crate::error::{Error, Result};
use crate::null::{kl_inf_bounded_mean, BoundedMeanNull, ConvexHullNull, NullModel};
use crate::prob::{draw_symbol, BoundedDistSpec, BoundedSampler, Pmf, SeededStream};
use crate::saddle::SolverConfig;
use crate::ui::UiEProcess;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ui,
    DvBet,
    DvLogRatio,
    DvMixture,
    DvCorrected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NullSpec {
    ConvexHull { vertices: Vec<Pmf> },
    BoundedMean { mu0: f64 },
}

impl NullSpec {
    pub fn build(&self) -> Result<NullModel> {
        Ok(match self {
            NullSpec::ConvexHull { vertices } => NullModel::ConvexHull(ConvexHullNull::new(vertices.clone())?),
            NullSpec::BoundedMean { mu0 } => NullModel::BoundedMean(BoundedMeanNull::new(*mu0)?),
        })
    }
}

/// Data-generating distribution for simulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Categorical { probs: Pmf },
    Bernoulli { p: f64 },
    Beta { a: f64, b: f64 },
    Discrete { atoms: Vec<f64>, weights: Vec<f64> },
}

impl DataSpec {
    pub fn bounded(&self) -> Option<BoundedDistSpec> {
        match self {
            DataSpec::Categorical { .. } => None,
            DataSpec::Bernoulli { p } => Some(BoundedDistSpec::Bernoulli { p: *p }),
            DataSpec::Beta { a, b } => Some(BoundedDistSpec::Beta { a: *a, b: *b }),
            DataSpec::Discrete { atoms, weights } => Some(BoundedDistSpec::Discrete {
                atoms: atoms.clone(),
                weights: weights.clone(),
            }),
        }
    }

    pub fn source(&self) -> Result<DataSource> {
        Ok(match self {
            DataSpec::Categorical { probs } => DataSource::Symbols(probs.clone()),
            other => DataSource::Reals(other.bounded().expect("non-categorical").sampler()?),
        })
    }
}

/// A sampler that yields observations of the right kind.
#[derive(Debug, Clone)]
pub enum DataSource {
    Symbols(Pmf),
    Reals(BoundedSampler),
}

impl DataSource {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Observation {
        match self {
            DataSource::Symbols(p) => Observation::Symbol(draw_symbol(p, rng)),
            DataSource::Reals(s) => Observation::Real(s.draw(rng)),
        }
    }
}

/// Settings of the estimated-`psi0` process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectionSpec {
    pub eta: EtaSchedule,
    /// Monte Carlo draws per hull vertex for each estimate.
    pub samples: usize,
}

impl Default for CorrectionSpec {
    fn default() -> Self {
        Self {
            eta: EtaSchedule {
                scale: 0.5,
                exponent: 2.0,
            },
            samples: 1000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub report: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: Method,
    pub null: NullSpec,
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default = "default_alpha_grid")]
    pub alpha_grid: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Defaults to `50 J(alpha_min)` when `gamma*` is known, else 100000.
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_refit_every")]
    pub refit_every: u64,
    #[serde(default = "default_mixture_components")]
    pub mixture_components: usize,
    #[serde(default)]
    pub correction: CorrectionSpec,
    /// Worker threads; defaults to the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_alpha_grid() -> Vec<f64> {
    vec![0.05]
}

fn default_replications() -> usize {
    1
}

fn default_epsilon() -> f64 {
    0.2
}

fn default_refit_every() -> u64 {
    1
}

fn default_mixture_components() -> usize {
    8
}

pub const DEFAULT_HORIZON: u64 = 100_000;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::Config("alpha_grid is empty".into()));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::Config(format!("alpha {a} is outside (0, 1)")));
        }
        if self.alpha_grid.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config("alpha_grid must be strictly descending".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.horizon == Some(0) {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.mixture_components == 0 {
            return Err(Error::Config("mixture_components must be at least 1".into()));
        }
        self.correction.eta.validate()?;
        let null = self.null.build()?;
        let hull_method = matches!(self.method, Method::Ui | Method::DvLogRatio | Method::DvCorrected);
        match (&null, self.method) {
            (NullModel::BoundedMean(_), m) if hull_method => {
                return Err(Error::Config(format!("method {m:?} needs a convex_hull null")));
            }
            (NullModel::ConvexHull(_), Method::DvBet) => {
                return Err(Error::Config("method DvBet needs a bounded_mean null".into()));
            }
            _ => {}
        }
        if let Some(data) = &self.data {
            match (data, &null) {
                (DataSpec::Categorical { probs }, NullModel::ConvexHull(h)) => {
                    if probs.alphabet_size() != h.alphabet_size() {
                        return Err(Error::Dimension {
                            expected: h.alphabet_size(),
                            got: probs.alphabet_size(),
                        });
                    }
                }
                (DataSpec::Categorical { .. }, NullModel::BoundedMean(_)) => {
                    return Err(Error::Config("categorical data needs a convex_hull null".into()));
                }
                (_, NullModel::ConvexHull(_)) => {
                    return Err(Error::Config("bounded data needs a bounded_mean null".into()));
                }
                (other, NullModel::BoundedMean(_)) => other.bounded().expect("bounded").validate()?,
            }
        }
        // Constructing one process checks the remaining knobs.
        self.build_process(SeededStream::new(self.master_seed, 0))?;
        Ok(())
    }

    /// Smallest alpha in the grid.
    pub fn alpha_min(&self) -> f64 {
        *self.alpha_grid.last().expect("validated non-empty")
    }

    /// `KL_inf` of the data against the null, when it can be computed.
    pub fn gamma_star(&self) -> Result<Option<f64>> {
        self.gamma_star_of(self.data.as_ref())
    }

    pub fn gamma_star_of(&self, data: Option<&DataSpec>) -> Result<Option<f64>> {
        let Some(data) = data else { return Ok(None) };
        match (data, self.null.build()?) {
            (DataSpec::Categorical { probs }, NullModel::ConvexHull(h)) => Ok(Some(h.kl_inf(probs)?.gamma_star)),
            (other, NullModel::BoundedMean(b)) => {
                let dist = other.bounded().expect("bounded");
                if dist.finite_support().is_none() {
                    return Ok(None);
                }
                Ok(Some(kl_inf_bounded_mean(&dist, &b, None)?.gamma_star))
            }
            _ => Err(Error::Config("data and null do not match".into())),
        }
    }

    pub fn resolved_horizon(&self, gamma_star: Option<f64>) -> u64 {
        if let Some(h) = self.horizon {
            return h;
        }
        match gamma_star {
            Some(g) if g > 0.0 => {
                let j = (1.0 / self.alpha_min()).ln() / g;
                ((50.0 * j).ceil() as u64).max(1)
            }
            _ => DEFAULT_HORIZON,
        }
    }

    /// A fresh process. `stream` seeds the Monte Carlo `psi0` estimator of
    /// the corrected method and is ignored otherwise.
    pub fn build_process(&self, stream: SeededStream) -> Result<Box<dyn EProcess + Send>> {
        let null = self.null.build()?;
        let process: Box<dyn EProcess + Send> = match (self.method, null) {
            (Method::Ui, NullModel::ConvexHull(h)) => Box::new(UiEProcess::new(h)),
            (Method::DvBet, NullModel::BoundedMean(b)) => Box::new(DvEProcess::new(
                DvClass::Bet(BetClass::new(self.epsilon, b.mu0())?),
                NullModel::BoundedMean(b),
                self.solver,
                self.refit_every,
            )?),
            (Method::DvLogRatio, NullModel::ConvexHull(h)) => Box::new(self.log_ratio_process(h)?),
            (Method::DvMixture, NullModel::BoundedMean(b)) => {
                Box::new(MixtureEProcess::bet_ladder(b.mu0(), self.mixture_components)?)
            }
            (Method::DvMixture, NullModel::ConvexHull(h)) => Box::new(MixtureEProcess::log_ratio_ladder(
                &h,
                self.mixture_components,
                self.solver,
            )?),
            (Method::DvCorrected, NullModel::ConvexHull(h)) => {
                let inner = self.log_ratio_process(h)?;
                let estimator = MonteCarloPsi::new(self.correction.samples, stream.auxiliary(1))?;
                Box::new(CorrectedEProcess::new(
                    inner,
                    self.correction.eta,
                    CorrectedEProcess::log_ratio_bound(self.epsilon),
                    Some(estimator),
                )?)
            }
            (m, _) => return Err(Error::Config(format!("method {m:?} does not fit the configured null"))),
        };
        Ok(process)
    }

    fn log_ratio_process(&self, hull: ConvexHullNull) -> Result<DvEProcess> {
        let class = LogRatioClass::new(self.epsilon, hull.alphabet_size())?;
        DvEProcess::new(
            DvClass::LogRatio(class),
            NullModel::ConvexHull(hull),
            self.solver,
            self.refit_every,
        )
    }

    /// Parses one streamed line into an observation of the configured kind.
    pub fn parse_observation(&self, line: &str) -> std::result::Result<Observation, String> {
        let t = line.trim();
        match self.null {
            NullSpec::ConvexHull { .. } => t
                .parse::<usize>()
                .map(Observation::Symbol)
                .map_err(|e| format!("expected a symbol index, got {t:?}: {e}")),
            NullSpec::BoundedMean { .. } => t
                .parse::<f64>()
                .map(Observation::Real)
                .map_err(|e| format!("expected a real in [0, 1], got {t:?}: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UI: &str = r#"{
        "method": "ui",
        "null": {"type": "convex_hull", "vertices": [[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]]},
        "data": {"type": "categorical", "probs": [0.6, 0.3, 0.1]},
        "alpha_grid": [0.1, 0.01],
        "replications": 10,
        "master_seed": 7
    }"#;

    #[test]
    fn parses_and_defaults() {
        let c = ExperimentConfig::from_json(UI).unwrap();
        assert_eq!(c.method, Method::Ui);
        assert_eq!(c.alpha_min(), 0.01);
        assert_eq!(c.refit_every, 1);
        assert_eq!(c.solver, SolverConfig::default());
        let g = c.gamma_star().unwrap().unwrap();
        assert!(g > 0.0);
        assert_eq!(c.resolved_horizon(Some(g)), (50.0 * 100f64.ln() / g).ceil() as u64);
        assert_eq!(c.resolved_horizon(None), DEFAULT_HORIZON);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_grids() {
        let extra = UI.replace("\"master_seed\": 7", "\"master_seed\": 7, \"colour\": 1");
        assert!(matches!(ExperimentConfig::from_json(&extra), Err(Error::Json(_))));
        let ascending = UI.replace("[0.1, 0.01]", "[0.01, 0.1]");
        assert!(matches!(ExperimentConfig::from_json(&ascending), Err(Error::Config(_))));
        let zero = UI.replace("\"replications\": 10", "\"replications\": 0");
        assert!(matches!(ExperimentConfig::from_json(&zero), Err(Error::Config(_))));
        let bad_alpha = UI.replace("[0.1, 0.01]", "[1.5]");
        assert!(ExperimentConfig::from_json(&bad_alpha).is_err());
    }

    #[test]
    fn rejects_mismatched_method_and_data() {
        let bet = UI.replace("\"ui\"", "\"dv_bet\"");
        assert!(matches!(ExperimentConfig::from_json(&bet), Err(Error::Config(_))));
        let dims = UI.replace("[0.6, 0.3, 0.1]", "[0.5, 0.5]");
        assert!(matches!(
            ExperimentConfig::from_json(&dims),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn bounded_config() {
        let c = ExperimentConfig::from_json(
            r#"{"method": "dv_bet", "null": {"type": "bounded_mean", "mu0": 0.5},
                "data": {"type": "bernoulli", "p": 0.7}, "alpha_grid": [0.01]}"#,
        )
        .unwrap();
        let g = c.gamma_star().unwrap().unwrap();
        assert!((g - (0.7 * 1.4f64.ln() + 0.3 * 0.6f64.ln())).abs() < 1e-10);
        assert_eq!(c.parse_observation(" 0.25 ").unwrap(), Observation::Real(0.25));
        assert!(c.parse_observation("x").is_err());
    }
}
