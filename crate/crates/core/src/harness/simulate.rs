//! Monte Carlo estimation of stopping times.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_point::{solve_largest_root, FixedPointQuery};
use crate::harness::config::{DataSpec, ExperimentConfig};
use crate::null::NullModel;
use crate::prob::SeededStream;

/// `J(alpha) = log(1/alpha) / gamma*`, the smallest achievable expected
/// stopping time to first order.
pub fn lower_bound_j(alpha: f64, gamma_star: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(gamma_star > 0.0) {
        return Err(Error::NotApplicable(format!(
            "the lower bound needs gamma* > 0, got {gamma_star}"
        )));
    }
    Ok((1.0 / alpha).ln() / gamma_star)
}

/// Heuristic prediction of `E[tau_alpha]`: the largest root of
/// `y = K + L log y` with `K = (log(1/alpha) + constant) / gamma*` and
/// `L = slope / gamma*`. Not a bound.
pub fn predict_tau(alpha: f64, gamma_star: f64, slope: f64, constant: f64) -> Result<f64> {
    let j = lower_bound_j(alpha, gamma_star)?;
    if !(slope >= 0.0) {
        return Err(Error::Domain(format!("slope must be non-negative, got {slope}")));
    }
    let k = j + constant / gamma_star;
    if slope == 0.0 {
        return Ok(k);
    }
    let q = FixedPointQuery::new(k, slope / gamma_star)?;
    solve_largest_root(&q, 1e-10)
}

/// Outcome of a single replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    /// First crossing time for each alpha in the grid, `None` if censored.
    pub taus: Vec<Option<u64>>,
    pub steps: u64,
    pub error: Option<String>,
}

/// Runs one replication on stream `stream_index` of the master seed.
/// Stops once the smallest alpha has crossed or the horizon is reached.
pub fn run_replication(config: &ExperimentConfig, data: &DataSpec, horizon: u64, stream_index: u64) -> Replication {
    let mut taus = vec![None; config.alpha_grid.len()];
    let stream = SeededStream::new(config.master_seed, stream_index);
    let outcome = (|| -> Result<u64> {
        let source = data.source()?;
        let mut process = config.build_process(stream)?;
        let mut rng = stream.rng();
        let thresholds: Vec<f64> = config.alpha_grid.iter().map(|a| (1.0 / a).ln()).collect();
        // Thresholds increase along the descending grid, so crossings fill
        // `taus` from the front.
        let mut next = 0;
        for n in 1..=horizon {
            let lw = process.step(source.draw(&mut rng))?;
            while next < thresholds.len() && lw >= thresholds[next] {
                taus[next] = Some(n);
                next += 1;
            }
            if next == thresholds.len() {
                return Ok(n);
            }
        }
        Ok(horizon)
    })();
    match outcome {
        Ok(steps) => Replication {
            taus,
            steps,
            error: None,
        },
        Err(e) => Replication {
            taus: vec![None; config.alpha_grid.len()],
            steps: 0,
            error: Some(e.to_string()),
        },
    }
}

/// One row of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    pub alpha: f64,
    pub replications: usize,
    pub stopped: usize,
    pub censored: usize,
    pub failures: usize,
    pub mean_tau: Option<f64>,
    pub std_tau: Option<f64>,
    pub se_tau: Option<f64>,
    pub gamma_star: Option<f64>,
    pub j_alpha: Option<f64>,
    /// `mean_tau / J`, only when `gamma* > 0` and nothing was censored.
    pub ratio: Option<f64>,
    pub ratio_se: Option<f64>,
    /// Empty when the ratio is reported, otherwise the reason it is not.
    pub ratio_flag: String,
    /// Fraction of replications that stopped; a type-I error rate when the
    /// data come from the null.
    pub rejection_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub horizon: u64,
    pub gamma_star: Option<f64>,
    pub rows: Vec<AlphaRow>,
    pub failure_messages: Vec<(usize, String)>,
}

pub fn aggregate(alpha_grid: &[f64], reps: &[Replication], gamma_star: Option<f64>, horizon: u64) -> SimulationReport {
    let failure_messages: Vec<(usize, String)> = reps
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.error.clone().map(|e| (i, e)))
        .collect();
    let failures = failure_messages.len();
    let rows = alpha_grid
        .iter()
        .enumerate()
        .map(|(a, &alpha)| {
            let taus: Vec<f64> = reps.iter().filter_map(|r| r.taus[a]).map(|t| t as f64).collect();
            let stopped = taus.len();
            let censored = reps.len() - stopped - failures;
            let (mean, std, se) = if stopped == 0 {
                (None, None, None)
            } else {
                let mean = taus.iter().sum::<f64>() / stopped as f64;
                let std = if stopped > 1 {
                    (taus.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (stopped - 1) as f64).sqrt()
                } else {
                    0.0
                };
                (Some(mean), Some(std), Some(std / (stopped as f64).sqrt()))
            };
            let j = gamma_star.and_then(|g| lower_bound_j(alpha, g).ok());
            let ratio_flag = match (gamma_star, j) {
                (None, _) => "gamma_star_unknown",
                (Some(_), None) => "gamma_star_not_positive",
                (Some(g), _) if g.is_infinite() => "gamma_star_infinite",
                _ if failures > 0 => "failures",
                _ if censored > 0 => "censored",
                _ => "",
            };
            let (ratio, ratio_se) = match (ratio_flag.is_empty(), mean, se, j) {
                (true, Some(m), Some(s), Some(j)) => (Some(m / j), Some(s / j)),
                _ => (None, None),
            };
            AlphaRow {
                alpha,
                replications: reps.len(),
                stopped,
                censored,
                failures,
                mean_tau: mean,
                std_tau: std,
                se_tau: se,
                gamma_star,
                j_alpha: j,
                ratio,
                ratio_se,
                ratio_flag: ratio_flag.into(),
                rejection_rate: stopped as f64 / reps.len() as f64,
            }
        })
        .collect();
    SimulationReport {
        horizon,
        gamma_star,
        rows,
        failure_messages,
    }
}

fn pool(config: &ExperimentConfig) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Runs replications `offset..offset + replications` in parallel. Results
/// come back in replication order whatever the thread count.
pub fn run_replications(
    config: &ExperimentConfig,
    data: &DataSpec,
    horizon: u64,
    offset: u64,
) -> Result<Vec<Replication>> {
    let pool = pool(config)?;
    Ok(pool.install(|| {
        (0..config.replications as u64)
            .into_par_iter()
            .map(|r| run_replication(config, data, horizon, offset + r))
            .collect()
    }))
}

pub fn run_simulation(config: &ExperimentConfig) -> Result<SimulationReport> {
    let data = config
        .data
        .as_ref()
        .ok_or_else(|| Error::Config("simulation needs a data section".into()))?;
    let gamma_star = config.gamma_star()?;
    let horizon = config.resolved_horizon(gamma_star);
    let reps = run_replications(config, data, horizon, 0)?;
    Ok(aggregate(&config.alpha_grid, &reps, gamma_star, horizon))
}

/// Rejection rates under one null distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeOneRow {
    pub null_point: String,
    pub alpha: f64,
    pub replications: usize,
    pub rejections: usize,
    pub failures: usize,
    pub rate: f64,
    /// `alpha + 3 sqrt(alpha (1 - alpha) / replications)`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Simulates under every hull vertex, or under Bernoulli(mu0) for a bounded
/// mean null, and reports the fraction of paths that ever crossed.
pub fn validate_type1(config: &ExperimentConfig) -> Result<Vec<TypeOneRow>> {
    let points: Vec<(String, DataSpec)> = match config.null.build()? {
        NullModel::ConvexHull(h) => h
            .vertices()
            .iter()
            .enumerate()
            .map(|(k, v)| (format!("vertex_{k}"), DataSpec::Categorical { probs: v.clone() }))
            .collect(),
        NullModel::BoundedMean(b) => vec![(format!("bernoulli_{}", b.mu0()), DataSpec::Bernoulli { p: b.mu0() })],
    };
    let horizon = config.horizon.unwrap_or(crate::harness::config::DEFAULT_HORIZON);
    let mut rows = Vec::new();
    for (k, (name, data)) in points.iter().enumerate() {
        let reps = run_replications(config, data, horizon, (k * config.replications) as u64)?;
        let failures = reps.iter().filter(|r| r.error.is_some()).count();
        for (a, &alpha) in config.alpha_grid.iter().enumerate() {
            let rejections = reps.iter().filter(|r| r.taus[a].is_some()).count();
            let n = reps.len() as f64;
            let rate = rejections as f64 / n;
            let bound = alpha + 3.0 * (alpha * (1.0 - alpha) / n).sqrt();
            rows.push(TypeOneRow {
                null_point: name.clone(),
                alpha,
                replications: reps.len(),
                rejections,
                failures,
                rate,
                bound,
                within_bound: rate <= bound,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lower_bound_examples() {
        assert_abs_diff_eq!(lower_bound_j(0.01, 0.2).unwrap(), 23.0259, epsilon = 1e-4);
        assert_abs_diff_eq!(lower_bound_j(0.01, 0.082282).unwrap(), 55.9681, epsilon = 1e-4);
        assert!(lower_bound_j(1.0 - 1e-12, 0.2).unwrap() < 1e-10);
        assert!(matches!(lower_bound_j(0.01, 0.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn predict_examples() {
        assert_eq!(
            predict_tau(0.01, 0.2, 0.0, 0.0).unwrap(),
            lower_bound_j(0.01, 0.2).unwrap()
        );
        let y = predict_tau(0.01, 0.2, 1.0, 0.0).unwrap();
        let k = 100f64.ln() / 0.2;
        assert_abs_diff_eq!(y, k + 5.0 * y.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(y, 41.67541, epsilon = 1e-4);
        assert!(y >= k);
    }

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn immediate_rejection_when_null_excludes_data() {
        let c = config(
            r#"{"method": "ui", "null": {"type": "convex_hull", "vertices": [[1.0, 0.0]]},
                "data": {"type": "categorical", "probs": [0.0, 1.0]},
                "alpha_grid": [0.5, 0.1], "replications": 3}"#,
        );
        let r = run_simulation(&c).unwrap();
        assert_eq!(r.gamma_star, Some(f64::INFINITY));
        for row in &r.rows {
            assert_eq!(row.mean_tau, Some(1.0));
            assert_eq!(row.ratio, None);
            assert_eq!(row.ratio_flag, "gamma_star_infinite");
        }
    }

    #[test]
    fn null_data_flags_ratio() {
        let c = config(
            r#"{"method": "ui", "null": {"type": "convex_hull", "vertices": [[0.5, 0.5]]},
                "data": {"type": "categorical", "probs": [0.5, 0.5]},
                "alpha_grid": [0.1], "replications": 20, "horizon": 200}"#,
        );
        let r = run_simulation(&c).unwrap();
        assert_eq!(r.gamma_star, Some(0.0));
        assert_eq!(r.rows[0].ratio, None);
        assert_eq!(r.rows[0].ratio_flag, "gamma_star_not_positive");
        assert_eq!(r.rows[0].stopped + r.rows[0].censored, 20);
    }

    #[test]
    fn shared_paths_give_monotone_taus() {
        let c = config(
            r#"{"method": "dv_bet", "null": {"type": "bounded_mean", "mu0": 0.5},
                "data": {"type": "bernoulli", "p": 0.8},
                "alpha_grid": [0.2, 0.05, 0.01], "replications": 30, "master_seed": 3}"#,
        );
        let data = c.data.clone().unwrap();
        for r in 0..30 {
            let rep = run_replication(&c, &data, 10_000, r);
            let taus: Vec<u64> = rep.taus.iter().map(|t| t.unwrap()).collect();
            assert!(taus.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(rep.steps, *taus.last().unwrap());
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut c = config(
            r#"{"method": "ui", "null": {"type": "convex_hull", "vertices": [[0.34, 0.33, 0.33]]},
                "data": {"type": "categorical", "probs": [0.6, 0.3, 0.1]},
                "alpha_grid": [0.1, 0.01], "replications": 40, "master_seed": 11}"#,
        );
        c.workers = Some(1);
        let one = run_simulation(&c).unwrap();
        c.workers = Some(4);
        assert_eq!(one, run_simulation(&c).unwrap());
    }

    #[test]
    fn type1_rows_cover_every_vertex() {
        let c = config(
            r#"{"method": "ui", "null": {"type": "convex_hull", "vertices": [[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]]},
                "alpha_grid": [0.1], "replications": 50, "horizon": 300}"#,
        );
        let rows = validate_type1(&c).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].null_point, "vertex_1");
        assert!(rows.iter().all(|r| r.failures == 0));
    }
}
