//! Probability primitives on finite alphabets and on `[0, 1]`.
//!
//! All logarithms are natural. Relative entropy uses the `0 log 0 = 0`
//! convention and reports `f64::INFINITY` when absolute continuity fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` accepted by [`Pmf::new`].
pub const PMF_SUM_TOL: f64 = 1e-12;

/// A probability mass function on `{0, .., m-1}` with `m >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates and renormalizes. Sums further than [`PMF_SUM_TOL`] from one
    /// are rejected rather than silently rescaled.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidPmf(format!(
                "alphabet size must be at least 2, got {}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPmf(format!(
                "entry {bad} is not a finite non-negative number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}, not 1")));
        }
        let probs = probs.into_iter().map(|p| p / total).collect();
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m])
    }

    pub fn point_mass(m: usize, symbol: usize) -> Result<Self> {
        if symbol >= m {
            return Err(Error::Domain(format!("symbol {symbol} outside alphabet of size {m}")));
        }
        let mut probs = vec![0.0; m];
        probs[symbol] = 1.0;
        Self::new(probs)
    }

    /// Empirical pmf of a count vector.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidPmf("empty count vector".into()));
        }
        Self::new(counts.iter().map(|&c| c as f64 / n as f64).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(self)
    }
}

impl<'de> Deserialize<'de> for Pmf {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(de)?;
        Pmf::new(probs).map_err(serde::de::Error::custom)
    }
}

/// `KL(p || q)` over raw probability slices.
pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            total += pi * (pi / qi).ln();
        }
    }
    total.max(0.0)
}

/// Relative entropy `KL(p || q)`.
///
/// Returns `f64::INFINITY` (not an error) when `p` puts mass where `q` does not.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(Error::Dimension {
            expected: p.alphabet_size(),
            got: q.alphabet_size(),
        });
    }
    Ok(kl_slices(&p.probs, &q.probs))
}

pub fn shannon_entropy(p: &Pmf) -> f64 {
    -p.probs.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Numerically stable `log(sum(exp(xs)))`. Empty input gives `-inf`.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + xs.into_iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Identifies one reproducible random substream.
///
/// Stream `i` is the ChaCha8 keystream keyed by `master_seed` with stream id
/// `i`, so replications need no coordination to stay independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// A stream keyed off a different master seed, for auxiliary randomness
    /// that must not overlap the data stream.
    pub fn auxiliary(&self, lane: u64) -> Self {
        Self {
            master_seed: self.master_seed ^ lane.wrapping_mul(0x9E37_79B9_7F4A_7C15),
            stream_index: self.stream_index,
        }
    }
}

/// Draws one symbol by inverse-CDF lookup.
pub fn draw_symbol<R: Rng + ?Sized>(p: &Pmf, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let last = p.probs.len() - 1;
    for (x, &px) in p.probs.iter().enumerate() {
        acc += px;
        if u < acc && px > 0.0 {
            return x;
        }
    }
    // Rounding can leave `acc` a hair below one; fall back to the last
    // symbol with positive mass.
    p.probs.iter().rposition(|&px| px > 0.0).unwrap_or(last)
}

/// `n` i.i.d. symbols from `p` on the given substream.
pub fn sample(p: &Pmf, stream: SeededStream, n: usize) -> Vec<usize> {
    let mut rng = stream.rng();
    (0..n).map(|_| draw_symbol(p, &mut rng)).collect()
}

/// Distributions on `[0, 1]` used to generate bounded observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundedDistSpec {
    Bernoulli { p: f64 },
    Beta { a: f64, b: f64 },
    Discrete { atoms: Vec<f64>, weights: Vec<f64> },
}

impl BoundedDistSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Config(format!("bernoulli p = {p} outside [0, 1]")));
                }
            }
            Self::Beta { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return Err(Error::Config(format!("beta parameters ({a}, {b}) must be positive")));
                }
            }
            Self::Discrete { atoms, weights } => {
                if atoms.is_empty() {
                    return Err(Error::Config("discrete distribution has empty support".into()));
                }
                if atoms.len() != weights.len() {
                    return Err(Error::Config(format!(
                        "discrete distribution has {} atoms but {} weights",
                        atoms.len(),
                        weights.len()
                    )));
                }
                if atoms.iter().any(|a| !(0.0..=1.0).contains(a)) {
                    return Err(Error::Config("discrete atoms must lie in [0, 1]".into()));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::Config("discrete weights must be non-negative".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > PMF_SUM_TOL {
                    return Err(Error::Config(format!("discrete weights sum to {total}, not 1")));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Bernoulli { p } => *p,
            Self::Beta { a, b } => a / (a + b),
            Self::Discrete { atoms, weights } => atoms.iter().zip(weights).map(|(a, w)| a * w).sum(),
        }
    }

    /// `(atom, probability)` pairs with positive probability, when the
    /// support is finite.
    pub fn finite_support(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::Bernoulli { p } => Some(
                [(0.0, 1.0 - p), (1.0, *p)]
                    .into_iter()
                    .filter(|(_, w)| *w > 0.0)
                    .collect(),
            ),
            Self::Beta { .. } => None,
            Self::Discrete { atoms, weights } => Some(
                atoms
                    .iter()
                    .zip(weights)
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(a, w)| (*a, *w))
                    .collect(),
            ),
        }
    }

    /// A validated sampler. Fails on invalid parameters.
    pub fn sampler(&self) -> Result<BoundedSampler> {
        self.validate()?;
        Ok(match self {
            Self::Bernoulli { p } => BoundedSampler::Bernoulli(*p),
            Self::Beta { a, b } => {
                BoundedSampler::Beta(Beta::new(*a, *b).map_err(|e| Error::Config(format!("beta: {e}")))?)
            }
            Self::Discrete { atoms, weights } => {
                let mut cdf = Vec::with_capacity(weights.len());
                let mut acc = 0.0;
                for w in weights {
                    acc += w;
                    cdf.push(acc);
                }
                BoundedSampler::Discrete {
                    atoms: atoms.clone(),
                    cdf,
                }
            }
        })
    }
}

#[derive(Debug, Clone)]
pub enum BoundedSampler {
    Bernoulli(f64),
    Beta(Beta<f64>),
    Discrete { atoms: Vec<f64>, cdf: Vec<f64> },
}

impl BoundedSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Bernoulli(p) => {
                let u: f64 = rng.random();
                if u < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Beta(beta) => beta.sample(rng),
            Self::Discrete { atoms, cdf } => {
                let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
                let idx = cdf.partition_point(|&c| c <= u).min(atoms.len() - 1);
                atoms[idx]
            }
        }
    }
}

/// `n` i.i.d. draws in `[0, 1]` on the given substream.
pub fn sample_bounded(dist: &BoundedDistSpec, stream: SeededStream, n: usize) -> Result<Vec<f64>> {
    let sampler = dist.sampler()?;
    let mut rng = stream.rng();
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pmf(v: &[f64]) -> Pmf {
        Pmf::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::new(vec![1.0]).is_err());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
        let p = Pmf::new(vec![0.6, 0.3, 0.1]).unwrap();
        assert_abs_diff_eq!(p.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&pmf(&[0.5, 0.5]), &pmf(&[0.5, 0.5])).unwrap(), 0.0);
        let expected = 0.9 * 1.8f64.ln() + 0.1 * 0.2f64.ln();
        assert_abs_diff_eq!(
            kl_divergence(&pmf(&[0.9, 0.1]), &pmf(&[0.5, 0.5])).unwrap(),
            expected,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(expected, 0.368064, epsilon = 1e-6);
        assert_abs_diff_eq!(
            kl_divergence(&pmf(&[1.0, 0.0]), &pmf(&[0.5, 0.5])).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn kl_sentinels_and_errors() {
        let inf = kl_divergence(&pmf(&[0.5, 0.5]), &pmf(&[1.0, 0.0])).unwrap();
        assert_eq!(inf, f64::INFINITY);
        let err = kl_divergence(&pmf(&[0.5, 0.5]), &pmf(&[0.2, 0.3, 0.5]));
        assert!(matches!(err, Err(Error::Dimension { .. })));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&pmf(&[1.0, 0.0])), 0.0);
        assert_abs_diff_eq!(
            shannon_entropy(&pmf(&[0.5, 0.5])),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        let expected = -(0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert_abs_diff_eq!(shannon_entropy(&pmf(&[0.25, 0.75])), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.562335, epsilon = 1e-6);
    }

    #[test]
    fn sampling_examples() {
        let stream = SeededStream::new(7, 3);
        assert_eq!(sample(&pmf(&[1.0, 0.0]), stream, 5), vec![0; 5]);

        let draws = sample(&pmf(&[0.5, 0.5]), stream, 100_000);
        let freq = draws.iter().filter(|&&x| x == 0).count() as f64 / 1e5;
        assert!((freq - 0.5).abs() <= 0.01, "freq {freq}");

        assert_eq!(
            sample(&pmf(&[0.3, 0.7]), stream, 100),
            sample(&pmf(&[0.3, 0.7]), stream, 100)
        );
        assert_ne!(
            sample(&pmf(&[0.5, 0.5]), stream, 100),
            sample(&pmf(&[0.5, 0.5]), SeededStream::new(7, 4), 100)
        );
    }

    #[test]
    fn bounded_sampling_examples() {
        let stream = SeededStream::new(11, 0);
        let ones = sample_bounded(&BoundedDistSpec::Bernoulli { p: 1.0 }, stream, 3).unwrap();
        assert_eq!(ones, vec![1.0, 1.0, 1.0]);

        let bern = sample_bounded(&BoundedDistSpec::Bernoulli { p: 0.7 }, stream, 100_000).unwrap();
        let mean = bern.iter().sum::<f64>() / 1e5;
        assert!((mean - 0.7).abs() <= 0.005, "mean {mean}");

        let beta = sample_bounded(&BoundedDistSpec::Beta { a: 2.0, b: 2.0 }, stream, 100_000).unwrap();
        let mean = beta.iter().sum::<f64>() / 1e5;
        assert!((mean - 0.5).abs() <= 0.005, "mean {mean}");
        assert!(beta.iter().all(|x| (0.0..=1.0).contains(x)));

        let disc = BoundedDistSpec::Discrete {
            atoms: vec![0.2, 1.0],
            weights: vec![0.5, 0.5],
        };
        let draws = sample_bounded(&disc, stream, 1000).unwrap();
        assert!(draws.iter().all(|&x| x == 0.2 || x == 1.0));
    }

    #[test]
    fn bounded_spec_errors() {
        for bad in [
            BoundedDistSpec::Bernoulli { p: 1.5 },
            BoundedDistSpec::Beta { a: 0.0, b: 1.0 },
            BoundedDistSpec::Discrete {
                atoms: vec![],
                weights: vec![],
            },
            BoundedDistSpec::Discrete {
                atoms: vec![2.0],
                weights: vec![1.0],
            },
        ] {
            assert!(matches!(bad.sampler(), Err(Error::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn log_sum_exp_is_stable() {
        assert_abs_diff_eq!(
            log_sum_exp([1000.0, 1000.0]),
            1000.0 + std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        assert_eq!(log_sum_exp(Vec::<f64>::new()), f64::NEG_INFINITY);
    }
}
