//! The common interface of every wealth process and the level-alpha stopping
//! rule shared by all of them.

use crate::class::Observation;
use crate::error::Result;

/// A nonnegative wealth process tracked in log space.
pub trait EProcess {
    /// Consumes the next observation and returns the updated `log W_n`.
    fn step(&mut self, x: Observation) -> Result<f64>;

    /// `log W_n` after the last step (`0` before any data).
    fn log_wealth(&self) -> f64;

    /// Number of observations consumed.
    fn steps(&self) -> u64;
}

/// `log(1/alpha)`.
pub fn log_threshold(alpha: f64) -> f64 {
    -alpha.ln()
}

/// `tau_alpha = inf{n >= 1 : log W_n >= log(1/alpha)}` over a finite path,
/// reported 1-based. `None` when the path never crosses.
pub fn first_crossing(log_wealth: &[f64], alpha: f64) -> Option<usize> {
    let threshold = log_threshold(alpha);
    log_wealth.iter().position(|&w| w >= threshold).map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_scan() {
        let path = [-0.69, 0.69, 3.22];
        assert_eq!(first_crossing(&path, 0.05), Some(3));
        assert_eq!(first_crossing(&path, 1.0), Some(2));
        assert_eq!(first_crossing(&path, 0.001), None);
        assert_eq!(first_crossing(&[], 0.5), None);
        assert_eq!(first_crossing(&[f64::INFINITY], 1e-300), Some(1));
    }
}
