//! Largest root of `y = K + L log y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointQuery {
    pub k: f64,
    pub l: f64,
}

impl FixedPointQuery {
    pub fn new(k: f64, l: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite() && l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!(
                "K and L must be positive and finite, got K={k}, L={l}"
            )));
        }
        Ok(Self { k, l })
    }

    /// `K/L > max(1 - log L, (log K + 3)/2)`.
    pub fn is_applicable(&self) -> bool {
        let ratio = self.k / self.l;
        ratio > (1.0 - self.l.ln()).max((self.k.ln() + 3.0) / 2.0)
    }

    /// `K + L log K + 2L`, an upper bound on the largest root when applicable.
    pub fn upper_bound(&self) -> f64 {
        self.k + self.l * self.k.ln() + 2.0 * self.l
    }

    pub fn residual(&self, y: f64) -> f64 {
        y - self.k - self.l * y.ln()
    }
}

/// Largest root of `y = K + L log y`, to `|y - K - L log y| <= tol`.
///
/// Starts at [`FixedPointQuery::upper_bound`] and runs Newton on
/// `g(y) = y - K - L log y`. `g` is convex and increasing above `L`, so the
/// iterates decrease monotonically onto the largest root.
pub fn solve_largest_root(q: &FixedPointQuery, tol: f64) -> Result<f64> {
    if !q.is_applicable() {
        return Err(Error::NotApplicable(format!(
            "K={}, L={} violates K/L > max(1 - log L, (log K + 3)/2)",
            q.k, q.l
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let mut y = q.upper_bound();
    for _ in 0..200 {
        let g = q.residual(y);
        if g.abs() <= tol {
            return Ok(y);
        }
        let next = y - g / (1.0 - q.l / y);
        if next >= y {
            // Rounding floor reached.
            return Ok(y);
        }
        y = next;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Plain fixed-point iteration from the bound, run far past convergence.
    fn iterate(q: &FixedPointQuery) -> f64 {
        let mut y = q.upper_bound();
        for _ in 0..100_000 {
            y = q.k + q.l * y.ln();
        }
        y
    }

    #[test]
    fn known_roots() {
        let q = FixedPointQuery::new(10.0, 1.0).unwrap();
        let y = solve_largest_root(&q, 1e-10).unwrap();
        assert_abs_diff_eq!(y, 12.527963, epsilon = 1e-6);
        assert!(y <= 10.0 + 10f64.ln() + 2.0);

        let q = FixedPointQuery::new(100.0, 2.0).unwrap();
        let y = solve_largest_root(&q, 1e-10).unwrap();
        assert_abs_diff_eq!(y, iterate(&q), epsilon = 1e-9);
        assert_abs_diff_eq!(y, 109.38984, epsilon = 1e-5);
        assert!(y <= 113.2104);
    }

    #[test]
    fn vanishing_slope() {
        let q = FixedPointQuery::new(10.0, 1e-9).unwrap();
        let y = solve_largest_root(&q, 1e-12).unwrap();
        assert_abs_diff_eq!(y, 10.0, epsilon = 1e-6);
    }

    #[test]
    fn not_applicable() {
        let q = FixedPointQuery::new(1.0, 1.0).unwrap();
        assert!(!q.is_applicable());
        assert!(matches!(solve_largest_root(&q, 1e-8), Err(Error::NotApplicable(_))));
        assert!(FixedPointQuery::new(0.0, 1.0).is_err());
        assert!(FixedPointQuery::new(1.0, -1.0).is_err());
    }

    #[test]
    fn grid_matches_iteration_and_bound() {
        for i in 0..12 {
            for j in 0..12 {
                let q = FixedPointQuery::new(0.5 * 1.8f64.powi(i), 0.05 * 1.9f64.powi(j)).unwrap();
                if !q.is_applicable() {
                    continue;
                }
                let y = solve_largest_root(&q, 1e-9).unwrap();
                assert!(q.residual(y).abs() <= 1e-9);
                assert!(y <= q.upper_bound());
                assert_abs_diff_eq!(y, iterate(&q), epsilon = 1e-7 * y);
            }
        }
    }
}
