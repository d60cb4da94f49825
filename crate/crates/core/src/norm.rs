//! Anisotropic surface densities `φ` (norms on R²) and their duals.
//!
//! The dual norm is `φ*(ξ) = max_{ν} ν·ξ / φ(ν)`, and biduality gives back
//! `φ(ν) = max_{ξ ∈ S¹} |ν·ξ| / φ*(ξ)`. Both maxima are available by dense
//! angular sampling; the built-in families also have closed-form duals.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::Mat2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceNorm {
    Euclidean,
    /// `(Σ (w_i |ν_i|)^q)^{1/q}`, `q ∈ [1, ∞]`.
    WeightedLq {
        q: f64,
        weights: [f64; 2],
    },
    /// `‖A ν‖₂` with `A` invertible.
    Matrix {
        a: Mat2,
    },
}

impl SurfaceNorm {
    pub fn weighted_lq(q: f64, weights: [f64; 2]) -> Result<Self> {
        if !(q >= 1.0) || q.is_nan() {
            return invalid(format!("l^q exponent must be >= 1, got {q}"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return invalid(format!("l^q weights must be positive, got {weights:?}"));
        }
        Ok(SurfaceNorm::WeightedLq { q, weights })
    }

    pub fn lq(q: f64) -> Result<Self> {
        Self::weighted_lq(q, [1.0, 1.0])
    }

    pub fn matrix(a: Mat2) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if !(det.abs() > 1e-14) || a.iter().flatten().any(|v| !v.is_finite()) {
            return invalid(format!("norm matrix must be invertible, got {a:?}"));
        }
        Ok(SurfaceNorm::Matrix { a })
    }

    pub fn phi(&self, nu: [f64; 2]) -> f64 {
        match *self {
            SurfaceNorm::Euclidean => nu[0].hypot(nu[1]),
            SurfaceNorm::WeightedLq { q, weights } => {
                let a = weights[0] * nu[0].abs();
                let b = weights[1] * nu[1].abs();
                lq_norm(a, b, q)
            }
            SurfaceNorm::Matrix { a } => {
                let x = a[0][0] * nu[0] + a[0][1] * nu[1];
                let y = a[1][0] * nu[0] + a[1][1] * nu[1];
                x.hypot(y)
            }
        }
    }

    /// Closed-form dual norm.
    pub fn dual(&self, xi: [f64; 2]) -> f64 {
        match *self {
            SurfaceNorm::Euclidean => xi[0].hypot(xi[1]),
            SurfaceNorm::WeightedLq { q, weights } => {
                let a = xi[0].abs() / weights[0];
                let b = xi[1].abs() / weights[1];
                lq_norm(a, b, conjugate_exponent(q))
            }
            SurfaceNorm::Matrix { a } => {
                // ‖A^{-T} ξ‖₂
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                let x = (a[1][1] * xi[0] - a[1][0] * xi[1]) / det;
                let y = (-a[0][1] * xi[0] + a[0][0] * xi[1]) / det;
                x.hypot(y)
            }
        }
    }

    /// `φ*(ξ)` by maximizing `ν·ξ / φ(ν)` over `samples` equally spaced unit `ν`.
    pub fn dual_sampled(&self, xi: [f64; 2], samples: usize) -> f64 {
        unit_circle(samples)
            .map(|nu| (nu[0] * xi[0] + nu[1] * xi[1]) / self.phi(nu))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_ξ |ν·ξ| / φ*(ξ)` over `samples` equally spaced unit `ξ`.
    pub fn bidual_sampled(&self, nu: [f64; 2], samples: usize) -> f64 {
        unit_circle(samples)
            .map(|xi| (nu[0] * xi[0] + nu[1] * xi[1]).abs() / self.dual(xi))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn lq_norm(a: f64, b: f64, q: f64) -> f64 {
    if q.is_infinite() {
        a.max(b)
    } else if q == 1.0 {
        a + b
    } else if q == 2.0 {
        a.hypot(b)
    } else {
        let m = a.max(b);
        if m == 0.0 {
            return 0.0;
        }
        m * ((a / m).powf(q) + (b / m).powf(q)).powf(1.0 / q)
    }
}

fn conjugate_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

/// `n` equally spaced unit vectors starting at angle 0.
pub fn unit_circle(n: usize) -> impl Iterator<Item = [f64; 2]> {
    (0..n).map(move |k| {
        let t = 2.0 * PI * k as f64 / n as f64;
        [t.cos(), t.sin()]
    })
}

fn check_unit(v: [f64; 2], what: &str) -> Result<()> {
    let n = v[0].hypot(v[1]);
    if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
        return invalid(format!("{what} must be a unit vector, |{what}| = {n}"));
    }
    Ok(())
}

/// `φ*(ξ)`. The built-in families have exact duals; the sampled maximum is
/// available through [`SurfaceNorm::dual_sampled`] for cross-checks.
pub fn phi_dual(norm: &SurfaceNorm, xi: [f64; 2], angular_samples: usize) -> Result<f64> {
    check_unit(xi, "xi")?;
    if angular_samples < 8 {
        return invalid(format!(
            "need at least 8 angular samples, got {angular_samples}"
        ));
    }
    let value = norm.dual(xi);
    if !(value > 0.0 && value.is_finite()) {
        return invalid("degenerate norm parameters");
    }
    Ok(value)
}

/// `|φ(ν) − max_ξ |ν·ξ| / φ*(ξ)|` with the maximum over sampled directions.
pub fn dual_norm_residual(norm: &SurfaceNorm, nu: [f64; 2], angular_samples: usize) -> Result<f64> {
    check_unit(nu, "nu")?;
    Ok((norm.phi(nu) - norm.bidual_sampled(nu, angular_samples)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_examples() {
        let e1 = [1.0, 0.0];
        for xi in [e1, [0.6, 0.8], [0.0, -1.0]] {
            assert!((phi_dual(&SurfaceNorm::Euclidean, xi, 16).unwrap() - 1.0).abs() < 1e-15);
        }
        let l1 = SurfaceNorm::lq(1.0).unwrap();
        assert_eq!(phi_dual(&l1, e1, 16).unwrap(), 1.0);
        let a = SurfaceNorm::matrix([[2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(phi_dual(&a, e1, 16).unwrap(), 0.5);
        // the closed form agrees with the sampled maximum
        assert!((a.dual_sampled(e1, 3600) - 0.5).abs() < 1e-6);
        assert!(phi_dual(&a, [1.0, 1.0], 16).is_err());
        assert!(phi_dual(&a, e1, 4).is_err());
    }

    #[test]
    fn closed_form_duals_match_sampling() {
        let norms = [
            SurfaceNorm::Euclidean,
            SurfaceNorm::lq(1.0).unwrap(),
            SurfaceNorm::lq(f64::INFINITY).unwrap(),
            SurfaceNorm::weighted_lq(3.0, [0.5, 2.0]).unwrap(),
            SurfaceNorm::matrix([[1.0, 0.4], [-0.3, 2.0]]).unwrap(),
        ];
        for norm in norms {
            for xi in unit_circle(37) {
                let exact = norm.dual(xi);
                let sampled = norm.dual_sampled(xi, 20_000);
                assert!(sampled <= exact * (1.0 + 1e-12));
                assert!((exact - sampled) / exact < 1e-3, "{norm:?} {xi:?}");
            }
        }
    }

    #[test]
    fn residual_examples() {
        let r = dual_norm_residual(&SurfaceNorm::Euclidean, [0.0, 1.0], 360).unwrap();
        assert!(r <= 1e-4);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = dual_norm_residual(&SurfaceNorm::lq(1.0).unwrap(), [s, s], 720).unwrap();
        assert!(r <= 1e-3);
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(SurfaceNorm::weighted_lq(0.5, [1.0, 1.0]).is_err());
        assert!(SurfaceNorm::weighted_lq(2.0, [0.0, 1.0]).is_err());
        assert!(SurfaceNorm::matrix([[1.0, 2.0], [2.0, 4.0]]).is_err());
    }
}
