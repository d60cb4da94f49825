//! Bulk elastic energy densities `f(ζ)` depending only on `ζ^T + ζ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::Mat2;

/// Symmetric part `(ζ^T + ζ) / 2`.
#[inline]
pub fn sym(z: &Mat2) -> Mat2 {
    let off = 0.5 * (z[0][1] + z[1][0]);
    [[z[0][0], off], [off, z[1][1]]]
}

#[inline]
pub fn frobenius(z: &Mat2) -> f64 {
    (z[0][0] * z[0][0] + z[0][1] * z[0][1] + z[1][0] * z[1][0] + z[1][1] * z[1][1]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElasticDensity {
    /// `μ |e|² + (λ/2) (tr e)²`, exponent fixed at 2.
    Hooke { mu: f64, lambda: f64 },
    /// `c |ζ^T + ζ|^p`.
    Power { coefficient: f64, exponent: f64 },
}

impl ElasticDensity {
    pub fn hooke(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return invalid(format!("Lame parameter mu must be positive, got {mu}"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return invalid(format!(
                "Lame parameter lambda must be nonnegative, got {lambda}"
            ));
        }
        Ok(ElasticDensity::Hooke { mu, lambda })
    }

    pub fn power(coefficient: f64, exponent: f64) -> Result<Self> {
        if !(coefficient > 0.0 && coefficient.is_finite()) {
            return invalid(format!("coefficient must be positive, got {coefficient}"));
        }
        if !(exponent > 1.0 && exponent.is_finite()) {
            return Err(Error::Precondition(format!(
                "growth exponent must satisfy 1 < p < inf, got {exponent}"
            )));
        }
        Ok(ElasticDensity::Power {
            coefficient,
            exponent,
        })
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            ElasticDensity::Hooke { .. } => 2.0,
            ElasticDensity::Power { exponent, .. } => exponent,
        }
    }

    pub fn is_quadratic(&self) -> bool {
        self.exponent() == 2.0
    }

    /// `f(ζ)`, rejecting non-finite input.
    pub fn eval(&self, zeta: &Mat2) -> Result<f64> {
        if zeta.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("strain matrix"));
        }
        Ok(self.eval_unchecked(zeta))
    }

    #[inline]
    pub fn eval_unchecked(&self, zeta: &Mat2) -> f64 {
        let e = sym(zeta);
        match *self {
            ElasticDensity::Hooke { mu, lambda } => {
                let tr = e[0][0] + e[1][1];
                let norm2 = e[0][0] * e[0][0] + 2.0 * e[0][1] * e[0][1] + e[1][1] * e[1][1];
                mu * norm2 + 0.5 * lambda * tr * tr
            }
            ElasticDensity::Power {
                coefficient,
                exponent,
            } => coefficient * (2.0 * frobenius(&e)).powf(exponent),
        }
    }

    /// Derivative `∂f/∂ζ` (symmetric).
    #[inline]
    pub fn stress(&self, zeta: &Mat2) -> Mat2 {
        let e = sym(zeta);
        match *self {
            ElasticDensity::Hooke { mu, lambda } => {
                let tr = e[0][0] + e[1][1];
                [
                    [2.0 * mu * e[0][0] + lambda * tr, 2.0 * mu * e[0][1]],
                    [2.0 * mu * e[1][0], 2.0 * mu * e[1][1] + lambda * tr],
                ]
            }
            ElasticDensity::Power {
                coefficient,
                exponent,
            } => {
                // f = c 2^p |e|^p, df/de = c p 2^p |e|^(p-2) e
                let n = frobenius(&e);
                if n == 0.0 {
                    return [[0.0; 2]; 2];
                }
                let s = coefficient * exponent * 2f64.powf(exponent) * n.powf(exponent - 2.0);
                [[s * e[0][0], s * e[0][1]], [s * e[1][0], s * e[1][1]]]
            }
        }
    }
}

/// Empirical growth constants with `c1 |ζ^T+ζ|^p <= f(ζ) <= c2 |ζ^T+ζ|^p`
/// on every sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstants {
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
}

/// Samples axis matrices plus `sample_count` random matrices and reports
/// the tightest two-sided growth constants for exponent `p`.
pub fn check_growth(
    density: &ElasticDensity,
    p: f64,
    sample_count: usize,
    seed: u64,
) -> Result<GrowthConstants> {
    if sample_count < 1 {
        return invalid("check_growth needs at least one sample");
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!(
            "growth exponent must satisfy 1 < p < inf, got {p}"
        )));
    }
    if (p - density.exponent()).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "density is {}-homogeneous; no two-sided bound with p = {p}",
            density.exponent()
        )));
    }
    if density.eval_unchecked(&[[0.0; 2]; 2]) != 0.0 {
        return Err(Error::Precondition("f(0) != 0".to_string()));
    }

    let mut samples: Vec<Mat2> = Vec::with_capacity(sample_count + 4);
    for a in 0..2 {
        for b in 0..2 {
            let mut z = [[0.0; 2]; 2];
            z[a][b] = 1.0;
            samples.push(z);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let z = [
            [
                rng.gen_range(-1.0..1.0) * scale,
                rng.gen_range(-1.0..1.0) * scale,
            ],
            [
                rng.gen_range(-1.0..1.0) * scale,
                rng.gen_range(-1.0..1.0) * scale,
            ],
        ];
        samples.push(z);
    }

    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0_f64;
    for z in &samples {
        let s = 2.0 * frobenius(&sym(z));
        if s < 1e-12 {
            continue;
        }
        let f = density.eval_unchecked(z);
        // homogeneity: f(t ζ) = t^p f(ζ)
        let f2 = density.eval_unchecked(&[
            [2.0 * z[0][0], 2.0 * z[0][1]],
            [2.0 * z[1][0], 2.0 * z[1][1]],
        ]);
        if (f2 - 2f64.powf(p) * f).abs() > 1e-9 * f2.abs().max(1e-300) {
            return Err(Error::Precondition(format!(
                "density is not {p}-homogeneous on sample {z:?}"
            )));
        }
        let ratio = f / s.powf(p);
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
    }
    if !(c1 > 0.0) {
        return Err(Error::Precondition(format!(
            "lower growth constant is not positive (c1 = {c1})"
        )));
    }
    Ok(GrowthConstants {
        c1,
        c2,
        samples: samples.len(),
    })
}
