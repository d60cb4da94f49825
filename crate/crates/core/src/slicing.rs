//! One-dimensional slices `t ↦ u(y + tξ)·ξ` of displacement fields and the
//! slice functional behind the anisotropic lower bound.

use crate::elastic::sym;
use crate::elastic::ElasticDensity;
use crate::error::{invalid, Result};
use crate::geometry::{dot, interval_difference, Point, Rect, VoidSet};
use crate::grid::DisplacementField;
use crate::norm::SurfaceNorm;
use crate::sharp::{energy_f, energy_f_relaxed, integrate_outside, segment_on_side, VoidConfig};

const END_TOL: f64 = 1e-12;

/// Samples of `v̂` on one interval of `U \ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPiece {
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledPiece {
    fn sample(lo: f64, hi: f64, step: f64, f: &impl Fn(f64) -> f64) -> Self {
        let n = ((hi - lo) / step).ceil().max(1.0) as usize;
        let ts: Vec<f64> = (0..=n)
            .map(|k| {
                if k == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / n as f64
                }
            })
            .collect();
        let values = ts.iter().map(|&t| f(t)).collect();
        SampledPiece { ts, values }
    }

    /// `∫ |v̂′|^p` by the trapezoid rule on nodal derivatives (central
    /// inside, one-sided at the ends).
    pub fn gradient_integral(&self, p: f64) -> f64 {
        let n = self.ts.len();
        if n < 2 {
            return 0.0;
        }
        let d: Vec<f64> = (0..n)
            .map(|k| {
                let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
                (self.values[b] - self.values[a]) / (self.ts[b] - self.ts[a])
            })
            .collect();
        (0..n - 1)
            .map(|k| {
                0.5 * (self.ts[k + 1] - self.ts[k]) * (d[k].abs().powf(p) + d[k + 1].abs().powf(p))
            })
            .sum()
    }
}

/// A slice: the parameter interval `U = Ω^ξ_y`, the section `B^ξ_y` and
/// samples of `v̂` on the pieces of `U \ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice1D {
    pub domain: Option<(f64, f64)>,
    pub void: Vec<(f64, f64)>,
    pub pieces: Vec<SampledPiece>,
}

impl Slice1D {
    pub fn empty() -> Self {
        Slice1D {
            domain: None,
            void: Vec::new(),
            pieces: Vec::new(),
        }
    }

    /// Slice of an explicit function `f` on `(lo, hi)` with section `void`.
    pub fn from_fn(
        lo: f64,
        hi: f64,
        void: &[(f64, f64)],
        step: f64,
        f: impl Fn(f64) -> f64,
    ) -> Self {
        let void: Vec<(f64, f64)> = void
            .iter()
            .filter_map(|&(a, b)| {
                let (a, b) = (a.max(lo), b.min(hi));
                (b > a).then_some((a, b))
            })
            .collect();
        let pieces = interval_difference(lo, hi, &void)
            .into_iter()
            .map(|(a, b)| SampledPiece::sample(a, b, step, &f))
            .collect();
        Slice1D {
            domain: Some((lo, hi)),
            void,
            pieces,
        }
    }

    /// `𝓗⁰(∂B ∩ U)`: endpoints of the section strictly inside `U`.
    pub fn interior_endpoints(&self) -> usize {
        let Some((lo, hi)) = self.domain else {
            return 0;
        };
        self.void
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|&t| t > lo + END_TOL && t < hi - END_TOL)
            .count()
    }
}

/// Restricts `u·ξ` and `B` to the line `y + tξ` within the grid domain.
pub fn take_slice(
    u: &DisplacementField,
    void: &VoidSet,
    xi: [f64; 2],
    y: Point,
    step: f64,
) -> Result<Slice1D> {
    check_direction(xi)?;
    if !(step > 0.0) {
        return invalid("slice sampling step must be positive");
    }
    let g = u.grid();
    let (x0, x1) = g.x_range();
    let (y0, y1) = g.y_range();
    let omega = Rect { x0, x1, y0, y1 };
    let Some((lo, hi)) = omega.line_interval(y, xi) else {
        return Ok(Slice1D::empty());
    };
    let section = void.line_intervals(y, xi);
    Ok(Slice1D::from_fn(lo, hi, &section, step, |t| {
        let w = u.interpolate([y[0] + t * xi[0], y[1] + t * xi[1]]);
        dot(w, xi)
    }))
}

fn check_direction(xi: [f64; 2]) -> Result<()> {
    if ((xi[0].hypot(xi[1])) - 1.0).abs() > 1e-9 {
        return invalid(format!("slice direction {xi:?} is not a unit vector"));
    }
    Ok(())
}

/// `ε ∫_{U\B} |v̂′|^p + 𝓗⁰(∂B ∩ U) / φ*(ξ)`.
pub fn f_eps_xi(slice: &Slice1D, eps: f64, p: f64, dual_value: f64) -> f64 {
    let bulk: f64 = slice.pieces.iter().map(|s| s.gradient_integral(p)).sum();
    eps * bulk + slice.interior_endpoints() as f64 / dual_value
}

/// Both sides of the slicing identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FubiniReport {
    /// `Σ_lines F_ε^ξ · spacing`.
    pub lhs: f64,
    /// `ε ∫_{Ω\B} |e(u)ξ·ξ|^p + ∫_{Ω∩∂B} |ν_B·ξ| / φ*(ξ)`.
    pub rhs: f64,
    pub residual: f64,
    pub lines: usize,
}

/// Integrates the slice functional over parallel lines spaced `line_spacing`
/// apart (at midpoints of the projection of `Ω` onto `ξ^⊥`) and compares with
/// the bulk-plus-surface value computed directly on `Ω`.
pub fn fubini_residual(
    u: &DisplacementField,
    void: &VoidSet,
    xi: [f64; 2],
    eps: f64,
    p: f64,
    norm: &SurfaceNorm,
    line_spacing: f64,
) -> Result<FubiniReport> {
    check_direction(xi)?;
    if !(line_spacing > 0.0 && eps > 0.0 && p > 1.0) {
        return invalid("fubini_residual needs line_spacing > 0, eps > 0 and p > 1");
    }
    let dual = norm.dual(xi);
    let g = u.grid();
    let eta = [-xi[1], xi[0]];
    let (x0, x1) = g.x_range();
    let (y0, y1) = g.y_range();
    let proj: Vec<f64> = [[x0, y0], [x1, y0], [x0, y1], [x1, y1]]
        .iter()
        .map(|c| dot(*c, eta))
        .collect();
    let s_min = proj.iter().cloned().fold(f64::INFINITY, f64::min);
    let s_max = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lines = ((s_max - s_min) / line_spacing - 1e-9).ceil().max(1.0) as usize;
    let spacing = (s_max - s_min) / lines as f64;
    let step = 0.5 * g.hx().min(g.hy());
    let mut lhs = 0.0;
    for k in 0..lines {
        let s = s_min + (k as f64 + 0.5) * spacing;
        let slice = take_slice(u, void, xi, [s * eta[0], s * eta[1]], step)?;
        lhs += f_eps_xi(&slice, eps, p, dual) * spacing;
    }
    let bulk = integrate_outside(u, void, |z| {
        let e = sym(z);
        let exx = xi[0] * (e[0][0] * xi[0] + e[0][1] * xi[1])
            + xi[1] * (e[1][0] * xi[0] + e[1][1] * xi[1]);
        exx.abs().powf(p)
    });
    let surface: f64 = void
        .boundary()
        .iter()
        .filter(|s| segment_on_side(g, s).is_none())
        .map(|s| dot(s.normal, xi).abs() * s.length())
        .sum::<f64>()
        / dual;
    let rhs = eps * bulk + surface;
    Ok(FubiniReport {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        lines,
    })
}

/// Outcome of comparing a sequence of sharp energies with the relaxed
/// energy of its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    /// `F(u_n, E_n)` along the sequence.
    pub energies: Vec<f64>,
    /// `F̄(u, E)` of the limit (cracks counted twice).
    pub limit: f64,
    /// `F(u_n, E_n) − F̄(u, E)`.
    pub gaps: Vec<f64>,
    pub passed: bool,
}

/// Evaluates the lower-bound inequality `F̄(limit) <= liminf F(sequence)`
/// along an explicit sequence; passes when the last gap is `>= −tol`.
pub fn collapse_lowerbound_check(
    sequence: &[VoidConfig],
    limit: &VoidConfig,
    density: &ElasticDensity,
    norm: &SurfaceNorm,
    tol: f64,
) -> Result<CollapseReport> {
    let energies = sequence
        .iter()
        .map(|c| energy_f(c, density, norm).map(|e| e.total))
        .collect::<Result<Vec<_>>>()?;
    let limit = energy_f_relaxed(limit, density, norm)?.total;
    let gaps: Vec<f64> = energies.iter().map(|e| e - limit).collect();
    let passed = gaps.last().map_or(true, |g| *g >= -tol);
    Ok(CollapseReport {
        energies,
        limit,
        gaps,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn slice_functional_examples() {
        let s = Slice1D::from_fn(0.0, 1.0, &[(0.3, 0.5)], 0.01, |t| t);
        assert!((f_eps_xi(&s, 0.1, 2.0, 1.0) - 2.08).abs() < 1e-12);
        let c = Slice1D::from_fn(0.0, 1.0, &[], 0.01, |_| 3.0);
        assert_eq!(f_eps_xi(&c, 0.1, 2.0, 1.0), 0.0);
        let edge = Slice1D::from_fn(0.0, 1.0, &[(0.0, 0.5)], 0.01, |_| 0.0);
        assert_eq!(f_eps_xi(&edge, 0.1, 2.0, 2.0), 0.5);
    }

    #[test]
    fn affine_slices() {
        let g = Grid::rect((0.0, 1.0), (0.0, 1.0), 8, 8).unwrap();
        let a = [[0.3, -0.1], [0.2, 0.5]];
        let u = DisplacementField::from_fn(&g, |p| {
            [
                a[0][0] * p[0] + a[0][1] * p[1],
                a[1][0] * p[0] + a[1][1] * p[1],
            ]
        });
        let xi = [0.6, 0.8];
        let s = take_slice(&u, &VoidSet::empty(), xi, [-0.4, 0.3], 0.01).unwrap();
        let slope = xi[0] * (a[0][0] * xi[0] + a[0][1] * xi[1])
            + xi[1] * (a[1][0] * xi[0] + a[1][1] * xi[1]);
        for piece in &s.pieces {
            for w in piece.ts.windows(2).zip(piece.values.windows(2)) {
                let (t, v) = w;
                assert!(((v[1] - v[0]) / (t[1] - t[0]) - slope).abs() < 1e-12);
            }
        }
        assert!(s.void.is_empty());
        let b = VoidSet::rectangle(0.2, 0.7, 0.4, 0.6).unwrap();
        let s = take_slice(&u, &b, [1.0, 0.0], [0.0, 0.5], 0.01).unwrap();
        assert_eq!(s.void.len(), 1);
        assert!((s.void[0].1 - s.void[0].0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let g = Grid::rect((0.0, 1.0), (0.0, 1.0), 8, 8).unwrap();
        let u = DisplacementField::zeros(&g);
        let r = fubini_residual(
            &u,
            &VoidSet::empty(),
            [1.0, 0.0],
            0.1,
            2.0,
            &SurfaceNorm::Euclidean,
            1.0 / 64.0,
        )
        .unwrap();
        assert_eq!(r.residual, 0.0);
    }
}
