//! The phase-field energy
//! `G_ε(u, v) = ∫ (v² + η_ε) f(e(u)) + c_W (W(v)/ε + ε/2 |∇v|²)`
//! under the constraints `v = 1` below `x_d = 0`, `v = 0` above `x_d = M`
//! and `∂_d v <= 0`, together with its constrained minimization.

mod alternate;
mod energy;
mod extract;
mod pava;
mod solve_u;
mod solve_v;
mod sweep;

pub use alternate::{
    alternate_minimize, volume_projection, AlternateResult, PhaseState, Step, TraceEntry,
};
pub use energy::{energy_geps, CellFields, PhaseEnergy};
pub use extract::{extract_profile, l1_to_subgraph, tilt};
pub use pava::{pava_nonincreasing, project_column};
pub use solve_u::{solve_u, CgStats};
pub use solve_v::{solve_v, VStats};
pub use sweep::{gamma_sweep, Init, Scenario, SweepRow};

use crate::error::{invalid, Error, Result};

/// The double-well potential `W` with `W(0) = W(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Well {
    /// `s²(1−s)²`
    DoubleWell,
    /// `s(1−s)`
    Obstacle,
}

impl Well {
    #[inline]
    pub fn w(self, s: f64) -> f64 {
        match self {
            Well::DoubleWell => s * s * (1.0 - s) * (1.0 - s),
            Well::Obstacle => s * (1.0 - s),
        }
    }

    #[inline]
    pub fn dw(self, s: f64) -> f64 {
        match self {
            Well::DoubleWell => 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s),
            Well::Obstacle => 1.0 - 2.0 * s,
        }
    }

    /// `(∫₀¹ √(2W(s)) ds)^{-1}`, by composite Simpson after the substitution
    /// `s = (1 − cos θ)/2`, which removes the endpoint square-root behavior.
    pub fn c_w(self) -> f64 {
        let n = 4096;
        let h = std::f64::consts::PI / n as f64;
        let g = |theta: f64| {
            let s = 0.5 * (1.0 - theta.cos());
            (2.0 * self.w(s)).max(0.0).sqrt() * 0.5 * theta.sin()
        };
        let mut sum = g(0.0) + g(std::f64::consts::PI);
        for k in 1..n {
            sum += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        1.0 / (sum * h / 3.0)
    }
}

/// How the elastic subproblem is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElasticBoundary {
    /// `u = u₀` on the substrate rows `x_d <= 0`, natural conditions elsewhere.
    Substrate,
    /// `u = u₀` additionally on the whole outer boundary (patch tests).
    Clamped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseParams {
    pub eps: f64,
    pub eta: f64,
    pub well: Well,
    pub c_w: f64,
    pub p: f64,
    /// Relative energy decrease that stops the outer loop and the v-solver.
    pub tol_energy: f64,
    /// Relative residual for conjugate gradients.
    pub tol_cg: f64,
    pub max_outer: usize,
    pub max_cg: usize,
    pub max_v_iters: usize,
    /// Target `∫ h = m`, enforced by rescaling between outer iterations.
    pub volume: Option<f64>,
    pub boundary: ElasticBoundary,
    /// Tilt `δ` applied before profile extraction, `ṽ = 0 ∨ (v − δ x_d) ∧ 1`.
    pub tilt: Option<f64>,
    /// Truncation depth below `M` used when rescaling a profile touching the cap.
    pub truncation: f64,
}

impl PhaseParams {
    /// Defaults: `η = ε^p`, double-well `W`.
    pub fn new(eps: f64, p: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return invalid(format!("eps must be positive, got {eps}"));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Precondition(format!("need 1 < p < inf, got {p}")));
        }
        let well = Well::DoubleWell;
        Ok(PhaseParams {
            eps,
            eta: eps.powf(p),
            well,
            c_w: well.c_w(),
            p,
            tol_energy: 1e-8,
            tol_cg: 1e-10,
            max_outer: 20,
            max_cg: 20_000,
            max_v_iters: 3000,
            volume: None,
            boundary: ElasticBoundary::Substrate,
            tilt: None,
            truncation: 1e-3,
        })
    }

    pub fn with_well(mut self, well: Well) -> Self {
        self.well = well;
        self.c_w = well.c_w();
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return invalid(format!("eta must be positive, got {eta}"));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn with_volume(mut self, m: f64) -> Self {
        self.volume = Some(m);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_constants() {
        assert!((Well::DoubleWell.c_w() - 3.0 * 2f64.sqrt()).abs() < 1e-6);
        // ∫ √(2 s(1−s)) = √2 π/8
        let exact = 8.0 / (2f64.sqrt() * std::f64::consts::PI);
        assert!((Well::Obstacle.c_w() - exact).abs() < 1e-6);
    }

    #[test]
    fn well_derivatives() {
        for well in [Well::DoubleWell, Well::Obstacle] {
            for k in 1..10 {
                let s = k as f64 / 10.0;
                let fd = (well.w(s + 1e-6) - well.w(s - 1e-6)) / 2e-6;
                assert!((fd - well.dw(s)).abs() < 1e-8);
                assert!(well.w(s) > 0.0);
            }
            assert_eq!((well.w(0.0), well.w(1.0)), (0.0, 0.0));
        }
    }

    #[test]
    fn parameter_validation() {
        let p = PhaseParams::new(0.1, 2.0).unwrap();
        assert!((p.eta - 0.01).abs() < 1e-15);
        assert!(PhaseParams::new(0.0, 2.0).is_err());
        assert!(PhaseParams::new(0.1, 1.0).is_err());
    }
}
