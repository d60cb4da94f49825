use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::elastic::ElasticDensity;
use crate::error::{invalid, Result};
use crate::geometry::JumpSet;
use crate::grid::{DisplacementField, Grid};
use crate::profile::Profile;
use crate::recovery::phasefield_recovery;
use crate::sharp::film_bulk;

use super::alternate::{alternate_minimize, PhaseState};
use super::extract::{extract_profile, l1_to_subgraph};
use super::PhaseParams;

/// Initial phase field policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    /// Recovery field of the flat profile at the volume target.
    Flat,
    /// Flat profile plus a few random cosine modes of the given amplitude.
    Perturbed { amplitude: f64, seed: u64 },
}

/// A film experiment: geometry, substrate mismatch `u₀ = (δ x₁, 0)`,
/// optional volume target and initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub width: f64,
    pub cap: f64,
    pub nx: usize,
    pub ny: usize,
    pub mismatch: f64,
    pub volume: Option<f64>,
    pub init: Init,
}

impl Scenario {
    pub fn grid(&self) -> Result<Grid> {
        Grid::film(self.width, self.cap, self.nx, self.ny)
    }

    /// `u₀ = (δ x₁, 0)`, also used as the initial displacement.
    pub fn substrate_datum(&self, grid: &Grid) -> DisplacementField {
        let d = self.mismatch;
        DisplacementField::from_fn(grid, |p| [d * p[0], 0.0])
    }

    /// Initial profile: flat at `m/L` (or `M/2` without a volume target),
    /// optionally perturbed.
    pub fn initial_profile(&self, grid: &Grid) -> Result<Profile> {
        let h0 = self.volume.map_or(0.5 * self.cap, |m| m / self.width);
        let xs: Vec<f64> = (0..grid.nodes_x()).map(|i| grid.x(i)).collect();
        let hs: Vec<f64> = match self.init {
            Init::Flat => vec![h0; xs.len()],
            Init::Perturbed { amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let modes: Vec<(f64, f64)> = (1..=4)
                    .map(|_| {
                        (
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect();
                xs.iter()
                    .map(|&x| {
                        let s: f64 = modes
                            .iter()
                            .enumerate()
                            .map(|(k, (c, ph))| {
                                c * (std::f64::consts::TAU * (k + 1) as f64 * x / self.width + ph)
                                    .cos()
                            })
                            .sum();
                        (h0 + amplitude * s / 4.0).clamp(0.0, self.cap)
                    })
                    .collect()
            }
        };
        Profile::smooth(xs, hs)
    }

    pub fn initial_state(&self, params: &PhaseParams) -> Result<PhaseState> {
        let grid = self.grid()?;
        let h = self.initial_profile(&grid)?;
        let v = phasefield_recovery(&h, &grid, params.eps, params.well, &JumpSet::empty())?;
        Ok(PhaseState {
            u: self.substrate_datum(&grid),
            v,
        })
    }
}

/// One row of a Γ-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub total: f64,
    pub elastic: f64,
    /// `c_W ∫ W(v)/ε + ε/2 |∇v|²`.
    pub surface_proxy: f64,
    /// `∫ |v − χ|` against the subgraph of the extracted `h^{1/2}`.
    pub l1_to_sharp: f64,
    /// `Ḡ` of the extracted configuration (bulk over `Ω_h⁺` plus graph length).
    pub relaxed_total: f64,
    pub profile: Option<Profile>,
    pub state: Option<PhaseState>,
    pub converged: bool,
    pub monotone: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(eps: f64, message: String) -> Self {
        SweepRow {
            eps,
            total: f64::NAN,
            elastic: f64::NAN,
            surface_proxy: f64::NAN,
            l1_to_sharp: f64::NAN,
            relaxed_total: f64::NAN,
            profile: None,
            state: None,
            converged: false,
            monotone: false,
            error: Some(message),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.eps, self.total, self.elastic, self.surface_proxy, self.l1_to_sharp
        )
    }
}

/// Number of worker threads: `SFL_THREADS` when set, else rayon's default.
pub(crate) fn thread_cap() -> Option<usize> {
    std::env::var("SFL_THREADS")
        .ok()?
        .parse()
        .ok()
        .filter(|n| *n > 0)
}

fn run_one(
    eps: f64,
    scenario: &Scenario,
    base: &PhaseParams,
    density: &ElasticDensity,
) -> Result<SweepRow> {
    let mut params = base.clone();
    let schedule = base.eta / base.eps.powf(base.p);
    params.eps = eps;
    params.eta = schedule * eps.powf(base.p);
    params.volume = scenario.volume;
    let init = scenario.initial_state(&params)?;
    let grid = init.v.grid().clone();
    let u0 = scenario.substrate_datum(&grid);
    let result = alternate_minimize(init, &params, density, &u0)?;
    let h = extract_profile(&result.state.v, 0.5, params.tilt)?;
    let relaxed_total = film_bulk(&result.state.u, &h, density) + h.graph_length();
    Ok(SweepRow {
        eps,
        total: result.energy.total,
        elastic: result.energy.elastic,
        surface_proxy: result.energy.surface(),
        l1_to_sharp: l1_to_subgraph(&result.state.v, &h),
        relaxed_total,
        monotone: result.is_monotone(1e-12),
        converged: result.converged,
        profile: Some(h),
        state: Some(result.state),
        error: None,
    })
}

/// Runs `alternate_minimize` for each `ε` (independently, in parallel) and
/// collects the sweep table in input order. Per-`ε` failures are recorded
/// in the row and do not stop the sweep.
pub fn gamma_sweep(
    eps_list: &[f64],
    scenario: &Scenario,
    base: &PhaseParams,
    density: &ElasticDensity,
) -> Result<Vec<SweepRow>> {
    if eps_list.is_empty() || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return invalid("the eps list must be non-empty and strictly decreasing");
    }
    let work = || -> Vec<SweepRow> {
        eps_list
            .par_iter()
            .map(|&eps| {
                run_one(eps, scenario, base, density)
                    .unwrap_or_else(|e| SweepRow::failed(eps, e.to_string()))
            })
            .collect()
    };
    let rows = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    };
    Ok(rows)
}
