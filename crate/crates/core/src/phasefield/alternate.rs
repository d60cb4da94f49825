use crate::elastic::ElasticDensity;
use crate::error::{Error, Result};
use crate::geometry::JumpSet;
use crate::grid::{DisplacementField, PhaseField};
use crate::recovery::{phasefield_recovery, volume_rescale};

use super::energy::{energy_geps, PhaseEnergy};
use super::extract::extract_profile;
use super::solve_u::solve_u;
use super::solve_v::solve_v;
use super::PhaseParams;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub u: DisplacementField,
    pub v: PhaseField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Start,
    U,
    V,
    /// Volume projection; not a descent step.
    Volume,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub outer: usize,
    pub step: Step,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternateResult {
    pub state: PhaseState,
    pub energy: PhaseEnergy,
    pub trace: Vec<TraceEntry>,
    pub outer_iterations: usize,
    pub converged: bool,
}

impl AlternateResult {
    /// Whether every descent half-step kept the energy within `slack` (relative).
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.trace.windows(2).all(|w| {
            w[1].step == Step::Volume || w[1].total <= w[0].total + slack * w[0].total.abs()
        })
    }
}

/// Rescales the extracted profile `h^{1/2}` to volume `m` and rebuilds `v`
/// as its recovery field.
pub fn volume_projection(v: &PhaseField, m: f64, params: &PhaseParams) -> Result<PhaseField> {
    let g = v.grid();
    let Some(cap) = g.height_cap() else {
        return Err(Error::Precondition(
            "volume projection needs a film grid".to_string(),
        ));
    };
    let h = extract_profile(v, 0.5, params.tilt)?;
    let h_star = volume_rescale(&h, m, cap, params.truncation)?;
    phasefield_recovery(&h_star, g, params.eps, params.well, &JumpSet::empty())
}

/// Alternates the elastic solve and the phase-field descent until the
/// relative decrease over one outer iteration drops below `tol_energy`.
pub fn alternate_minimize(
    init: PhaseState,
    params: &PhaseParams,
    density: &ElasticDensity,
    u0: &DisplacementField,
) -> Result<AlternateResult> {
    init.v.check_admissible()?;
    let g = init.v.grid().clone();
    g.same_as(init.u.grid())?;
    g.same_as(u0.grid())?;
    let mut u = init.u;
    if let Some(top) = g.substrate_top_row() {
        for j in 0..=top {
            for i in 0..g.nodes_x() {
                let k = g.node(i, j);
                u.values_mut()[k] = u0.values()[k];
            }
        }
    }
    let mut v = init.v;
    let mut e = energy_geps(&u, &v, params, density)?;
    let mut trace = vec![TraceEntry {
        outer: 0,
        step: Step::Start,
        total: e.total,
    }];
    let mut converged = false;
    let mut outer = 0;
    while outer < params.max_outer {
        outer += 1;
        let e_outer = e.total;

        let (u_new, _) = solve_u(&u, &v, params, density, u0)?;
        let e_u = energy_geps(&u_new, &v, params, density)?;
        if e_u.total <= e.total {
            u = u_new;
            e = e_u;
        }
        trace.push(TraceEntry {
            outer,
            step: Step::U,
            total: e.total,
        });

        let (v_new, _) = solve_v(&u, &v, params, density)?;
        let e_v = energy_geps(&u, &v_new, params, density)?;
        if e_v.total <= e.total {
            v = v_new;
            e = e_v;
        }
        trace.push(TraceEntry {
            outer,
            step: Step::V,
            total: e.total,
        });

        let mut projected = false;
        if let Some(m) = params.volume {
            let h = extract_profile(&v, 0.5, params.tilt)?;
            if (h.integral() - m).abs() > 0.5 * g.hy() * g.width() {
                v = volume_projection(&v, m, params)?;
                e = energy_geps(&u, &v, params, density)?;
                trace.push(TraceEntry {
                    outer,
                    step: Step::Volume,
                    total: e.total,
                });
                projected = true;
            }
        }

        if !projected && (e_outer - e.total) <= params.tol_energy * e_outer.abs() {
            converged = true;
            break;
        }
    }
    Ok(AlternateResult {
        state: PhaseState { u, v },
        energy: e,
        trace,
        outer_iterations: outer,
        converged,
    })
}
