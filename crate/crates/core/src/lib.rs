//! Sharp, relaxed and phase-field energies for material voids and
//! epitaxially strained films in two dimensions.
//!
//! The crate evaluates the sharp film and void energies and their relaxations,
//! checks the slicing identities behind the lower bound, minimizes the
//! phase-field energy `G_ε` and builds recovery sequences.

pub mod elastic;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod metric;
pub mod norm;
pub mod phasefield;
pub mod profile;
pub mod recovery;
pub mod sharp;
pub mod slicing;

/// A 2x2 matrix stored row-major: `m[a][b]`.
pub type Mat2 = [[f64; 2]; 2];

pub use elastic::{check_growth, ElasticDensity, GrowthConstants};
pub use error::{Error, Result};
pub use geometry::{JumpSet, Point, Rect, Segment, VoidSet};
pub use grid::{DisplacementField, Grid, PhaseField};
pub use metric::{dbar, ExtValue, ExtendedField};
pub use norm::{dual_norm_residual, phi_dual, SurfaceNorm};
pub use phasefield::{
    alternate_minimize, energy_geps, extract_profile, gamma_sweep, solve_u, solve_v,
    volume_projection, ElasticBoundary, PhaseEnergy, PhaseParams, PhaseState, Scenario, Well,
};
pub use profile::{Jump, Piece, Profile, ProfileKind};
pub use recovery::{graph_approx, phasefield_recovery, volume_rescale, RecoveryParams};
pub use sharp::{
    energy_f, energy_f_relaxed, energy_fdir_relaxed, energy_g, energy_g_relaxed,
    vertical_extension, FilmConfig, VoidConfig,
};
pub use slicing::{f_eps_xi, fubini_residual, take_slice, Slice1D};

/// Guide chapters compiled as doc-tests.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/grid.md")]
    pub mod grid {}
    #[doc = include_str!("../../../book/src/norms.md")]
    pub mod norms {}
    #[doc = include_str!("../../../book/src/film.md")]
    pub mod film {}
    #[doc = include_str!("../../../book/src/voids.md")]
    pub mod voids {}
    #[doc = include_str!("../../../book/src/metric.md")]
    pub mod metric {}
    #[doc = include_str!("../../../book/src/phasefield.md")]
    pub mod phasefield {}
    #[doc = include_str!("../../../book/src/recovery.md")]
    pub mod recovery {}
}
