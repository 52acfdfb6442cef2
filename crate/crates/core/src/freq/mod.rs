//! Dyadic cutoffs, radial profiles and radial Fourier transforms.

pub mod cutoff;
pub mod profile;
pub mod spline;
pub mod transform;

pub use cutoff::{build_cutoff, psi, CutoffProfile, DyadicBand};
pub use profile::{
    default_grid, fmt17, log_grid, lp_norm_radial, origin_log_grid, sphere_area, uniform_grid, GridKind, LpNorm,
    RadialProfile,
};
pub use transform::{band_project, band_spectrum, profile_density, radial_fourier, RadialDensity, TransformValue};
