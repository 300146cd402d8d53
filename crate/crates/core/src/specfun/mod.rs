//! Special functions and quadrature behind the error-rate bounds.
//!
//! All functions are pure and generic over [`Real`](crate::Real). Gamma-type
//! quantities are evaluated in the log domain so block lengths up to a few
//! hundred do not overflow.

mod beta;
mod chi;
mod gamma;
mod quad;
mod sphere;

use thiserror::Error;

pub use beta::{reg_inc_beta, IncBeta, CLAMP_TOL};
pub use chi::{
    chi_cdf, chi_pdf, chi_sf, radial_density, tail_cutoff_radius, RadialDensity, TAIL_CUTOFF_MASS,
};
pub use gamma::{gaussian_q, reg_gamma_p, reg_gamma_q};
pub use quad::{integrate, Integral, QuadratureSpec};
pub use sphere::{cap_area_fraction, sphere_surface_area, CapFraction};



#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid integration limits [{lo}, {hi}]")]
    InvalidLimits { lo: f64, hi: f64 },
    #[error("integrand not finite at {at}")]
    NonFinite { at: f64 },
    #[error(
        "quadrature did not converge: estimate {value:e} with error {abs_error:e} after {subdivisions} subintervals"
    )]
    NotConverged { value: f64, abs_error: f64, subdivisions: usize },
}
