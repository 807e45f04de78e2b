//! Numerical verification of the expansion identities and the ε → 0 limits:
//! transverse profile residuals, the concentration of diffuse integrals onto
//! surfaces, and convergence studies of diffuse interfacial forces against
//! sharp-interface quadrature oracles.

mod diffuse;
mod expansion;
mod force_limit;
mod oracle;
mod sharp;

pub use diffuse::{concentration_integral, diffuse_surface_force, tube_grid, SurfaceForceKind};
pub use expansion::{
    e_coefficients, mu_expansion, optimal_profile_ode_residual, profile_ode_residual, s1_check,
    s1_residual, ECoefficients, ExpansionSeries, MuExpansion,
};
pub use force_limit::{
    coupling_force_study, gl_force_study, localized_blob, radial_bump, rotational_bump,
    willmore_force_study, ConvergenceStudy, CouplingFamily, CouplingStudy, CouplingStudyConfig,
    WillmoreStudy,
};
pub use oracle::{PairOracle, SurfaceNode, SurfaceQuadrature};
pub use sharp::SharpCoupling;

use thiserror::Error;

use crate::geometry::{Profile, ProfileGrid, Surface};

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("kernel mass outside the tube exceeds 1e-6 (ε too large for δ = {delta})")]
    KernelEscapesTube { delta: f64 },
}

/// Concentration-lemma evaluation `ε⁻¹ ∫ p(d/ε) f dx` with the kernel-mass
/// precondition checked against the surface's tube half-width.
pub fn concentration_limit(
    surface: &Surface,
    eps: f64,
    h: f64,
    p: impl Fn(f64) -> f64 + Sync,
    f: impl Fn([f64; 3]) -> f64 + Sync,
) -> Result<f64, AsymptoticsError> {
    let delta = surface.feature_radius() / 4.0;
    let z_tube = delta / eps;
    let grid = ProfileGrid::new(2.0 * z_tube.max(20.0), 1e-2).unwrap();
    let kernel = Profile::sample(grid, &p);
    let total = kernel.map(f64::abs).integrate();
    let outside = Profile::sample(grid, |z| if z.abs() > z_tube { p(z).abs() } else { 0.0 })
        .integrate();
    if outside > 1e-6 * total {
        return Err(AsymptoticsError::KernelEscapesTube { delta });
    }
    Ok(concentration_integral(surface, eps, h, z_tube, p, f))
}
