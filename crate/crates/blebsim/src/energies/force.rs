//! The momentum-balance force `K` and the total-energy report.

use serde::{Deserialize, Serialize};

use crate::fields::{gradient, ScalarField, VectorField};
use crate::util::chunk_sum_with;

use super::coupling::{
    coupling_energy_with, coupling_gradient_cortex_with, coupling_gradient_membrane_with,
    linker_forces_with, CouplingContext,
};
use super::gl::{
    chemical_potential, gl_density, phase_bc, willmore_energy, willmore_gradient_from_mu,
};
use super::params::ModelParams;
use super::EnergyError;

/// Energy bookkeeping of one state; `total` is the sum of the parts.
/// `dissipation_estimate` is filled by the solver (discrete right-hand side
/// of the energy inequality) and zero when not tracked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub gl_m: f64,
    pub gl_c: f64,
    pub willmore_m: f64,
    pub willmore_c: f64,
    pub coupling: f64,
    pub total: f64,
    pub dissipation_estimate: f64,
}

impl EnergyReport {
    /// Free energy (everything but kinetic).
    pub fn free(&self) -> f64 {
        self.total - self.kinetic
    }
}

/// Full force `K` of the momentum balance: the four energy-gradient
/// transport terms plus the two linker force integrals.
pub fn force_k(
    u: Option<&VectorField>,
    phi_m: &ScalarField,
    phi_c: &ScalarField,
    c_a: &ScalarField,
    params: &ModelParams,
) -> Result<VectorField, EnergyError> {
    let _ = u;
    let grid = phi_m.grid().clone();
    let bc = phase_bc(&grid);
    let dim = grid.dim();
    let n = grid.len();

    let mut w_m = scaled_surface_gradient(phi_m, params.sigma_m, params.bend_m, params)?;
    let mut w_c = scaled_surface_gradient(phi_c, params.sigma_c, params.bend_c, params)?;

    let mut force = VectorField::zeros(&grid);
    if params.spring_k != 0.0 {
        let ctx = CouplingContext::new(phi_m, phi_c, c_a, params)?;
        let grad_m = coupling_gradient_membrane_with(&ctx, phi_m, params)?;
        let grad_c = coupling_gradient_cortex_with(&ctx, phi_c, params)?;
        for i in 0..n {
            w_m.values_mut()[i] += grad_m.total.values()[i];
            w_c.values_mut()[i] += grad_c.total.values()[i];
        }
        let linker = linker_forces_with(&ctx, phi_c, params)?;
        for a in 0..dim {
            let comp = force.comp_mut(a);
            for i in 0..n {
                comp[i] = linker.g_term.at(a, i) + linker.h_term.at(a, i);
            }
        }
    }

    let grad_phi_m = gradient(phi_m, bc)?;
    let grad_phi_c = gradient(phi_c, bc)?;
    for a in 0..dim {
        let comp = force.comp_mut(a);
        for i in 0..n {
            comp[i] += w_m.values()[i] * grad_phi_m.at(a, i) + w_c.values()[i] * grad_phi_c.at(a, i);
        }
    }
    Ok(force)
}

/// `σ μ(φ) + b (-Δμ + μ W''/ε²)`: L² gradient of one phase field's surface
/// energy (GL plus bending).
pub fn scaled_surface_gradient(
    phi: &ScalarField,
    sigma: f64,
    rigidity: f64,
    params: &ModelParams,
) -> Result<ScalarField, EnergyError> {
    let mu = chemical_potential(phi, params)?;
    let mut out = if rigidity != 0.0 {
        let w = willmore_gradient_from_mu(phi, &mu, params)?;
        ScalarField::from_values(
            phi.grid(),
            w.values().iter().map(|v| rigidity * v).collect(),
        )?
    } else {
        ScalarField::zeros(phi.grid())
    };
    for (o, &m) in out.values_mut().iter_mut().zip(mu.values()) {
        *o += sigma * m;
    }
    Ok(out)
}

/// All energies of a state.
pub fn total_energy(
    u: &VectorField,
    phi_m: &ScalarField,
    phi_c: &ScalarField,
    c_a: &ScalarField,
    params: &ModelParams,
) -> Result<EnergyReport, EnergyError> {
    let grid = phi_m.grid();
    let n = grid.len();
    let dim = grid.dim();
    let mut kin = 0.0;
    for c in 0..dim {
        let comp = u.comp(c);
        kin += chunk_sum_with(n, |i| comp[i] * comp[i]);
    }
    let kinetic = 0.5 * params.rho * kin * grid.cell_volume();

    let gl_m = params.sigma_m * crate::fields::integrate(&gl_density(phi_m, params)?);
    let gl_c = params.sigma_c * crate::fields::integrate(&gl_density(phi_c, params)?);
    let willmore_m = willmore_energy(phi_m, params.bend_m, params)?;
    let willmore_c = willmore_energy(phi_c, params.bend_c, params)?;
    let coupling = if params.spring_k != 0.0 {
        let ctx = CouplingContext::new(phi_m, phi_c, c_a, params)?;
        coupling_energy_with(&ctx, params)
    } else {
        0.0
    };
    let total = kinetic + gl_m + gl_c + willmore_m + willmore_c + coupling;
    Ok(EnergyReport {
        kinetic,
        gl_m,
        gl_c,
        willmore_m,
        willmore_c,
        coupling,
        total,
        dissipation_estimate: 0.0,
    })
}
