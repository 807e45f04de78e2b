//! Time integration of the coupled system: IMEX phase-field evolution,
//! Chorin projection for the fluid, GL-weighted species transport, and the
//! energy-inequality monitor.

mod fluid;
mod linsolve;
mod phase;
mod species;
mod state;

pub use fluid::step_fluid;
pub use species::{reaction_rate, weighted_species_mass};
pub use state::{PhaseState, StepConfig};

use thiserror::Error;

use crate::energies::{
    chemical_potential, coupling_gradient_cortex_from, coupling_gradient_membrane_with,
    gl_density, linker_forces_from, phase_bc, scaled_surface_gradient, total_energy,
    CouplingContext, EnergyError, EnergyReport, ModelParams,
};
use crate::fields::{gradient, inner_product_vec, laplacian, ScalarField, VectorField};

use phase::{imex_phase_update, ImplicitPhaseOp};
use species::{step_one_species, SpeciesWorkspace};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("linear solver failed: {0}")]
    LinearSolve(String),
    #[error("CFL violation: {cfl:.3} exceeds cap {cap:.3}")]
    CflViolation { cfl: f64, cap: f64 },
    #[error("state invariant violated: {0}")]
    StateInvariant(String),
    #[error("energy blow-up at step {step}: total {total:.3e} exceeds 10x initial {initial:.3e}")]
    EnergyBlowup { step: usize, total: f64, initial: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Field(#[from] crate::fields::FieldError),
}

/// Everything `run` hands back per step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub report: EnergyReport,
    pub max_div_u: f64,
}

/// Outcome of a completed run.
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub state: PhaseState,
}

/// One full operator-split step: force assembly, fluid, phases, species.
pub fn step(
    state: &PhaseState,
    params: &ModelParams,
    cfg: &StepConfig,
) -> Result<(PhaseState, f64), SolverError> {
    let grid = state.grid().clone();
    let n = grid.len();
    let bc = phase_bc(&grid);

    // Shared coupling context for force, both gradients, and the species
    // coupling terms.
    let coupling = if params.spring_k != 0.0 {
        Some(CouplingContext::new(&state.phi_m, &state.phi_c, &state.c_a, params)?)
    } else {
        None
    };

    let mut w_m = scaled_surface_gradient(&state.phi_m, params.sigma_m, params.bend_m, params)?;
    let mut w_c = scaled_surface_gradient(&state.phi_c, params.sigma_c, params.bend_c, params)?;
    let mut force = VectorField::zeros(&grid);
    if let Some(ctx) = &coupling {
        let gm = coupling_gradient_membrane_with(ctx, &state.phi_m, params)?;
        let ints = ctx.membrane_integrals(params);
        let gc = coupling_gradient_cortex_from(ctx, &ints, &state.phi_c, params)?;
        let lf = linker_forces_from(ctx, &ints, &state.phi_c, params)?;
        for i in 0..n {
            w_m.values_mut()[i] += gm.total.values()[i];
            w_c.values_mut()[i] += gc.total.values()[i];
        }
        for a in 0..grid.dim() {
            let comp = force.comp_mut(a);
            for i in 0..n {
                comp[i] = lf.g_term.at(a, i) + lf.h_term.at(a, i);
            }
        }
    }
    let grad_phi_m = gradient(&state.phi_m, bc)?;
    let grad_phi_c = gradient(&state.phi_c, bc)?;
    for a in 0..grid.dim() {
        let comp = force.comp_mut(a);
        for i in 0..n {
            comp[i] += w_m.values()[i] * grad_phi_m.at(a, i) + w_c.values()[i] * grad_phi_c.at(a, i);
        }
    }

    // Fluid step.
    let (u_new, p_new, max_div) = if cfg.evolve_fluid {
        step_fluid(&state.u, &force, params, cfg)?
    } else {
        (state.u.clone(), state.p.clone(), 0.0)
    };

    // Phase steps, advanced with the updated velocity.
    let (phi_m_new, phi_c_new) = if cfg.evolve_phases {
        let mobility = cfg.mobility_override.unwrap_or_else(|| params.mobility());
        let step_field = |phi: &ScalarField,
                          w: &ScalarField,
                          sigma: f64,
                          rigidity: f64|
         -> Result<ScalarField, SolverError> {
            // rhs_ex = m Δw - u·∇φ.
            let mut rhs = laplacian(w, bc)?;
            let gphi = gradient(phi, bc)?;
            for i in 0..n {
                let mut adv = 0.0;
                for a in 0..grid.dim() {
                    adv += u_new.at(a, i) * gphi.at(a, i);
                }
                let v = rhs.values()[i] * mobility - adv;
                rhs.values_mut()[i] = v;
            }
            if mobility == 0.0 {
                // Pure transport: plain explicit update.
                let values = (0..n)
                    .map(|i| phi.values()[i] + cfg.dt * rhs.values()[i])
                    .collect();
                return Ok(ScalarField::from_values(&grid, values).map_err(EnergyError::from)?);
            }
            let op = ImplicitPhaseOp::new(sigma, rigidity, params, cfg);
            let (next, _iters) = imex_phase_update(phi, &rhs, &op, cfg)?;
            Ok(next)
        };
        (
            step_field(&state.phi_m, &w_m, params.sigma_m, params.bend_m)?,
            step_field(&state.phi_c, &w_c, params.sigma_c, params.bend_c)?,
        )
    } else {
        (state.phi_m.clone(), state.phi_c.clone())
    };

    // Species step on the old cortex tube with the new velocity.
    let (c_a_new, c_i_new) = if cfg.evolve_species {
        let ws = SpeciesWorkspace::new(&state.phi_c, params)?;
        let r = reaction_rate(&state.c_a, &state.c_i, &state.phi_m, None, params);
        let c_a = step_one_species(
            &state.c_a,
            &ws,
            &u_new,
            &r,
            1.0,
            params.diff_active,
            params,
            cfg,
        )?;
        let c_i = step_one_species(
            &state.c_i,
            &ws,
            &u_new,
            &r,
            -1.0,
            params.diff_inactive,
            params,
            cfg,
        )?;
        (c_a, c_i)
    } else {
        (state.c_a.clone(), state.c_i.clone())
    };

    let next = PhaseState {
        t: state.t + cfg.dt,
        u: u_new,
        p: p_new,
        phi_m: phi_m_new,
        phi_c: phi_c_new,
        c_a: c_a_new,
        c_i: c_i_new,
    };
    Ok((next, max_div))
}

/// Time loop with the energy monitor: per-step [`EnergyReport`]s, halting on
/// blow-up (total above ten times the initial total) or invariant violation
/// with the last good state preserved inside the error path by the caller.
pub fn run(
    mut state: PhaseState,
    params: &ModelParams,
    cfg: &StepConfig,
    n_steps: usize,
    mut on_step: impl FnMut(&StepRecord, &PhaseState),
) -> Result<Trajectory, (SolverError, Box<PhaseState>)> {
    params.validate().map_err(|e| (SolverError::from(e), Box::new(state.clone())))?;
    let mut records = Vec::with_capacity(n_steps + 1);
    let initial = total_energy(&state.u, &state.phi_m, &state.phi_c, &state.c_a, params)
        .map_err(|e| (SolverError::from(e), Box::new(state.clone())))?;
    let initial_total = initial.total;
    records.push(StepRecord { step: 0, t: state.t, report: initial, max_div_u: 0.0 });

    for k in 1..=n_steps {
        let (next, max_div) = match step(&state, params, cfg) {
            Ok(v) => v,
            Err(e) => return Err((e, Box::new(state))),
        };
        if let Err(e) = next.check_invariants() {
            return Err((e, Box::new(state)));
        }
        let mut report =
            match total_energy(&next.u, &next.phi_m, &next.phi_c, &next.c_a, params) {
                Ok(r) => r,
                Err(e) => return Err((SolverError::from(e), Box::new(state))),
            };
        report.dissipation_estimate = dissipation_estimate(&next, params).unwrap_or(0.0);
        if !report.total.is_finite() || report.total > 10.0 * initial_total.abs().max(1e-300) {
            return Err((
                SolverError::EnergyBlowup { step: k, total: report.total, initial: initial_total },
                Box::new(state),
            ));
        }
        let record = StepRecord { step: k, t: next.t, report, max_div_u: max_div };
        on_step(&record, &next);
        records.push(record);
        state = next;
    }
    Ok(Trajectory { records, state })
}

/// Right-hand side of the energy inequality: viscous plus phase-field
/// dissipation (an estimate used for monitoring, not a scheme ingredient).
fn dissipation_estimate(state: &PhaseState, params: &ModelParams) -> Result<f64, SolverError> {
    let bc = phase_bc(state.grid());
    let mut total = 0.0;
    for (phi, sigma, b) in [
        (&state.phi_m, params.sigma_m, params.bend_m),
        (&state.phi_c, params.sigma_c, params.bend_c),
    ] {
        let w = scaled_surface_gradient(phi, sigma, b, params)?;
        let gw = gradient(&w, bc)?;
        total += params.mobility() * inner_product_vec(&gw, &gw)?;
    }
    let gu: Result<Vec<_>, _> = (0..state.grid().dim())
        .map(|c| gradient(&state.u.comp_field(c), bc))
        .collect();
    for g in gu? {
        total += 2.0 * params.eta * inner_product_vec(&g, &g)?;
    }
    Ok(-total)
}
