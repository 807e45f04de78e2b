//! The full unknown of the coupled system and stepping configuration.

use std::sync::Arc;

use crate::fields::{Grid, ScalarField, VectorField};

use super::SolverError;

/// State `(u, p, φ_m, φ_c, c_a, c_i)` at time `t`, all on one grid.
#[derive(Debug, Clone)]
pub struct PhaseState {
    pub t: f64,
    pub u: VectorField,
    pub p: ScalarField,
    pub phi_m: ScalarField,
    pub phi_c: ScalarField,
    pub c_a: ScalarField,
    pub c_i: ScalarField,
}

impl PhaseState {
    pub fn quiescent(grid: &Arc<Grid>, phi_m: ScalarField, phi_c: ScalarField) -> Self {
        Self {
            t: 0.0,
            u: VectorField::zeros(grid),
            p: ScalarField::zeros(grid),
            phi_m,
            phi_c,
            c_a: ScalarField::zeros(grid),
            c_i: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.phi_m.grid()
    }

    /// Monitored invariants: phases in `[-1.1, 1.1]`, species above `-0.1`,
    /// everything finite.
    pub fn check_invariants(&self) -> Result<(), SolverError> {
        const TOL: f64 = 0.1;
        for (name, f) in [("phi_m", &self.phi_m), ("phi_c", &self.phi_c)] {
            for &v in f.values() {
                if !v.is_finite() || v.abs() > 1.0 + TOL {
                    return Err(SolverError::StateInvariant(format!(
                        "{name} out of range: {v}"
                    )));
                }
            }
        }
        for (name, f) in [("c_a", &self.c_a), ("c_i", &self.c_i)] {
            for &v in f.values() {
                if !v.is_finite() || v < -TOL {
                    return Err(SolverError::StateInvariant(format!(
                        "{name} below zero: {v}"
                    )));
                }
            }
        }
        self.u.check_finite("velocity").map_err(SolverError::from)?;
        Ok(())
    }
}

/// Time-stepping knobs.
#[derive(Debug, Clone, Copy)]
pub struct StepConfig {
    pub dt: f64,
    /// Relative tolerance of the implicit phase/species solves.
    pub implicit_tol: f64,
    /// Relative tolerance of the pressure projection.
    pub projection_tol: f64,
    pub max_linear_iters: usize,
    /// Advection CFL cap `max|u| Δt / h`.
    pub cfl_cap: f64,
    /// Safety multiplier on the implicit stabilization constants (≥ 1).
    pub stabilization_margin: f64,
    pub evolve_fluid: bool,
    pub evolve_phases: bool,
    pub evolve_species: bool,
    /// Replace the `ε^α` mobility (0 disables the phase-field fluxes, which
    /// leaves pure transport by `u`).
    pub mobility_override: Option<f64>,
}

impl StepConfig {
    pub fn new(dt: f64) -> Result<Self, SolverError> {
        if !(dt > 0.0) {
            return Err(SolverError::InvalidConfig("dt must be positive".into()));
        }
        Ok(Self {
            dt,
            implicit_tol: 1e-13,
            projection_tol: 1e-11,
            max_linear_iters: 20_000,
            cfl_cap: 0.5,
            stabilization_margin: 1.0,
            evolve_fluid: true,
            evolve_phases: true,
            evolve_species: true,
            mobility_override: None,
        })
    }
}
