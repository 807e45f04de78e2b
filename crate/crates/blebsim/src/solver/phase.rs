//! Conservative IMEX step of the phase-field evolution laws
//! `∂_t φ + u·∇φ = div(m ∇(grad S + grad C))`, `m = ε^α`.
//!
//! The constant-coefficient stiff part — the triharmonic term `m b ε Δ³φ`
//! from the bending gradient together with a biharmonic stabilization
//! bounding the `σε Δ²` and `W''`-carrying fourth-order terms — is treated
//! implicitly; everything nonlinear and the coupling terms stay explicit.
//! Both the implicit operator and the explicit right-hand side are
//! compositions of the mirror-ghost compact Laplacian, which is exactly
//! conservative (zero boundary flux), so the cell sum of each phase field is
//! preserved to solver tolerance.

use crate::energies::ModelParams;
use crate::fields::{laplacian_of_padded, ScalarField};
use crate::energies::phase_bc;

use super::linsolve::conjugate_gradient;
use super::state::StepConfig;
use super::SolverError;

/// Apply the compact Laplacian `n` times (fresh ghost layers each pass).
fn laplacian_power(
    f: &ScalarField,
    n: usize,
    out: &mut ScalarField,
) -> Result<(), SolverError> {
    let bc = phase_bc(f.grid());
    let mut cur = f.clone();
    for _ in 0..n {
        let p = cur.padded(bc).map_err(crate::energies::EnergyError::from)?;
        laplacian_of_padded(&p, out);
        std::mem::swap(&mut cur, out);
    }
    std::mem::swap(&mut cur, out);
    Ok(())
}

/// Implicit operator coefficients for one phase field:
/// `A φ = m (c3 Δ³φ - c2 Δ²φ)` with `c3 = bε` and
/// `c2 = σε + margin·2b/ε` (the `W'' ≤ 2` bound).
pub(crate) struct ImplicitPhaseOp {
    pub mobility: f64,
    pub c2: f64,
    pub c3: f64,
    pub dt: f64,
}

impl ImplicitPhaseOp {
    pub fn new(sigma: f64, rigidity: f64, params: &ModelParams, cfg: &StepConfig) -> Self {
        let m = cfg.mobility_override.unwrap_or_else(|| params.mobility());
        Self {
            mobility: m,
            c2: cfg.stabilization_margin * (sigma * params.eps + 2.0 * rigidity / params.eps),
            c3: rigidity * params.eps,
            dt: cfg.dt,
        }
    }

    /// `(I - Δt A) ψ`.
    fn apply(&self, psi: &ScalarField, out: &mut ScalarField) -> Result<(), SolverError> {
        let mut lap2 = ScalarField::zeros(psi.grid());
        laplacian_power(psi, 2, &mut lap2)?;
        let mut lap3 = ScalarField::zeros(psi.grid());
        laplacian_power(psi, 3, &mut lap3)?;
        let (m, dt) = (self.mobility, self.dt);
        for i in 0..psi.values().len() {
            let a = m * (self.c3 * lap3.values()[i] - self.c2 * lap2.values()[i]);
            out.values_mut()[i] = psi.values()[i] - dt * a;
        }
        Ok(())
    }

    fn apply_a(&self, psi: &ScalarField, out: &mut ScalarField) -> Result<(), SolverError> {
        let mut lap2 = ScalarField::zeros(psi.grid());
        laplacian_power(psi, 2, &mut lap2)?;
        let mut lap3 = ScalarField::zeros(psi.grid());
        laplacian_power(psi, 3, &mut lap3)?;
        for i in 0..psi.values().len() {
            out.values_mut()[i] =
                self.mobility * (self.c3 * lap3.values()[i] - self.c2 * lap2.values()[i]);
        }
        Ok(())
    }
}

/// One IMEX update of a single phase field given the explicit right-hand
/// side `rhs_ex = m Δ(w) - u·∇φ` evaluated at the old state:
/// `(I - Δt A) φⁿ⁺¹ = φⁿ + Δt (rhs_ex - A φⁿ)`.
pub(crate) fn imex_phase_update(
    phi: &ScalarField,
    rhs_ex: &ScalarField,
    op: &ImplicitPhaseOp,
    cfg: &StepConfig,
) -> Result<(ScalarField, usize), SolverError> {
    let grid = phi.grid().clone();
    let mut a_phi = ScalarField::zeros(&grid);
    op.apply_a(phi, &mut a_phi)?;
    let rhs: Vec<f64> = (0..grid.len())
        .map(|i| phi.values()[i] + cfg.dt * (rhs_ex.values()[i] - a_phi.values()[i]))
        .collect();

    let mut x = phi.values().to_vec();
    let scratch = std::cell::RefCell::new((ScalarField::zeros(&grid), ScalarField::zeros(&grid)));
    let iters = conjugate_gradient(
        |v, out| {
            let (ref mut sin, ref mut sout) = *scratch.borrow_mut();
            sin.values_mut().copy_from_slice(v);
            op.apply(sin, sout).expect("operator application");
            out.copy_from_slice(sout.values());
        },
        &rhs,
        &mut x,
        None,
        cfg.implicit_tol,
        cfg.max_linear_iters,
    )?;
    Ok((ScalarField::from_values(&grid, x).map_err(crate::energies::EnergyError::from)?, iters))
}
