//! Diffuse-interface model of a cell membrane coupled to its cortex by
//! elastic linkers, together with the numerical studies that verify its
//! sharp-interface behaviour: optimal transition profiles, curvature
//! expansion identities, concentration of diffuse integrals, and the ε → 0
//! convergence of diffuse interfacial forces to surface tractions.
//!
//! The crate's modules mirror the layers of the model:
//!
//! * [`fields`] — uniform Cartesian grids and finite-difference operators,
//! * [`geometry`] — analytic surfaces, signed distance, interfacial
//!   coordinates and the `tanh` optimal profile,
//! * [`energies`] — Ginzburg–Landau, bending and linker-coupling energies
//!   with their L² gradients and the momentum-balance force,
//! * [`asymptotics`] — 1D expansion residuals, the concentration lemma and
//!   ε-convergence studies of interfacial forces against sharp-interface
//!   quadrature oracles,
//! * [`solver`] — semi-implicit time integration of the coupled system,
//! * [`harness`] — run configuration, study drivers and report output.

pub mod asymptotics;
pub mod energies;
pub mod fields;
pub mod geometry;
pub mod harness;
pub mod solver;
pub mod util;
