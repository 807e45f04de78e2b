//! Streaming evaluation of diffuse interfacial integrals on fine lattices.
//!
//! The 3D force studies need grids with hundreds of cells per axis; instead
//! of materializing fields, these routines sweep the lattice in slabs along
//! the slowest axis, keeping only the φ and μ planes a stencil needs. Phase
//! values come from the optimal profile across an analytic surface, all
//! stencils are the same second-order ones the `fields` module uses, and
//! cells far outside the interface tube short-circuit to φ = ±1.

use std::sync::Arc;

use rayon::prelude::*;

use crate::energies::double_well;
use crate::fields::{BoundaryKind, Grid};
use crate::geometry::Surface;

/// Saturation threshold in stretched units: beyond `|z| = Z_SAT` the profile
/// is ±1 to double precision and every interfacial quantity vanishes.
const Z_SAT: f64 = 17.0;

/// Bounding box of the surface's tube, padded by `margin`.
pub fn tube_grid(surface: &Surface, eps: f64, h: f64, margin_z: f64) -> Arc<Grid> {
    let pad = margin_z * eps;
    let (lo, hi) = match surface.shape {
        crate::geometry::Shape::Sphere { center, radius } => {
            let r = radius + pad;
            ([center[0] - r, center[1] - r, center[2] - r], [center[0] + r, center[1] + r, center[2] + r])
        }
        crate::geometry::Shape::Ellipsoid { center, semi_axes } => (
            [
                center[0] - semi_axes[0] - pad,
                center[1] - semi_axes[1] - pad,
                center[2] - semi_axes[2] - pad,
            ],
            [
                center[0] + semi_axes[0] + pad,
                center[1] + semi_axes[1] + pad,
                center[2] + semi_axes[2] + pad,
            ],
        ),
        crate::geometry::Shape::Torus { center, major_radius, minor_radius } => {
            let r = major_radius + minor_radius + pad;
            let z = minor_radius + pad;
            ([center[0] - r, center[1] - r, center[2] - z], [center[0] + r, center[1] + r, center[2] + z])
        }
        crate::geometry::Shape::Circle { center, radius } => {
            let r = radius + pad;
            ([center[0] - r, center[1] - r, 0.0], [center[0] + r, center[1] + r, 0.0])
        }
        crate::geometry::Shape::Ellipse { center, semi_axes } => (
            [center[0] - semi_axes[0] - pad, center[1] - semi_axes[1] - pad, 0.0],
            [center[0] + semi_axes[0] + pad, center[1] + semi_axes[1] + pad, 0.0],
        ),
    };
    let dim = surface.dim();
    let mut cells = [1usize; 3];
    let mut origin = [0.0; 3];
    let mut extent = [1.0; 3];
    for a in 0..dim {
        let n = ((hi[a] - lo[a]) / h).ceil() as usize;
        cells[a] = n.max(8);
        origin[a] = lo[a];
        extent[a] = cells[a] as f64 * h;
    }
    Arc::new(
        Grid::new(dim, &cells[..dim], &origin[..dim], &extent[..dim], BoundaryKind::Physical)
            .expect("valid tube grid"),
    )
}

/// Which diffuse interfacial force functional to accumulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceForceKind {
    /// `σ ∫ μ(φ) ∇φ·ψ`.
    GinzburgLandau,
    /// `b ∫ (-Δμ + μ W''(φ)/ε²) ∇φ·ψ`.
    Willmore,
}

/// `ε⁻¹ ∫ p(d/ε) f dx` over the tube of a surface, by cell sums on a lattice
/// of spacing `h` (never materialized). `z_cut` truncates the kernel.
pub fn concentration_integral(
    surface: &Surface,
    eps: f64,
    h: f64,
    z_cut: f64,
    p: impl Fn(f64) -> f64 + Sync,
    f: impl Fn([f64; 3]) -> f64 + Sync,
) -> f64 {
    let grid = tube_grid(surface, eps, h, z_cut + 4.0);
    let [nx, ny, nz] = grid.cells();
    let vol = grid.cell_volume();
    let partials: Vec<f64> = (0..nz * ny)
        .into_par_iter()
        .map(|row| {
            let (k, j) = (row / ny, row % ny);
            let mut acc = 0.0;
            for i in 0..nx {
                let x = grid.cell_center(i, j, k);
                let d = surface.signed_distance(x).expect("total distance");
                let z = d / eps;
                if z.abs() <= z_cut {
                    acc += p(z) * f(x);
                }
            }
            acc
        })
        .collect();
    partials.iter().sum::<f64>() * vol / eps
}

/// Diffuse interfacial force functional of an optimal-profile phase field,
/// paired with a test field ψ: a slab sweep with the 3-point stencils.
pub fn diffuse_surface_force(
    surface: &Surface,
    eps: f64,
    h: f64,
    kind: SurfaceForceKind,
    modulus: f64,
    psi: impl Fn([f64; 3]) -> [f64; 3] + Sync,
) -> f64 {
    let grid = tube_grid(surface, eps, h, Z_SAT + 6.0);
    let dim = grid.dim();
    let [nx, ny, nz] = grid.cells();
    let vol = grid.cell_volume();
    let scale = 1.0 / (eps * 2f64.sqrt());

    // φ on one y–z plane at fixed x-index (or one row in 2D).
    let plane_len = ny * nz;
    let phi_plane = |i: isize| -> Vec<f64> {
        let ii = i.clamp(0, nx as isize - 1) as usize;
        (0..plane_len)
            .into_par_iter()
            .map(|row| {
                let (k, j) = (row / ny, row % ny);
                let x = grid.cell_center(ii, j, k);
                let d = surface.signed_distance(x).expect("total distance");
                let z = d * scale;
                if z.abs() > Z_SAT {
                    z.signum()
                } else {
                    z.tanh()
                }
            })
            .collect()
    };

    let clamp_at = |p: &[f64], jj: isize, kk: isize| -> f64 {
        let jj = jj.clamp(0, ny as isize - 1) as usize;
        let kk = kk.clamp(0, nz as isize - 1) as usize;
        p[kk * ny + jj]
    };

    // Ring buffers: φ at [i-2 .. i+2], μ at [i-1, i, i+1].
    let mut phi: Vec<Vec<f64>> = (-2..=2).map(|o| phi_plane(o)).collect();
    let mu_from = |phi: &[Vec<f64>], a: usize| -> Vec<f64> {
        let (lo, mid, hi) = (&phi[a - 1], &phi[a], &phi[a + 1]);
        (0..plane_len)
            .into_par_iter()
            .map(|row| {
                let (k, j) = (row / ny, row % ny);
                let c = mid[row];
                if c.abs() >= 1.0 {
                    // Saturated: μ = W'(±1)/ε = 0 unless a neighbour differs.
                    let flat = lo[row] == c
                        && hi[row] == c
                        && clamp_at(mid, j as isize + 1, k as isize) == c
                        && clamp_at(mid, j as isize - 1, k as isize) == c
                        && (dim == 2
                            || (clamp_at(mid, j as isize, k as isize + 1) == c
                                && clamp_at(mid, j as isize, k as isize - 1) == c));
                    if flat {
                        return 0.0;
                    }
                }
                let mut lap = (lo[row] - 2.0 * c + hi[row]) / (h * h);
                lap += (clamp_at(mid, j as isize + 1, k as isize) - 2.0 * c
                    + clamp_at(mid, j as isize - 1, k as isize))
                    / (h * h);
                if dim == 3 {
                    lap += (clamp_at(mid, j as isize, k as isize + 1) - 2.0 * c
                        + clamp_at(mid, j as isize, k as isize - 1))
                        / (h * h);
                }
                -eps * lap + double_well(c, 1).unwrap() / eps
            })
            .collect()
    };
    let mut mu: Vec<Vec<f64>> = (1..=3).map(|a| mu_from(&phi, a)).collect();

    let mut total = 0.0;
    for i in 0..nx {
        let plane_sum: f64 = (0..plane_len)
            .into_par_iter()
            .map(|row| {
                let (k, j) = (row / ny, row % ny);
                let c = phi[2][row];
                if c.abs() >= 1.0 {
                    return 0.0;
                }
                let x = grid.cell_center(i, j, k);
                let at = clamp_at;
                // Central gradient of φ.
                let mut grad = [0.0f64; 3];
                grad[0] = (phi[3][row] - phi[1][row]) / (2.0 * h);
                grad[1] = (at(&phi[2], j as isize + 1, k as isize)
                    - at(&phi[2], j as isize - 1, k as isize))
                    / (2.0 * h);
                if dim == 3 {
                    grad[2] = (at(&phi[2], j as isize, k as isize + 1)
                        - at(&phi[2], j as isize, k as isize - 1))
                        / (2.0 * h);
                }
                let p = psi(x);
                let gp = grad[0] * p[0] + grad[1] * p[1] + grad[2] * p[2];
                if gp == 0.0 {
                    return 0.0;
                }
                let w = match kind {
                    SurfaceForceKind::GinzburgLandau => mu[1][row],
                    SurfaceForceKind::Willmore => {
                        let mut lap_mu = (mu[0][row] - 2.0 * mu[1][row] + mu[2][row]) / (h * h);
                        lap_mu += (at(&mu[1], j as isize + 1, k as isize) - 2.0 * mu[1][row]
                            + at(&mu[1], j as isize - 1, k as isize))
                            / (h * h);
                        if dim == 3 {
                            lap_mu += (at(&mu[1], j as isize, k as isize + 1) - 2.0 * mu[1][row]
                                + at(&mu[1], j as isize, k as isize - 1))
                                / (h * h);
                        }
                        -lap_mu + mu[1][row] * double_well(c, 2).unwrap() / (eps * eps)
                    }
                };
                w * gp
            })
            .sum();
        total += plane_sum;

        // Advance the pipeline.
        phi.rotate_left(1);
        phi[4] = phi_plane(i as isize + 3);
        mu.rotate_left(1);
        mu[2] = mu_from(&phi, 3);
    }
    modulus * total * vol
}
