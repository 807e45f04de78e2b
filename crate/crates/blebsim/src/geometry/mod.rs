//! Analytic surfaces, signed distance, interfacial coordinates, extended
//! curvatures and the optimal transition profile.

mod coords;
mod profile;
mod surface;

pub use coords::InterfacialCoords;
pub use profile::{optimal_profile, OptimalProfile, Profile, ProfileGrid, Z_CONSTANT};
pub use surface::{CurvatureIdentities, ExtendedCurvatures, Orientation, Shape, Surface};

use std::sync::Arc;

use thiserror::Error;

use crate::fields::{Grid, ScalarField};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point projects ambiguously (surface axis or center)")]
    AmbiguousProjection,
    #[error("point outside the tubular neighbourhood")]
    OutsideTube,
    #[error("focal-point singularity: 1 - d·κ̂ vanishes")]
    FocalSingularity,
    #[error("invalid tube parameters (need 0 < ε < δ)")]
    InvalidTube,
    #[error("invalid profile grid")]
    InvalidProfileGrid,
}

/// Phase field of the optimal profile across a surface,
/// `φ(x) = tanh(d(x) / (ε√2))`. The tube should be resolved with `ε ≥ 4h`
/// (and at the very least `ε ≥ 2h`); the harness rejects under-resolved
/// configurations.
pub fn build_phase_field(surface: &Surface, eps: f64, grid: &Arc<Grid>) -> ScalarField {
    assert_eq!(surface.dim(), grid.dim(), "surface and grid dimension must agree");
    let scale = 1.0 / (eps * 2f64.sqrt());
    ScalarField::from_fn(grid, |x| {
        let d = surface.signed_distance(x).expect("total signed distance");
        (d * scale).tanh()
    })
}

/// `true` when the interface width is resolved by the grid (`ε ≥ 2h`).
pub fn interface_resolved(eps: f64, grid: &Grid) -> bool {
    eps >= 2.0 * grid.min_spacing()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::vec3;

    #[test]
    fn sphere_signed_distance_and_orientation() {
        let s = Surface::sphere([0.0; 3], 1.0);
        assert!((s.signed_distance([1.3, 0.0, 0.0]).unwrap() - 0.3).abs() < 1e-15);
        assert!(s.signed_distance([0.0, 1.0, 0.0]).unwrap().abs() < 1e-15);
        let flipped = s.with_orientation(Orientation::InnerPositive);
        assert!((flipped.signed_distance([1.3, 0.0, 0.0]).unwrap() + 0.3).abs() < 1e-15);
    }

    #[test]
    fn ellipsoid_axis_point_distance() {
        let s = Surface::ellipsoid([0.0; 3], [2.0, 1.0, 1.0]);
        let d = s.signed_distance([3.0, 0.0, 0.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-10, "d = {d}");
    }

    #[test]
    fn ellipsoid_projection_matches_newton_oracle() {
        // Independent check: the projection must satisfy the stationarity
        // condition (x - p) ∥ ∇g(p) and lie on the surface.
        let s = Surface::ellipsoid([0.1, -0.2, 0.0], [1.5, 1.0, 0.7]);
        let pts = [
            [2.0, 0.3, -0.1],
            [0.4, 1.3, 0.2],
            [-1.0, -1.0, 0.9],
            [0.2, -0.1, 0.9],
        ];
        for x in pts {
            let p = s.project(x).unwrap();
            let local = vec3::sub(p, [0.1, -0.2, 0.0]);
            let g = (local[0] / 1.5).powi(2) + local[1].powi(2) + (local[2] / 0.7).powi(2) - 1.0;
            assert!(g.abs() < 1e-10, "residual {g}");
            let n = s.normal_at(p);
            let r = vec3::sub(x, p);
            let cross = vec3::norm(vec3::cross(n, r));
            assert!(cross < 1e-9 * (1.0 + vec3::norm(r)), "not normal: {cross}");
        }
    }

    #[test]
    fn gradient_of_distance_is_unit() {
        let surfaces = [
            Surface::sphere([0.0; 3], 0.8),
            Surface::ellipsoid([0.0; 3], [1.2, 0.9, 0.7]),
            Surface::torus([0.0; 3], 2.0, 0.5),
        ];
        let h = 1e-5;
        for s in surfaces {
            for x in [[0.9, 0.3, 0.2], [0.5, -0.8, 0.35], [1.8, 0.9, 0.25]] {
                let mut grad = [0.0; 3];
                for a in 0..3 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[a] += h;
                    xm[a] -= h;
                    grad[a] = (s.signed_distance(xp).unwrap() - s.signed_distance(xm).unwrap())
                        / (2.0 * h);
                }
                let n = vec3::norm(grad);
                assert!((n - 1.0).abs() < 1e-7, "|∇d| = {n} for {s:?} at {x:?}");
            }
        }
    }

    #[test]
    fn extended_curvature_sphere() {
        let s = Surface::sphere([0.0; 3], 1.0);
        let on = s.extended_curvatures([1.0, 0.0, 0.0]).unwrap();
        assert!((on.h_mean - 2.0).abs() < 1e-12);
        assert!((on.k_gauss - 1.0).abs() < 1e-12);
        assert!((on.kappa[0] - 1.0).abs() < 1e-12 && (on.kappa[1] - 1.0).abs() < 1e-12);
        // Paper-formula extension H̄ = Σ κ̂/(1 - d κ̂): at d = 0.1, 2/(1-d).
        let off = s.extended_curvatures([1.1, 0.0, 0.0]).unwrap();
        assert!((off.h_mean - 2.0 / 0.9).abs() < 1e-12, "H = {}", off.h_mean);
    }

    #[test]
    fn div_grad_d_oracle_fixes_sign() {
        // div ∇d (x) = Σ κ̂_i / (1 + d κ̂_i): second differences of d vs closed form.
        let cases = [
            (Surface::sphere([0.0; 3], 1.0), [1.1, 0.0, 0.0]),
            (Surface::torus([0.0; 3], 2.0, 0.5), [2.55, 0.0, 0.0]),
            (Surface::ellipsoid([0.0; 3], [1.5, 1.0, 1.0]), [0.9, 0.9, 0.0]),
        ];
        let h = 1e-4;
        for (s, x) in cases {
            let mut lap = 0.0;
            let d0 = s.signed_distance(x).unwrap();
            for a in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[a] += h;
                xm[a] -= h;
                lap += (s.signed_distance(xp).unwrap() - 2.0 * d0
                    + s.signed_distance(xm).unwrap())
                    / (h * h);
            }
            let ext = s.extended_curvatures(x).unwrap();
            let ks = ext.kappa_surface;
            let closed = ks[0] / (1.0 + d0 * ks[0]) + ks[1] / (1.0 + d0 * ks[1]);
            assert!((lap - closed).abs() < 1e-5, "{s:?}: fd {lap} vs {closed}");
        }
    }

    #[test]
    fn torus_outer_equator_curvatures() {
        let s = Surface::torus([0.0; 3], 2.0, 0.5);
        let k = s.principal_curvatures([2.5, 0.0, 0.0]);
        assert!((k[0] - 2.0).abs() < 1e-12);
        assert!((k[1] - 1.0 / 2.5).abs() < 1e-12);
    }

    #[test]
    fn curvature_identities_on_sphere_and_torus() {
        let sphere = Surface::sphere([0.0; 3], 1.0);
        let ids = sphere.curvature_identities([1.0, 0.0, 0.0], 1e-3).unwrap();
        assert!((ids.normal_deriv_closed - 2.0).abs() < 1e-12);
        assert!((ids.hessian_normal_closed - 4.0).abs() < 1e-12);
        assert!((ids.normal_deriv_fd - 2.0).abs() < 1e-5);
        assert!((ids.hessian_normal_fd - 4.0).abs() < 1e-3);

        let torus = Surface::torus([0.0; 3], 2.0, 0.5);
        let x = [2.5 * (0.3f64).cos(), 2.5 * (0.3f64).sin(), 0.02];
        let ids = torus.curvature_identities(x, 1e-3).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
        assert!(rel(ids.normal_deriv_fd, ids.normal_deriv_closed) < 1e-4);
        assert!(rel(ids.hessian_normal_fd, ids.hessian_normal_closed) < 1e-3);
    }

    #[test]
    fn tubular_expansion_is_second_order_in_d() {
        // |H̄ - (Σκ̂ + d Σκ̂²)| = O(d²).
        let s = Surface::torus([0.0; 3], 2.0, 0.5);
        let p = [2.5 * (0.7f64).cos(), 2.5 * (0.7f64).sin(), 0.0];
        let nu = s.normal_at(p);
        let ks = s.principal_curvatures(p);
        let mut ds = Vec::new();
        let mut errs = Vec::new();
        for d in [0.02, 0.01, 0.005, 0.0025] {
            let x = vec3::add(p, vec3::scale(nu, d));
            let ext = s.extended_curvatures(x).unwrap();
            let first_order = ks[0] + ks[1] + d * (ks[0] * ks[0] + ks[1] * ks[1]);
            ds.push(d);
            errs.push((ext.h_mean - first_order).abs());
        }
        let order = crate::util::fitted_order(&ds, &errs);
        assert!((1.9..=2.1).contains(&order), "order = {order}");
    }

    #[test]
    fn interfacial_coords_round_trip() {
        let s = Surface::sphere([0.0; 3], 1.0);
        let ic = InterfacialCoords::new(s, 0.05).unwrap();
        // Forward from a constructed point.
        let p = vec3::normalize([0.3, -0.5, 0.81]);
        let x = ic.unmap(p, 2.0);
        let (s2, z) = ic.map(x).unwrap();
        assert!((z - 2.0).abs() < 1e-12);
        assert!(vec3::norm(vec3::sub(s2, p)) < 1e-12);
        // On the surface z = 0.
        let (_, z0) = ic.map(p).unwrap();
        assert!(z0.abs() < 1e-14);
        // Outside the tube errors.
        assert!(matches!(ic.map([2.0, 0.0, 0.0]), Err(GeometryError::OutsideTube)));
    }

    #[test]
    fn round_trip_random_points_in_tube() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let surfaces = [
            Surface::sphere([0.1, 0.0, -0.2], 0.9),
            Surface::ellipsoid([0.0; 3], [1.3, 1.0, 0.8]),
            Surface::torus([0.0; 3], 2.0, 0.6),
        ];
        for s in surfaces {
            let ic = InterfacialCoords::new(s, 0.02).unwrap();
            for _ in 0..200 {
                let u: f64 = rng.gen_range(-1.0..1.0);
                let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let seed = match s.shape {
                    Shape::Torus { .. } => [2.0 * v.cos(), 2.0 * v.sin(), 0.5 * u],
                    _ => [v.cos() * (1.0 - u * u).sqrt(), v.sin() * (1.0 - u * u).sqrt(), u],
                };
                let p = s.project(seed).unwrap();
                let z = rng.gen_range(-0.8..0.8) * ic.delta() / ic.eps();
                let x = ic.unmap(p, z);
                let (p2, z2) = ic.map(x).unwrap();
                assert!((z2 - z).abs() < 1e-10);
                assert!(vec3::norm(vec3::sub(p2, p)) < 1e-10);
            }
        }
    }

    #[test]
    fn phase_field_values() {
        let grid = std::sync::Arc::new(
            Grid::centered(3, 1.0, 64, crate::fields::BoundaryKind::Physical).unwrap(),
        );
        let s = Surface::sphere([0.0; 3], 0.3);
        let eps = 0.04;
        let phi = build_phase_field(&s, eps, &grid);
        // On-surface cell values are small, far cells saturate.
        let far = phi.at(0, 0, 0);
        assert!((far + 1.0).abs() < 1e-6 || (far - 1.0).abs() < 1e-6);
        // φ = 0.5 at d = ε√2·atanh(0.5).
        let d = eps * 2f64.sqrt() * 0.5f64.atanh();
        let v = (s.signed_distance([0.3 + d, 0.0, 0.0]).unwrap() / (eps * 2f64.sqrt())).tanh();
        assert!((v - 0.5).abs() < 1e-12);
        assert!(interface_resolved(eps, &grid));
        assert!(!interface_resolved(0.01, &grid));
    }
}
