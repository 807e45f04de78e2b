//! Analytic closed surfaces with exact projection, signed distance, normals
//! and principal curvatures.
//!
//! Sign conventions, fixed once for the whole crate:
//!
//! * the signed distance is positive on the side the outer phase (φ = +1)
//!   occupies; for spheres and ellipsoids that is the outside under the
//!   default [`Orientation::OuterPositive`];
//! * `ν = ∇d` points towards positive distance;
//! * principal curvatures `κ̂_i` are the eigenvalues of the tangential
//!   Weingarten map of ν, so a sphere of radius `R` has `κ̂_i = +1/R` and
//!   `div ∇d` on the surface equals `Σ κ̂_i`. Off the surface the relation is
//!   `div ∇d (x) = Σ κ̂_i / (1 + d(x) κ̂_i)`, which the tests pin against
//!   finite differences of `d`.

use serde::{Deserialize, Serialize};

use crate::util::vec3;

use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Distance positive outside (default; matches φ → +1 far from the cell).
    OuterPositive,
    /// Distance positive inside.
    InnerPositive,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::OuterPositive => 1.0,
            Orientation::InnerPositive => -1.0,
        }
    }
}

/// Shape variants. 3D surfaces live in `ℝ³`; the planar variants use the
/// `x`–`y` plane of the same point type with the third coordinate ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Sphere { center: [f64; 3], radius: f64 },
    Ellipsoid { center: [f64; 3], semi_axes: [f64; 3] },
    /// Torus with symmetry axis `z` through `center`.
    Torus { center: [f64; 3], major_radius: f64, minor_radius: f64 },
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], semi_axes: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub shape: Shape,
    pub orientation: Orientation,
}

/// Curvature data of the level set through a point of the tube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedCurvatures {
    /// Mean curvature `H̄ = Σ κ̂_i / (1 - d κ̂_i)`.
    pub h_mean: f64,
    /// Gauss curvature `K̄ = Π κ̄_i` (zero for planar shapes).
    pub k_gauss: f64,
    /// Extended principal curvatures `κ̄_i = κ̂_i / (1 - d κ̂_i)`.
    pub kappa: [f64; 2],
    /// Principal curvatures at the projected surface point.
    pub kappa_surface: [f64; 2],
}

/// Closed forms and finite-difference cross-checks of the normal derivatives
/// of the extended mean curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureIdentities {
    /// `∇H̄·ν̄ = H̄² - 2K̄`.
    pub normal_deriv_closed: f64,
    /// `∇²H̄ : ν̄⊗ν̄ = 2H̄(H̄² - 3K̄)`.
    pub hessian_normal_closed: f64,
    pub normal_deriv_fd: f64,
    pub hessian_normal_fd: f64,
}

impl Surface {
    pub fn sphere(center: [f64; 3], radius: f64) -> Self {
        Self { shape: Shape::Sphere { center, radius }, orientation: Orientation::OuterPositive }
    }

    pub fn ellipsoid(center: [f64; 3], semi_axes: [f64; 3]) -> Self {
        Self { shape: Shape::Ellipsoid { center, semi_axes }, orientation: Orientation::OuterPositive }
    }

    pub fn torus(center: [f64; 3], major_radius: f64, minor_radius: f64) -> Self {
        Self {
            shape: Shape::Torus { center, major_radius, minor_radius },
            orientation: Orientation::OuterPositive,
        }
    }

    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Self { shape: Shape::Circle { center, radius }, orientation: Orientation::OuterPositive }
    }

    pub fn ellipse(center: [f64; 2], semi_axes: [f64; 2]) -> Self {
        Self { shape: Shape::Ellipse { center, semi_axes }, orientation: Orientation::OuterPositive }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// Ambient dimension (2 for the planar variants).
    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Sphere { .. } | Shape::Ellipsoid { .. } | Shape::Torus { .. } => 3,
            Shape::Circle { .. } | Shape::Ellipse { .. } => 2,
        }
    }

    /// Length scale limiting the tubular neighbourhood (smallest radius of
    /// curvature, and for the torus also the distance to the axis).
    pub fn feature_radius(&self) -> f64 {
        match self.shape {
            Shape::Sphere { radius, .. } | Shape::Circle { radius, .. } => radius,
            Shape::Ellipsoid { semi_axes: a, .. } => {
                let max = a[0].max(a[1]).max(a[2]);
                let min = a[0].min(a[1]).min(a[2]);
                min * min / max
            }
            Shape::Ellipse { semi_axes: a, .. } => {
                let max = a[0].max(a[1]);
                let min = a[0].min(a[1]);
                min * min / max
            }
            Shape::Torus { major_radius, minor_radius, .. } => {
                minor_radius.min(major_radius - minor_radius)
            }
        }
    }

    /// Nearest point on the surface.
    pub fn project(&self, x: [f64; 3]) -> Result<[f64; 3], GeometryError> {
        match self.shape {
            Shape::Sphere { center, radius } => {
                let r = vec3::sub(x, center);
                let n = vec3::norm(r);
                if n < 1e-14 {
                    return Err(GeometryError::AmbiguousProjection);
                }
                Ok(vec3::add(center, vec3::scale(r, radius / n)))
            }
            Shape::Circle { center, radius } => {
                let r = [x[0] - center[0], x[1] - center[1], 0.0];
                let n = vec3::norm(r);
                if n < 1e-14 {
                    return Err(GeometryError::AmbiguousProjection);
                }
                Ok([center[0] + r[0] * radius / n, center[1] + r[1] * radius / n, 0.0])
            }
            Shape::Ellipsoid { center, semi_axes } => {
                project_quadric(vec3::sub(x, center), semi_axes).map(|p| vec3::add(p, center))
            }
            Shape::Ellipse { center, semi_axes } => {
                let local = [x[0] - center[0], x[1] - center[1], 0.0];
                let p = project_quadric(local, [semi_axes[0], semi_axes[1], f64::INFINITY])?;
                Ok([p[0] + center[0], p[1] + center[1], 0.0])
            }
            Shape::Torus { center, major_radius, minor_radius } => {
                let local = vec3::sub(x, center);
                let rho = local[0].hypot(local[1]);
                if rho < 1e-12 * major_radius {
                    return Err(GeometryError::AmbiguousProjection);
                }
                let ring = [major_radius * local[0] / rho, major_radius * local[1] / rho, 0.0];
                let off = vec3::sub(local, ring);
                let dist = vec3::norm(off);
                if dist < 1e-14 {
                    return Err(GeometryError::AmbiguousProjection);
                }
                let p = vec3::add(ring, vec3::scale(off, minor_radius / dist));
                Ok(vec3::add(p, center))
            }
        }
    }

    /// Signed distance; total function (no projection needed) wherever the
    /// shape admits a closed form.
    pub fn signed_distance(&self, x: [f64; 3]) -> Result<f64, GeometryError> {
        let outer = match self.shape {
            Shape::Sphere { center, radius } => vec3::norm(vec3::sub(x, center)) - radius,
            Shape::Circle { center, radius } => {
                (x[0] - center[0]).hypot(x[1] - center[1]) - radius
            }
            Shape::Torus { center, major_radius, minor_radius } => {
                let local = vec3::sub(x, center);
                let rho = local[0].hypot(local[1]);
                (rho - major_radius).hypot(local[2]) - minor_radius
            }
            Shape::Ellipsoid { center, semi_axes } => {
                let local = vec3::sub(x, center);
                let p = project_quadric(local, semi_axes)?;
                let g = (local[0] / semi_axes[0]).powi(2)
                    + (local[1] / semi_axes[1]).powi(2)
                    + (local[2] / semi_axes[2]).powi(2)
                    - 1.0;
                g.signum() * vec3::norm(vec3::sub(local, p))
            }
            Shape::Ellipse { center, semi_axes } => {
                let local = [x[0] - center[0], x[1] - center[1], 0.0];
                let p = project_quadric(local, [semi_axes[0], semi_axes[1], f64::INFINITY])?;
                let g = (local[0] / semi_axes[0]).powi(2) + (local[1] / semi_axes[1]).powi(2) - 1.0;
                g.signum() * vec3::norm(vec3::sub(local, p))
            }
        };
        Ok(self.orientation.sign() * outer)
    }

    /// Unit normal at a surface point, pointing towards positive distance.
    pub fn normal_at(&self, p: [f64; 3]) -> [f64; 3] {
        let outward = match self.shape {
            Shape::Sphere { .. } | Shape::Circle { .. } => {
                let c = self.center3();
                vec3::normalize(vec3::sub(p, c))
            }
            Shape::Ellipsoid { center, semi_axes } => {
                let l = vec3::sub(p, center);
                vec3::normalize([
                    l[0] / (semi_axes[0] * semi_axes[0]),
                    l[1] / (semi_axes[1] * semi_axes[1]),
                    l[2] / (semi_axes[2] * semi_axes[2]),
                ])
            }
            Shape::Ellipse { center, semi_axes } => {
                let l = [p[0] - center[0], p[1] - center[1], 0.0];
                vec3::normalize([
                    l[0] / (semi_axes[0] * semi_axes[0]),
                    l[1] / (semi_axes[1] * semi_axes[1]),
                    0.0,
                ])
            }
            Shape::Torus { center, major_radius, .. } => {
                let local = vec3::sub(p, center);
                let rho = local[0].hypot(local[1]);
                let ring = [major_radius * local[0] / rho, major_radius * local[1] / rho, 0.0];
                vec3::normalize(vec3::sub(local, ring))
            }
        };
        vec3::scale(outward, self.orientation.sign())
    }

    fn center3(&self) -> [f64; 3] {
        match self.shape {
            Shape::Sphere { center, .. } | Shape::Ellipsoid { center, .. } | Shape::Torus { center, .. } => center,
            Shape::Circle { center, .. } | Shape::Ellipse { center, .. } => [center[0], center[1], 0.0],
        }
    }

    /// Principal curvatures at a surface point, in the convention where a
    /// sphere (with default orientation) has `κ̂ = +1/R`. Planar shapes fill
    /// the second slot with zero.
    pub fn principal_curvatures(&self, p: [f64; 3]) -> [f64; 2] {
        let outward = match self.shape {
            Shape::Sphere { radius, .. } => [1.0 / radius, 1.0 / radius],
            Shape::Circle { radius, .. } => [1.0 / radius, 0.0],
            Shape::Torus { center, major_radius, minor_radius } => {
                let local = vec3::sub(p, center);
                let rho = local[0].hypot(local[1]);
                let cos_theta = (rho - major_radius) / minor_radius;
                [1.0 / minor_radius, cos_theta / (major_radius + minor_radius * cos_theta)]
            }
            Shape::Ellipsoid { center, semi_axes } => {
                quadric_curvatures(vec3::sub(p, center), semi_axes, 3)
            }
            Shape::Ellipse { center, semi_axes } => {
                let local = [p[0] - center[0], p[1] - center[1], 0.0];
                quadric_curvatures(local, [semi_axes[0], semi_axes[1], f64::INFINITY], 2)
            }
        };
        let s = self.orientation.sign();
        [s * outward[0], s * outward[1]]
    }

    /// Extended curvatures of the level set through `x`.
    pub fn extended_curvatures(&self, x: [f64; 3]) -> Result<ExtendedCurvatures, GeometryError> {
        let p = self.project(x)?;
        let d = self.signed_distance(x)?;
        let kappa_surface = self.principal_curvatures(p);
        let mut kappa = [0.0; 2];
        for i in 0..2 {
            let denom = 1.0 - d * kappa_surface[i];
            if denom.abs() < 1e-9 {
                return Err(GeometryError::FocalSingularity);
            }
            kappa[i] = kappa_surface[i] / denom;
        }
        Ok(ExtendedCurvatures {
            h_mean: kappa[0] + kappa[1],
            k_gauss: kappa[0] * kappa[1],
            kappa,
            kappa_surface,
        })
    }

    /// Normal derivatives of `H̄`: closed forms and central-difference
    /// cross-checks with step `h` along the normal line through `x`.
    pub fn curvature_identities(&self, x: [f64; 3], h: f64) -> Result<CurvatureIdentities, GeometryError> {
        let ext = self.extended_curvatures(x)?;
        let p = self.project(x)?;
        let nu = self.normal_at(p);
        let sample = |t: f64| -> Result<f64, GeometryError> {
            let y = vec3::add(x, vec3::scale(nu, t));
            Ok(self.extended_curvatures(y)?.h_mean)
        };
        let (hm, h0, hp) = (sample(-h)?, ext.h_mean, sample(h)?);
        Ok(CurvatureIdentities {
            normal_deriv_closed: ext.h_mean * ext.h_mean - 2.0 * ext.k_gauss,
            hessian_normal_closed: 2.0 * ext.h_mean * (ext.h_mean * ext.h_mean - 3.0 * ext.k_gauss),
            normal_deriv_fd: (hp - hm) / (2.0 * h),
            hessian_normal_fd: (hp - 2.0 * h0 + hm) / (h * h),
        })
    }
}

/// Nearest point on the quadric `Σ (x_i/a_i)² = 1` to `x` (local
/// coordinates). An infinite semi-axis drops that coordinate (planar case).
/// Solved via the Lagrange parameter `t` in `p_i = a_i² x_i / (t + a_i²)`
/// with a bisection-safeguarded Newton iteration.
fn project_quadric(x: [f64; 3], a: [f64; 3]) -> Result<[f64; 3], GeometryError> {
    let active: Vec<usize> = (0..3).filter(|&i| a[i].is_finite()).collect();
    let r2: f64 = active.iter().map(|&i| (x[i] / a[i]).powi(2)).sum();
    if r2 < 1e-28 {
        // Center: nearest point sits on the shortest axis.
        let (&imin, _) = active
            .iter()
            .map(|i| (i, a[*i]))
            .min_by(|l, r| l.1.partial_cmp(&r.1).unwrap())
            .unwrap();
        let mut p = [0.0; 3];
        p[imin] = a[imin];
        return Ok(p);
    }

    let f = |t: f64| -> f64 {
        active
            .iter()
            .map(|&i| {
                let q = a[i] * x[i] / (t + a[i] * a[i]);
                q * q
            })
            .sum::<f64>()
            - 1.0
    };
    let df = |t: f64| -> f64 {
        active
            .iter()
            .map(|&i| {
                let d = t + a[i] * a[i];
                -2.0 * (a[i] * x[i]).powi(2) / (d * d * d)
            })
            .sum::<f64>()
    };

    let a2_min: f64 = active.iter().map(|&i| a[i] * a[i]).fold(f64::INFINITY, f64::min);
    // f is strictly decreasing on (-a2_min, ∞), +∞ at the left end, -1 at +∞.
    let mut lo = -a2_min + 1e-300;
    let mut hi = {
        let amax = active.iter().map(|&i| a[i]).fold(0.0f64, f64::max);
        let xn = active.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt();
        amax * xn + amax * amax
    };
    while f(hi) > 0.0 {
        hi = 2.0 * hi + a2_min;
    }
    // Start at the larger end where f < 0 and Newton converges monotonically.
    let mut t = hi;
    for _ in 0..200 {
        let ft = f(t);
        if ft.abs() < 1e-14 {
            break;
        }
        if ft > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        let d = df(t);
        let mut next = t - ft / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() < 1e-16 * (1.0 + t.abs()) {
            t = next;
            break;
        }
        t = next;
    }

    let mut p = [0.0; 3];
    for &i in &active {
        p[i] = a[i] * a[i] * x[i] / (t + a[i] * a[i]);
    }
    Ok(p)
}

/// Principal curvatures of the quadric at a surface point via the tangential
/// part of the Weingarten map `P ∇²g P / |∇g|`, outward normal.
fn quadric_curvatures(p: [f64; 3], a: [f64; 3], dim: usize) -> [f64; 2] {
    let grad = [
        2.0 * p[0] / (a[0] * a[0]),
        2.0 * p[1] / (a[1] * a[1]),
        if a[2].is_finite() { 2.0 * p[2] / (a[2] * a[2]) } else { 0.0 },
    ];
    let gn = vec3::norm(grad);
    let n = vec3::scale(grad, 1.0 / gn);
    let hess = [
        2.0 / (a[0] * a[0]),
        2.0 / (a[1] * a[1]),
        if a[2].is_finite() { 2.0 / (a[2] * a[2]) } else { 0.0 },
    ];

    if dim == 2 {
        let t = [-n[1], n[0], 0.0];
        let k = (t[0] * hess[0] * t[0] + t[1] * hess[1] * t[1]) / gn;
        return [k, 0.0];
    }

    // Orthonormal tangent basis.
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let t1 = vec3::normalize(vec3::cross(n, seed));
    let t2 = vec3::cross(n, t1);
    let quad = |u: [f64; 3], v: [f64; 3]| (u[0] * hess[0] * v[0] + u[1] * hess[1] * v[1] + u[2] * hess[2] * v[2]) / gn;
    let (m11, m12, m22) = (quad(t1, t1), quad(t1, t2), quad(t2, t2));
    let tr = m11 + m22;
    let det = m11 * m22 - m12 * m12;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    [tr / 2.0 + disc, tr / 2.0 - disc]
}
