//! Sharp-interface reference machinery: parametric surface quadrature with
//! analytic normals and curvatures, a cotangent discrete Laplace–Beltrami
//! for `Δ_Γ H` on 3D surfaces, and the jump-condition functionals the
//! diffuse force studies converge to.
//!
//! None of this shares discretization with the diffuse side: quadrature
//! nodes come from analytic parametrizations (Gauss–Legendre × trapezoid in
//! 3D, trapezoid on curves), curvatures are closed forms, and tangential
//! derivatives are taken in parameter space.
//!
//! Sign bridge: the expansion formulas carry the mean curvature of the
//! phase-field level sets, `H_μ := -div ∇d|_Γ`, which is the negative of the
//! geometry module's sphere-positive `H`. All jump references below use
//! `H_μ`.

use std::f64::consts::{PI, TAU};

use crate::energies::ModelParams;
use crate::geometry::{Shape, Surface};
use crate::util::vec3;

/// One quadrature node with its geometric data.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceNode {
    pub pos: [f64; 3],
    /// Outward unit normal (direction of increasing signed distance).
    pub normal: [f64; 3],
    pub weight: f64,
    /// Mean curvature, geometry convention (positive for spheres).
    pub h_mean: f64,
    pub k_gauss: f64,
    /// `Δ_Γ H` in the geometry convention (zero where not computed).
    pub lb_h: f64,
}

/// Quadrature rule over a closed surface (or curve in 2D).
pub struct SurfaceQuadrature {
    pub nodes: Vec<SurfaceNode>,
    /// Parametric grid layout for tangential derivatives on curves.
    curve_param: Option<CurveParam>,
}

struct CurveParam {
    /// d(pos)/dt per node and parameter step (uniform, periodic).
    speed: Vec<f64>,
    dt: f64,
}

impl SurfaceQuadrature {
    /// Build a rule with roughly `n` nodes per periodic direction.
    pub fn build(surface: &Surface, n: usize) -> Self {
        match surface.shape {
            Shape::Circle { .. } | Shape::Ellipse { .. } => curve_quadrature(surface, n),
            Shape::Sphere { .. } | Shape::Ellipsoid { .. } => lat_long_quadrature(surface, n),
            Shape::Torus { .. } => torus_quadrature(surface, n),
        }
    }

    pub fn area(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Whether this rule parametrizes a planar curve.
    pub fn is_curve(&self) -> bool {
        self.curve_param.is_some()
    }

    /// `∫_Γ f dH`.
    pub fn integrate(&self, f: impl Fn(&SurfaceNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }

    /// Tangential derivative of a per-node scalar along a curve
    /// (second-order periodic differences in parameter space).
    pub fn curve_tangential_derivative(&self, values: &[f64]) -> Vec<f64> {
        let param = self.curve_param.as_ref().expect("curve quadrature required");
        let n = values.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let (ip, im) = ((i + 1) % n, (i + n - 1) % n);
            out[i] = (values[ip] - values[im]) / (2.0 * param.dt) / param.speed[i];
        }
        out
    }

    /// Surface divergence of a per-node ambient vector field along a curve:
    /// `div_Γ V = t̂·∂_s V`.
    pub fn curve_tangential_divergence(&self, values: &[[f64; 3]]) -> Vec<f64> {
        let param = self.curve_param.as_ref().expect("curve quadrature required");
        let n = values.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let (ip, im) = ((i + 1) % n, (i + n - 1) % n);
            let ds = [
                (values[ip][0] - values[im][0]) / (2.0 * param.dt),
                (values[ip][1] - values[im][1]) / (2.0 * param.dt),
                (values[ip][2] - values[im][2]) / (2.0 * param.dt),
            ];
            // Unit tangent from the node ordering.
            let t = tangent_of(self, i);
            out[i] = vec3::dot(ds, t) / param.speed[i];
        }
        out
    }
}

fn tangent_of(q: &SurfaceQuadrature, i: usize) -> [f64; 3] {
    let n = q.nodes.len();
    let (ip, im) = ((i + 1) % n, (i + n - 1) % n);
    vec3::normalize(vec3::sub(q.nodes[ip].pos, q.nodes[im].pos))
}

fn curve_quadrature(surface: &Surface, n: usize) -> SurfaceQuadrature {
    let (center, axes) = match surface.shape {
        Shape::Circle { center, radius } => (center, [radius, radius]),
        Shape::Ellipse { center, semi_axes } => (center, semi_axes),
        _ => unreachable!(),
    };
    let dt = TAU / n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut speed = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * dt;
        let pos = [center[0] + axes[0] * t.cos(), center[1] + axes[1] * t.sin(), 0.0];
        let sp = ((axes[0] * t.sin()).powi(2) + (axes[1] * t.cos()).powi(2)).sqrt();
        let ks = surface.principal_curvatures(pos);
        nodes.push(SurfaceNode {
            pos,
            normal: surface.normal_at(pos),
            weight: sp * dt,
            h_mean: ks[0] + ks[1],
            k_gauss: 0.0,
            lb_h: 0.0,
        });
        speed.push(sp);
    }
    let mut q = SurfaceQuadrature { nodes, curve_param: Some(CurveParam { speed, dt }) };
    // Δ_Γ H = κ_ss along the curve.
    let h_vals: Vec<f64> = q.nodes.iter().map(|n| n.h_mean).collect();
    let dh = q.curve_tangential_derivative(&h_vals);
    let ddh = q.curve_tangential_derivative(&dh);
    for (node, lb) in q.nodes.iter_mut().zip(ddh) {
        node.lb_h = lb;
    }
    q
}

/// Gauss–Legendre nodes/weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = pk;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

fn lat_long_quadrature(surface: &Surface, n: usize) -> SurfaceQuadrature {
    let (center, axes) = match surface.shape {
        Shape::Sphere { center, radius } => (center, [radius; 3]),
        Shape::Ellipsoid { center, semi_axes } => (center, semi_axes),
        _ => unreachable!(),
    };
    let n_theta = n;
    let n_phi = 2 * n;
    let (xs, ws) = gauss_legendre(n_theta);
    let dphi = TAU / n_phi as f64;
    // Cotangent Laplace–Beltrami of H on a triangulated parametric mesh,
    // evaluated on the same (θ, φ) grid and carried onto the nodes.
    let lb = ellipsoid_lb_h(surface, center, axes);

    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (it, (&cos_t, &wt)) in xs.iter().zip(&ws).enumerate() {
        let _ = it;
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        for ip in 0..n_phi {
            let phi = ip as f64 * dphi;
            let u = [sin_t * phi.cos(), sin_t * phi.sin(), cos_t];
            let pos = [
                center[0] + axes[0] * u[0],
                center[1] + axes[1] * u[1],
                center[2] + axes[2] * u[2],
            ];
            // Surface measure of (θ=acos, φ) chart: |r_θ × r_φ| dθ dφ with
            // the GL rule in cos θ: dθ sinθ = -d(cosθ).
            // r_θ = (a cosθ cosφ, b cosθ sinφ, -c sinθ), r_φ = (-a sinθ sinφ, b sinθ cosφ, 0).
            let cross = [
                axes[1] * axes[2] * sin_t * u[0],
                axes[0] * axes[2] * sin_t * u[1],
                axes[0] * axes[1] * sin_t * cos_t,
            ];
            let jac = vec3::norm(cross); // = sinθ · |...|
            let ks = surface.principal_curvatures(pos);
            nodes.push(SurfaceNode {
                pos,
                normal: surface.normal_at(pos),
                // wt is the weight in cosθ; jac/sinθ is the area density per dθ dφ
                // divided by sinθ.
                weight: wt * dphi * jac / sin_t,
                h_mean: ks[0] + ks[1],
                k_gauss: ks[0] * ks[1],
                lb_h: lb.eval(pos, center),
            });
        }
    }
    SurfaceQuadrature { nodes, curve_param: None }
}

fn torus_quadrature(surface: &Surface, n: usize) -> SurfaceQuadrature {
    let Shape::Torus { center, major_radius: rr, minor_radius: r } = surface.shape else {
        unreachable!()
    };
    let (n_u, n_v) = (n, 2 * n);
    let (du, dv) = (TAU / n_u as f64, TAU / n_v as f64);
    let mut nodes = Vec::with_capacity(n_u * n_v);
    for iu in 0..n_u {
        let u = iu as f64 * du; // tube angle
        for iv in 0..n_v {
            let v = iv as f64 * dv; // ring angle
            let rho = rr + r * u.cos();
            let pos = [
                center[0] + rho * v.cos(),
                center[1] + rho * v.sin(),
                center[2] + r * u.sin(),
            ];
            let ks = surface.principal_curvatures(pos);
            nodes.push(SurfaceNode {
                pos,
                normal: surface.normal_at(pos),
                weight: r * rho * du * dv,
                h_mean: ks[0] + ks[1],
                k_gauss: ks[0] * ks[1],
                lb_h: 0.0,
            });
        }
    }
    SurfaceQuadrature { nodes, curve_param: None }
}

/// Cotangent Laplace–Beltrami of the analytic mean curvature on a
/// triangulated lat-long mesh of an ellipsoid, with nearest-vertex lookup
/// for evaluation at quadrature nodes.
struct EllipsoidLb {
    verts: Vec<[f64; 3]>,
    lb: Vec<f64>,
}

impl EllipsoidLb {
    fn eval(&self, pos: [f64; 3], _center: [f64; 3]) -> f64 {
        // Nearest vertex; the mesh is fine enough that this is within the
        // scheme's own O(h²) error.
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, v) in self.verts.iter().enumerate() {
            let d = vec3::norm(vec3::sub(*v, pos));
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        self.lb[best]
    }
}

fn ellipsoid_lb_h(surface: &Surface, center: [f64; 3], axes: [f64; 3]) -> EllipsoidLb {
    // Sphere: H constant, Δ_Γ H = 0 without any mesh work.
    if (axes[0] - axes[1]).abs() < 1e-14 && (axes[1] - axes[2]).abs() < 1e-14 {
        return EllipsoidLb { verts: vec![center], lb: vec![0.0] };
    }
    let (n_t, n_p) = (96usize, 192usize);
    let mut verts = Vec::new();
    let mut h_vals = Vec::new();
    // Interior rings plus two poles.
    for i in 1..n_t {
        let theta = PI * i as f64 / n_t as f64;
        for j in 0..n_p {
            let phi = TAU * j as f64 / n_p as f64;
            let pos = [
                center[0] + axes[0] * theta.sin() * phi.cos(),
                center[1] + axes[1] * theta.sin() * phi.sin(),
                center[2] + axes[2] * theta.cos(),
            ];
            let ks = surface.principal_curvatures(pos);
            verts.push(pos);
            h_vals.push(ks[0] + ks[1]);
        }
    }
    let north = verts.len();
    verts.push([center[0], center[1], center[2] + axes[2]]);
    {
        let ks = surface.principal_curvatures(*verts.last().unwrap());
        h_vals.push(ks[0] + ks[1]);
    }
    let south = verts.len();
    verts.push([center[0], center[1], center[2] - axes[2]]);
    {
        let ks = surface.principal_curvatures(*verts.last().unwrap());
        h_vals.push(ks[0] + ks[1]);
    }

    let ring = |i: usize, j: usize| (i - 1) * n_p + (j % n_p);
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for j in 0..n_p {
        tris.push([north, ring(1, j + 1), ring(1, j)]);
        tris.push([south, ring(n_t - 1, j), ring(n_t - 1, j + 1)]);
    }
    for i in 1..n_t - 1 {
        for j in 0..n_p {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }

    let lb = cotan_laplacian(&verts, &tris, &h_vals);
    EllipsoidLb { verts, lb }
}

/// Cotangent-weight discrete Laplace–Beltrami with barycentric lumped mass:
/// `(Δ_Γ f)_v = (1/A_v) Σ_e ½(cot α + cot β)(f_u - f_v)`.
fn cotan_laplacian(verts: &[[f64; 3]], tris: &[[usize; 3]], f: &[f64]) -> Vec<f64> {
    let n = verts.len();
    let mut acc = vec![0.0; n];
    let mut area = vec![0.0; n];
    for t in tris {
        let [a, b, c] = *t;
        let (pa, pb, pc) = (verts[a], verts[b], verts[c]);
        let ab = vec3::sub(pb, pa);
        let ac = vec3::sub(pc, pa);
        let bc = vec3::sub(pc, pb);
        let tri_area = 0.5 * vec3::norm(vec3::cross(ab, ac));
        if tri_area < 1e-30 {
            continue;
        }
        for v in [a, b, c] {
            area[v] += tri_area / 3.0;
        }
        // cot at each corner, applied to the opposite edge.
        let cot_a = vec3::dot(ab, ac) / (2.0 * tri_area);
        let cot_b = vec3::dot(vec3::scale(ab, -1.0), bc) / (2.0 * tri_area);
        let cot_c = vec3::dot(vec3::scale(ac, -1.0), vec3::scale(bc, -1.0)) / (2.0 * tri_area);
        // Edge (b, c) is opposite a, etc.
        acc[b] += 0.5 * cot_a * (f[c] - f[b]);
        acc[c] += 0.5 * cot_a * (f[b] - f[c]);
        acc[a] += 0.5 * cot_b * (f[c] - f[a]);
        acc[c] += 0.5 * cot_b * (f[a] - f[c]);
        acc[a] += 0.5 * cot_c * (f[b] - f[a]);
        acc[b] += 0.5 * cot_c * (f[a] - f[b]);
    }
    acc.iter().zip(&area).map(|(s, a)| if *a > 0.0 { s / a } else { 0.0 }).collect()
}

/// Pair density `c(x, y, c_a, n) = (k/2)|x-y|² c_a ω(x, y, n)` and its
/// closed-form derivatives, shared by all sharp references.
pub struct PairOracle<'a> {
    pub params: &'a ModelParams,
}

impl PairOracle<'_> {
    fn omega(&self, r: f64) -> f64 {
        if self.params.omega_std.is_infinite() {
            return self.params.omega_hat;
        }
        let q = (r - 1.0) / self.params.omega_std;
        self.params.omega_hat * (self.params.weight_sign.factor() * q * q).exp()
    }

    fn omega_prime(&self, r: f64) -> f64 {
        if self.params.omega_std.is_infinite() {
            return 0.0;
        }
        let s2 = self.params.omega_std * self.params.omega_std;
        self.omega(r) * self.params.weight_sign.factor() * 2.0 * (r - 1.0) / s2
    }

    pub fn density(&self, x: [f64; 3], y: [f64; 3], ca: f64, n: [f64; 3]) -> f64 {
        let u = vec3::sub(x, y);
        let d2 = vec3::dot(u, u);
        let r = vec3::dot(u, n) / d2.sqrt();
        0.5 * self.params.spring_k * d2 * ca * self.omega(r)
    }

    pub fn d_ca(&self, x: [f64; 3], y: [f64; 3], n: [f64; 3]) -> f64 {
        let u = vec3::sub(x, y);
        let d2 = vec3::dot(u, u);
        let r = vec3::dot(u, n) / d2.sqrt();
        0.5 * self.params.spring_k * d2 * self.omega(r)
    }

    /// `∇_y c` at fixed `n`, `c_a`.
    pub fn grad_y(&self, x: [f64; 3], y: [f64; 3], ca: f64, n: [f64; 3]) -> [f64; 3] {
        let u = vec3::sub(x, y);
        let dist = vec3::norm(u);
        let r = vec3::dot(u, n) / dist;
        let w = self.omega(r);
        let wp = self.omega_prime(r);
        let k = self.params.spring_k;
        let mut g = [0.0; 3];
        for a in 0..3 {
            let dr = -n[a] / dist + r * u[a] / (dist * dist);
            g[a] = 0.5 * k * ca * (-2.0 * u[a] * w + dist * dist * wp * dr);
        }
        g
    }

    /// Explicit-x gradient of `c` at fixed `n`, `c_a`.
    pub fn grad_x(&self, x: [f64; 3], y: [f64; 3], ca: f64, n: [f64; 3]) -> [f64; 3] {
        vec3::scale(self.grad_y(x, y, ca, n), -1.0)
    }

    /// `∇_n c`.
    pub fn grad_n(&self, x: [f64; 3], y: [f64; 3], ca: f64, n: [f64; 3]) -> [f64; 3] {
        let u = vec3::sub(x, y);
        let dist = vec3::norm(u);
        let r = vec3::dot(u, n) / dist;
        let wp = self.omega_prime(r);
        vec3::scale(u, 0.5 * self.params.spring_k * ca * dist * wp)
    }

    /// Explicit-x gradient of `∂c/∂c_a` at fixed `n`.
    pub fn grad_x_d_ca(&self, x: [f64; 3], y: [f64; 3], n: [f64; 3]) -> [f64; 3] {
        let u = vec3::sub(x, y);
        let dist = vec3::norm(u);
        let r = vec3::dot(u, n) / dist;
        let w = self.omega(r);
        let wp = self.omega_prime(r);
        let k = self.params.spring_k;
        let mut g = [0.0; 3];
        for a in 0..3 {
            let dr = n[a] / dist - r * u[a] / (dist * dist);
            g[a] = 0.5 * k * (2.0 * u[a] * w + dist * dist * wp * dr);
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_quadrature_area_and_moments() {
        let s = Surface::sphere([0.1, -0.2, 0.3], 0.7);
        let q = SurfaceQuadrature::build(&s, 48);
        let area = q.area();
        let exact = 4.0 * PI * 0.49;
        assert!((area - exact).abs() < 1e-10 * exact, "area {area} vs {exact}");
        // Smooth integrand: spectral accuracy.
        let v = q.integrate(|n| n.pos[2] * n.pos[2]);
        // ∫ z² over sphere centered at z₀: A(z₀² + R²/3).
        let exact = exact * (0.09 + 0.49 / 3.0);
        assert!((v - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn circle_quadrature_length_and_curvature() {
        let s = Surface::circle([0.0, 0.0], 0.3);
        let q = SurfaceQuadrature::build(&s, 256);
        assert!((q.area() - TAU * 0.3).abs() < 1e-12);
        for n in &q.nodes {
            assert!((n.h_mean - 1.0 / 0.3).abs() < 1e-12);
            assert!(n.lb_h.abs() < 1e-9);
        }
    }

    #[test]
    fn ellipse_curvature_derivative_consistency() {
        // Δ_Γ κ for the ellipse: check the symmetry points have zero slope
        // and that quadrature recovers ∫ κ ds = 2π.
        let s = Surface::ellipse([0.0, 0.0], [0.5, 0.3]);
        let q = SurfaceQuadrature::build(&s, 512);
        let total_curv = q.integrate(|n| n.h_mean);
        assert!((total_curv - TAU).abs() < 1e-10, "∫κ = {total_curv}");
    }

    #[test]
    fn torus_quadrature_area() {
        let s = Surface::torus([0.0; 3], 2.0, 0.5);
        let q = SurfaceQuadrature::build(&s, 64);
        let exact = TAU * TAU * 2.0 * 0.5;
        assert!((q.area() - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn cotan_laplacian_sphere_eigenfunction() {
        // On the unit sphere, Δ_Γ z = -2z.
        let s = Surface::sphere([0.0; 3], 1.0);
        let Shape::Sphere { center, .. } = s.shape else { unreachable!() };
        let _ = center;
        let (n_t, n_p) = (48usize, 96usize);
        let mut verts = Vec::new();
        for i in 1..n_t {
            let theta = PI * i as f64 / n_t as f64;
            for j in 0..n_p {
                let phi = TAU * j as f64 / n_p as f64;
                verts.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
            }
        }
        verts.push([0.0, 0.0, 1.0]);
        verts.push([0.0, 0.0, -1.0]);
        let north = verts.len() - 2;
        let south = verts.len() - 1;
        let ring = |i: usize, j: usize| (i - 1) * n_p + (j % n_p);
        let mut tris = Vec::new();
        for j in 0..n_p {
            tris.push([north, ring(1, j + 1), ring(1, j)]);
            tris.push([south, ring(n_t - 1, j), ring(n_t - 1, j + 1)]);
        }
        for i in 1..n_t - 1 {
            for j in 0..n_p {
                let (a, b, c, d) =
                    (ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j));
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            }
        }
        let f: Vec<f64> = verts.iter().map(|v| v[2]).collect();
        let lb = cotan_laplacian(&verts, &tris, &f);
        let mut worst = 0.0f64;
        for (v, l) in verts.iter().zip(&lb).take(north) {
            worst = worst.max((l + 2.0 * v[2]).abs());
        }
        assert!(worst < 0.02, "max |Δz + 2z| = {worst}");
    }
}
