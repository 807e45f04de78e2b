//! Sharp-interface jump-condition references: the coupling functionals
//! `Ī₀ … M̄₀` paired with a test field, and the full traction field on a
//! surface.
//!
//! All mean curvatures here are `H_μ = -(κ̂₁ + κ̂₂)`, the level-set sign the
//! expansion formulas carry (negative for spheres with outward normal).

use crate::energies::ModelParams;
use crate::util::vec3;

use super::oracle::{PairOracle, SurfaceNode, SurfaceQuadrature};

/// `C⁰` data of a membrane/cortex pair evaluated at the quadrature nodes:
/// on the membrane the cortex integral `C⁰_{Γ²}`, on the cortex the
/// membrane integrals needed for the `J̄, K̄, L̄, M̄` terms.
pub struct SharpCoupling<'a> {
    pub membrane: &'a SurfaceQuadrature,
    pub cortex: &'a SurfaceQuadrature,
    /// Active-linker density at cortex nodes.
    pub ca: Vec<f64>,
    /// `C⁰_{Γ²}(y)` and `∇_y C⁰_{Γ²}(y)` at membrane nodes.
    pub c0_on_membrane: Vec<f64>,
    pub grad_c0_on_membrane: Vec<[f64; 3]>,
    /// `C⁰_{Γ¹}(x)`, explicit-x gradient, `∂_c C⁰_{Γ¹}` and `∇_n C⁰_{Γ¹}`
    /// at cortex nodes.
    pub c0_on_cortex: Vec<f64>,
    pub grad_c0_on_cortex: Vec<[f64; 3]>,
    pub dca_c0_on_cortex: Vec<f64>,
    pub grad_x_dca_on_cortex: Vec<[f64; 3]>,
    pub grad_n_c0_on_cortex: Vec<[f64; 3]>,
}

impl<'a> SharpCoupling<'a> {
    pub fn new(
        membrane: &'a SurfaceQuadrature,
        cortex: &'a SurfaceQuadrature,
        ca_fn: impl Fn([f64; 3]) -> f64,
        params: &ModelParams,
    ) -> Self {
        let oracle = PairOracle { params };
        let ca: Vec<f64> = cortex.nodes.iter().map(|n| ca_fn(n.pos)).collect();

        let mut c0_on_membrane = Vec::with_capacity(membrane.nodes.len());
        let mut grad_c0_on_membrane = Vec::with_capacity(membrane.nodes.len());
        for ny in &membrane.nodes {
            let mut c0 = 0.0;
            let mut g = [0.0; 3];
            for (nx, &cax) in cortex.nodes.iter().zip(&ca) {
                c0 += nx.weight * oracle.density(nx.pos, ny.pos, cax, nx.normal);
                let gy = oracle.grad_y(nx.pos, ny.pos, cax, nx.normal);
                for a in 0..3 {
                    g[a] += nx.weight * gy[a];
                }
            }
            c0_on_membrane.push(c0);
            grad_c0_on_membrane.push(g);
        }

        let mut c0_on_cortex = Vec::with_capacity(cortex.nodes.len());
        let mut grad_c0_on_cortex = Vec::with_capacity(cortex.nodes.len());
        let mut dca_c0_on_cortex = Vec::with_capacity(cortex.nodes.len());
        let mut grad_x_dca_on_cortex = Vec::with_capacity(cortex.nodes.len());
        let mut grad_n_c0_on_cortex = Vec::with_capacity(cortex.nodes.len());
        for (nx, &cax) in cortex.nodes.iter().zip(&ca) {
            let mut c0 = 0.0;
            let mut gx = [0.0; 3];
            let mut dca = 0.0;
            let mut gdca = [0.0; 3];
            let mut gn = [0.0; 3];
            for ny in &membrane.nodes {
                let w = ny.weight;
                c0 += w * oracle.density(nx.pos, ny.pos, cax, nx.normal);
                dca += w * oracle.d_ca(nx.pos, ny.pos, nx.normal);
                let g1 = oracle.grad_x(nx.pos, ny.pos, cax, nx.normal);
                let g2 = oracle.grad_x_d_ca(nx.pos, ny.pos, nx.normal);
                let g3 = oracle.grad_n(nx.pos, ny.pos, cax, nx.normal);
                for a in 0..3 {
                    gx[a] += w * g1[a];
                    gdca[a] += w * g2[a];
                    gn[a] += w * g3[a];
                }
            }
            c0_on_cortex.push(c0);
            grad_c0_on_cortex.push(gx);
            dca_c0_on_cortex.push(dca);
            grad_x_dca_on_cortex.push(gdca);
            grad_n_c0_on_cortex.push(gn);
        }

        Self {
            membrane,
            cortex,
            ca,
            c0_on_membrane,
            grad_c0_on_membrane,
            c0_on_cortex,
            grad_c0_on_cortex,
            dca_c0_on_cortex,
            grad_x_dca_on_cortex,
            grad_n_c0_on_cortex,
        }
    }

    fn h_mu(node: &SurfaceNode) -> f64 {
        -node.h_mean
    }

    /// `Ī₀(ψ) = ∫_Γ¹ (-∇_y C⁰·ν + H_μ C⁰) ψ·ν`.
    pub fn i_bar(&self, psi: impl Fn([f64; 3]) -> [f64; 3]) -> f64 {
        self.membrane
            .nodes
            .iter()
            .zip(self.c0_on_membrane.iter().zip(&self.grad_c0_on_membrane))
            .map(|(n, (&c0, g))| {
                let val = -vec3::dot(*g, n.normal) + Self::h_mu(n) * c0;
                n.weight * val * vec3::dot(psi(n.pos), n.normal)
            })
            .sum()
    }

    /// `J̄₀(ψ) = ∫_Γ² (-∇_x C⁰·ν + H_μ C⁰) ψ·ν`.
    pub fn j_bar(&self, psi: impl Fn([f64; 3]) -> [f64; 3]) -> f64 {
        self.cortex
            .nodes
            .iter()
            .zip(self.c0_on_cortex.iter().zip(&self.grad_c0_on_cortex))
            .map(|(n, (&c0, g))| {
                let val = -vec3::dot(*g, n.normal) + Self::h_mu(n) * c0;
                n.weight * val * vec3::dot(psi(n.pos), n.normal)
            })
            .sum()
    }

    /// `K̄₀(ψ) = -∫_Γ² ∂_c C⁰ H_μ c_a ψ·ν`.
    pub fn k_bar(&self, psi: impl Fn([f64; 3]) -> [f64; 3]) -> f64 {
        self.cortex
            .nodes
            .iter()
            .zip(self.dca_c0_on_cortex.iter().zip(&self.ca))
            .map(|(n, (&dca, &cax))| {
                -n.weight * dca * Self::h_mu(n) * cax * vec3::dot(psi(n.pos), n.normal)
            })
            .sum()
    }

    /// `L̄₀(ψ) = -∫_Γ² ∇_Γ(∂_c C⁰) c_a · ψ` (curves only).
    pub fn l_bar(&self, psi: impl Fn([f64; 3]) -> [f64; 3]) -> f64 {
        let dvals = self.cortex.curve_tangential_derivative(&self.dca_c0_on_cortex);
        self.cortex
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let t = self.cortex_tangent(i);
                let grad_gamma = vec3::scale(t, dvals[i]);
                -n.weight * self.ca[i] * vec3::dot(grad_gamma, psi(n.pos))
            })
            .sum()
    }

    /// `M̄₀(ψ) = -∫_Γ² (div_Γ(∇_n C⁰) + H_μ ∇_n C⁰·ν) ψ·ν` (curves only).
    pub fn m_bar(&self, psi: impl Fn([f64; 3]) -> [f64; 3]) -> f64 {
        let div = self.cortex.curve_tangential_divergence(&self.grad_n_c0_on_cortex);
        self.cortex
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let val = div[i] + Self::h_mu(n) * vec3::dot(self.grad_n_c0_on_cortex[i], n.normal);
                -n.weight * val * vec3::dot(psi(n.pos), n.normal)
            })
            .sum()
    }

    fn cortex_tangent(&self, i: usize) -> [f64; 3] {
        let n = self.cortex.nodes.len();
        let (ip, im) = ((i + 1) % n, (i + n - 1) % n);
        vec3::normalize(vec3::sub(self.cortex.nodes[ip].pos, self.cortex.nodes[im].pos))
    }

    /// Coupling traction on the membrane:
    /// `-(∇_y C⁰·ν)ν + H_μ C⁰ ν` per node.
    pub fn membrane_traction(&self) -> Vec<[f64; 3]> {
        self.membrane
            .nodes
            .iter()
            .zip(self.c0_on_membrane.iter().zip(&self.grad_c0_on_membrane))
            .map(|(n, (&c0, g))| {
                let s = -vec3::dot(*g, n.normal) + Self::h_mu(n) * c0;
                vec3::scale(n.normal, s)
            })
            .collect()
    }

    /// Full coupling traction on the cortex (curves: all five terms; other
    /// surfaces: the tangential-derivative terms need a curve rule).
    pub fn cortex_traction(&self) -> Vec<[f64; 3]> {
        let n_nodes = self.cortex.nodes.len();
        let is_curve = self.cortex.is_curve();
        let dvals = if is_curve {
            self.cortex.curve_tangential_derivative(&self.dca_c0_on_cortex)
        } else {
            vec![0.0; n_nodes]
        };
        let div = if is_curve {
            self.cortex.curve_tangential_divergence(&self.grad_n_c0_on_cortex)
        } else {
            // On spheres with symmetric data, div_Γ(gν) = g·div_Γ ν = g·Σκ̂.
            self.cortex
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| vec3::dot(self.grad_n_c0_on_cortex[i], n.normal) * n.h_mean)
                .collect()
        };
        (0..n_nodes)
            .map(|i| {
                let node = &self.cortex.nodes[i];
                let h_mu = Self::h_mu(node);
                let nu = node.normal;
                let mut tr = vec3::scale(
                    nu,
                    -vec3::dot(self.grad_c0_on_cortex[i], nu) + h_mu * self.c0_on_cortex[i],
                );
                // -∂_c C⁰ H_μ c_a ν
                tr = vec3::add(
                    tr,
                    vec3::scale(nu, -self.dca_c0_on_cortex[i] * h_mu * self.ca[i]),
                );
                // -∇_Γ(∂_c C⁰) c_a
                if is_curve {
                    let t = self.cortex_tangent(i);
                    tr = vec3::add(tr, vec3::scale(t, -dvals[i] * self.ca[i]));
                }
                // -(div_Γ(∇_n C⁰) + H_μ ∇_n C⁰·ν) ν
                let m_val = div[i] + h_mu * vec3::dot(self.grad_n_c0_on_cortex[i], nu);
                vec3::add(tr, vec3::scale(nu, -m_val))
            })
            .collect()
    }
}
