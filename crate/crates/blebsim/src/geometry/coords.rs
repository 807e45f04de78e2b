//! Interfacial (boundary-layer) coordinates: the map
//! `x ↦ (P_S(x), d(x)/ε)` on a tubular neighbourhood of a surface.

use crate::util::vec3;

use super::surface::Surface;
use super::GeometryError;

/// Tubular-neighbourhood coordinate chart around a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacialCoords {
    surface: Surface,
    eps: f64,
    delta: f64,
}

impl InterfacialCoords {
    /// `δ` defaults to `min(feature_radius / 4, 10 ε)`, which keeps the
    /// nearest-point projection unique and the tube resolved.
    pub fn new(surface: Surface, eps: f64) -> Result<Self, GeometryError> {
        let delta = (surface.feature_radius() / 4.0).min(10.0 * eps);
        Self::with_delta(surface, eps, delta)
    }

    pub fn with_delta(surface: Surface, eps: f64, delta: f64) -> Result<Self, GeometryError> {
        if !(eps > 0.0) || !(delta > eps) {
            return Err(GeometryError::InvalidTube);
        }
        Ok(Self { surface, eps, delta })
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `x ↦ (s, z)` with `s` the nearest surface point and `z = d(x)/ε`.
    pub fn map(&self, x: [f64; 3]) -> Result<([f64; 3], f64), GeometryError> {
        let d = self.surface.signed_distance(x)?;
        if d.abs() >= self.delta {
            return Err(GeometryError::OutsideTube);
        }
        let s = self.surface.project(x)?;
        Ok((s, d / self.eps))
    }

    /// Inverse chart `(s, z) ↦ s + εz·ν(s)`.
    pub fn unmap(&self, s: [f64; 3], z: f64) -> [f64; 3] {
        let nu = self.surface.normal_at(s);
        vec3::add(s, vec3::scale(nu, self.eps * z))
    }
}
