//! 1D transverse profiles in the stretched normal variable `z = d/ε` and the
//! optimal transition profile `φ₀(z) = tanh(z/√2)`.

use super::GeometryError;

/// Symmetric 1D grid for profiles: nodes `z_i = -z_max + i·h` with `z = 0`
/// always a node (odd node count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileGrid {
    half_width: f64,
    spacing: f64,
    half_nodes: usize,
}

impl ProfileGrid {
    pub fn new(half_width: f64, spacing: f64) -> Result<Self, GeometryError> {
        if !(half_width > 0.0) || !(spacing > 0.0) || spacing > half_width {
            return Err(GeometryError::InvalidProfileGrid);
        }
        let half_nodes = (half_width / spacing).round() as usize;
        Ok(Self { half_width: half_nodes as f64 * spacing, spacing, half_nodes })
    }

    /// `z_max = 10`, `h_z = 1e-3`; tanh tails are below 1e-8 well inside this.
    pub fn default_grid() -> Self {
        Self::new(10.0, 1e-3).unwrap()
    }

    pub fn len(&self) -> usize {
        2 * self.half_nodes + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn z(&self, i: usize) -> f64 {
        (i as f64 - self.half_nodes as f64) * self.spacing
    }
}

/// Sampled function of the fast variable `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: ProfileGrid,
    values: Vec<f64>,
}

impl Profile {
    pub fn sample(grid: ProfileGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.z(i))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: ProfileGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: ProfileGrid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> ProfileGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoidal quadrature; spectrally accurate for smooth profiles that
    /// decay inside the window.
    pub fn integrate(&self) -> f64 {
        let h = self.grid.spacing();
        let n = self.values.len();
        let inner: f64 = self.values[1..n - 1].iter().sum();
        h * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
    }

    /// Second-order central second derivative; the two edge nodes are set to
    /// zero (profiles decay there).
    pub fn second_derivative(&self) -> Profile {
        self.fd2(1)
    }

    /// Fourth-order five-point second derivative, zero on the outer two nodes.
    pub fn second_derivative_4th(&self) -> Profile {
        self.fd2(2)
    }

    fn fd2(&self, order: usize) -> Profile {
        let h = self.grid.spacing();
        let v = &self.values;
        let n = v.len();
        let mut out = vec![0.0; n];
        match order {
            1 => {
                for i in 1..n - 1 {
                    out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
                }
            }
            2 => {
                for i in 2..n - 2 {
                    out[i] = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1]
                        - v[i - 2])
                        / (12.0 * h * h);
                }
            }
            _ => unreachable!(),
        }
        Profile { grid: self.grid, values: out }
    }

    /// Zero the outermost `m` nodes on each side (used by residual
    /// compositions whose stencils cannot reach the window edge).
    pub fn zero_margin(mut self, m: usize) -> Profile {
        let n = self.values.len();
        for i in 0..m.min(n) {
            self.values[i] = 0.0;
            self.values[n - 1 - i] = 0.0;
        }
        self
    }

    /// Pointwise combination of profiles on one grid.
    pub fn zip_with(&self, other: &Profile, f: impl Fn(f64, f64) -> f64) -> Profile {
        assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Profile { grid: self.grid, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Profile {
        Profile { grid: self.grid, values: self.values.iter().map(|v| f(*v)).collect() }
    }

    /// Export as two-column CSV rows `(z, value)`.
    pub fn csv_rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.grid.len()).map(move |i| (self.grid.z(i), self.values[i]))
    }
}

/// Optimal profile `φ₀(z) = tanh(z/√2)` and its first three derivatives in
/// closed form. `φ₀` is normalized by `φ₀(0) = 0` and solves
/// `φ₀'' = W'(φ₀) = φ₀³ - φ₀` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalProfile {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

pub fn optimal_profile(z: f64) -> OptimalProfile {
    let t = (z / 2f64.sqrt()).tanh();
    let sech2 = 1.0 - t * t;
    OptimalProfile {
        value: t,
        d1: sech2 / 2f64.sqrt(),
        d2: t * t * t - t,
        d3: (3.0 * t * t - 1.0) * sech2 / 2f64.sqrt(),
    }
}

/// `∫ (φ₀')² dz = 2√2/3`, the constant relating diffuse and sharp surface
/// measures.
pub const Z_CONSTANT: f64 = 0.942809041582063365867792482806465;
