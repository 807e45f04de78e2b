//! Model parameters of the coupled membrane/cortex system.

use serde::{Deserialize, Serialize};

use super::EnergyError;

/// Sign of the exponent in the linker orientation weight
/// `ω̃(r) = ω̂ exp(±(r-1)²/s²)`.
///
/// The printed formula has `+`, which grows without bound and contradicts the
/// weight's role as a per-volume likelihood, so the default is the decaying
/// `-` variant; `PaperLiteral` restores the printed sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WeightExponentSign {
    #[default]
    Negative,
    PaperLiteral,
}

impl WeightExponentSign {
    pub fn factor(self) -> f64 {
        match self {
            WeightExponentSign::Negative => -1.0,
            WeightExponentSign::PaperLiteral => 1.0,
        }
    }
}

/// Disconnection-rate function `ζ(φ_m, n)`.
///
/// The model leaves ζ abstract; the default is a smooth logistic switch in a
/// stretch proxy `ℓ = ε√2·atanh(φ_m)`, the local distance to the membrane
/// mid-surface estimated from the phase-field value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ZetaParams {
    Zero,
    Sigmoid {
        /// Rate scale ζ₀.
        amplitude: f64,
        /// Critical stretch ℓ_crit.
        critical: f64,
        /// Transition width of the logistic.
        width: f64,
    },
}

impl Default for ZetaParams {
    fn default() -> Self {
        ZetaParams::Zero
    }
}

/// All coefficients of the model. The spontaneous curvature is fixed to zero
/// throughout (pure Willmore bending).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Interface width ε.
    pub eps: f64,
    /// Mobility exponent: phase-field mobility is `ε^α`, `0 < α < 1`.
    pub alpha: f64,
    /// Surface-tension moduli of membrane and cortex.
    pub sigma_m: f64,
    pub sigma_c: f64,
    /// Bending rigidities.
    pub bend_m: f64,
    pub bend_c: f64,
    /// Fluid density and viscosity.
    pub rho: f64,
    pub eta: f64,
    /// Linker spring constant `k`.
    pub spring_k: f64,
    /// Orientation weight scale ω̂ and standard deviation `s`.
    pub omega_hat: f64,
    pub omega_std: f64,
    pub weight_sign: WeightExponentSign,
    /// Species diffusivities.
    pub diff_active: f64,
    pub diff_inactive: f64,
    /// Linker repair rate β ≥ 0.
    pub repair_beta: f64,
    pub zeta: ZetaParams,
    /// Relative `e_ε` cutoff defining the interface tubes in the coupling
    /// double sums; recorded in run metadata.
    pub tube_cutoff_rel: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            eps: 0.02,
            alpha: 0.5,
            sigma_m: 1.0,
            sigma_c: 1.0,
            bend_m: 0.01,
            bend_c: 0.01,
            rho: 1.0,
            eta: 1.0,
            spring_k: 1.0,
            omega_hat: 1.0,
            omega_std: 0.5,
            weight_sign: WeightExponentSign::default(),
            diff_active: 0.1,
            diff_inactive: 0.1,
            repair_beta: 0.0,
            zeta: ZetaParams::default(),
            tube_cutoff_rel: 1e-6,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.eps > 0.0) {
            return Err(EnergyError::InvalidParams("eps must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(EnergyError::InvalidParams("alpha must lie in (0, 1)".into()));
        }
        let nonneg = [
            ("sigma_m", self.sigma_m),
            ("sigma_c", self.sigma_c),
            ("bend_m", self.bend_m),
            ("bend_c", self.bend_c),
            ("rho", self.rho),
            ("eta", self.eta),
            ("spring_k", self.spring_k),
            ("diff_active", self.diff_active),
            ("diff_inactive", self.diff_inactive),
            ("repair_beta", self.repair_beta),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(EnergyError::InvalidParams(format!("{name} must be >= 0")));
            }
        }
        if !(self.omega_std > 0.0) {
            return Err(EnergyError::InvalidParams("omega_std must be positive".into()));
        }
        if !(self.tube_cutoff_rel > 0.0 && self.tube_cutoff_rel < 1.0) {
            return Err(EnergyError::InvalidParams("tube_cutoff_rel must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Phase-field mobility `ε^α`.
    pub fn mobility(&self) -> f64 {
        self.eps.powf(self.alpha)
    }

    /// Degenerate-gradient threshold for `n_φ = ∇φ/|∇φ|`:
    /// `10⁻³ · φ₀'(0) / ε`, a fixed fraction of the profile's peak slope.
    pub fn gradient_threshold(&self) -> f64 {
        1e-3 / (self.eps * 2f64.sqrt())
    }
}
