//! Run configuration, study drivers and report assembly for the CLI.

mod config;
mod report;
mod runner;

pub use config::{GridConfig, RunConfig, SimulateConfig, StudyConfig, SurfaceConfig, CONFIG_VERSION};
pub use report::render_report;
pub use runner::{
    concentration_study, force_limit, geometry_check, profile_check, simulate, species_check,
    Check, Summary,
};

use thiserror::Error;

/// Exit code semantics: configuration errors map to 2, numeric failures
/// (a study missing its tolerance, a simulation abort) map to 3.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] crate::fields::FieldError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Energy(#[from] crate::energies::EnergyError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_validation() {
        let cfg = RunConfig::from_toml(
            r#"
            version = 1
            seed = 7

            [surface]
            kind = "circle"
            params = [0.3]

            [grid]
            dim = 2
            cells = 128
            side = 1.0

            [params]
            eps = 0.04

            [study]
            eps_seq = [0.04, 0.02]
            kind = "gl"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.surface.as_ref().unwrap().kind, "circle");
        let s = cfg.surface.unwrap().build().unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn under_resolved_config_rejected() {
        let err = RunConfig::from_toml(
            r#"
            [grid]
            cells = 32
            side = 1.0

            [params]
            eps = 0.01
            "#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("under-resolved"));
    }

    #[test]
    fn surface_flag_parsing() {
        let s = SurfaceConfig::parse_flag("sphere:0.3").unwrap();
        assert_eq!(s.kind, "sphere");
        assert_eq!(s.params, vec![0.3]);
        let s = SurfaceConfig::parse_flag("ellipsoid:1.5,1,1@0.1,0,0").unwrap();
        assert_eq!(s.center, vec![0.1, 0.0, 0.0]);
        assert!(SurfaceConfig::parse_flag("sphere").is_err());
        assert!(SurfaceConfig::parse_flag("cube:1").unwrap().build().is_err());
    }

    #[test]
    fn bad_toml_reports_config_error() {
        let err = RunConfig::from_toml("version = ").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
