use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Output(String),
    #[error(transparent)]
    Core(#[from] spdc_oam::Error),
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    /// 2 for configuration problems, 3 for physics or domain errors, 4 for
    /// numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        use spdc_oam::Error as E;
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Core(e) if e.is_convergence() => 4,
            CliError::Core(E::Parameter(_) | E::Registry(_)) => 2,
            CliError::Core(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        use spdc_oam::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Output(_) => "output",
            CliError::Core(e) => match e {
                E::Domain(_) => "domain",
                E::Model(_) => "model",
                E::NoPhaseMatching(_) => "no-phase-matching",
                E::Evanescent(_) => "evanescent",
                E::DegenerateConfiguration(_) => "degenerate-configuration",
                E::Aliasing(_) => "aliasing",
                E::Parameter(_) => "parameter",
                E::Fit(_) => "fit",
                E::NonConvergence(_) => "non-convergence",
                E::Registry(_) => "registry",
            },
        }
    }

    pub fn to_json(&self) -> String {
        let r = ErrorReport {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        };
        serde_json::to_string(&r).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}
