use thiserror::Error;

/// Errors raised by the matrix layer, the models and the classifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("map is singular or ill-conditioned (condition number {condition:.3e})")]
    SingularMap { condition: f64 },

    #[error("adaptive quadrature did not converge on [0, {t}]")]
    QuadratureFailure { t: f64 },

    #[error("integration unstable: {0}")]
    IntegrationUnstable(String),

    #[error("every complement step over the horizon was singular")]
    AllStepsSingular,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid run parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
