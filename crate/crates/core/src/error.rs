use thiserror::Error;

pub type Result<T> = std::result::Result<T, FridgeError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FridgeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("particle index {index} out of range for a {count}-particle space")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid space shape: {0}")]
    InvalidShape(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown parameter `{name}` for model {model}")]
    UnknownParameter { name: String, model: String },

    #[error("temperature must be positive (got {0})")]
    NonPositiveTemperature(f64),

    #[error("every bath rate is zero; the stationary state is not unique")]
    NonUniqueStationaryState,

    #[error("perfect-insulation formula has non-positive denominator {0}; parameters lie outside its cooling regime")]
    OutsideCoolingRegime(f64),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("derived parameter rules form a cycle through `{0}`")]
    CyclicRules(String),

    #[error("cannot parse rule `{rule}`: {reason}")]
    RuleSyntax { rule: String, reason: String },

    #[error("linear solve failed: {0}")]
    Numerical(String),
}
