use thiserror::Error;

use crate::model::Value;

/// Errors raised by the engine when inputs do not type-check against a
/// model or an epistemic state is malformed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` is exogenous; only endogenous variables can be intervened on or form causes")]
    NotEndogenous(String),

    #[error("value `{value}` is not in the range of `{variable}`")]
    ValueOutOfRange { variable: String, value: Value },

    #[error("variable `{0}` appears more than once")]
    DuplicateVariable(String),

    #[error("model `{model}` is invalid: {reason}")]
    InvalidModel { model: String, reason: String },

    #[error("context does not assign exogenous variable `{0}`")]
    MissingContextValue(String),

    #[error("context assigns `{0}`, which is not an exogenous variable of the model")]
    UnexpectedContextValue(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("empty conjunction")]
    EmptyConjunction,

    #[error("contrast has {found} values but the conjunction has {expected}")]
    ContrastArity { expected: usize, found: usize },

    #[error("formula has an intervention prefix where a plain Boolean formula is required")]
    UnexpectedIntervention,

    #[error("epistemic state is empty")]
    EmptyState,

    #[error("setting {0} appears more than once in the epistemic state")]
    DuplicateSetting(String),

    #[error("probability of setting {setting} must be positive, got {probability}")]
    NonPositiveProbability { setting: String, probability: String },

    #[error("probabilities sum to {0}, not 1")]
    ProbabilitySum(String),

    #[error("cannot condition on {0}: it has probability zero")]
    ZeroProbability(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
