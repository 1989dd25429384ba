use thiserror::Error;

/// Errors surfaced by the model and its numerical routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChshError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corrupt measurement record #{time_index}: c = {c} but a*b = {product}")]
    CorruptRecord { time_index: u32, c: i8, product: i8 },

    #[error("channel {0} has no rounds; the correlation is undefined")]
    EmptyChannel(crate::model::Channel),

    #[error("enumeration needs {required} cells, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("{steps} steps exceeds the walk limit of {limit}")]
    StepLimit { steps: u32, limit: u32 },

    #[error("non-finite argument: {0}")]
    NonFinite(String),
}

impl ChshError {
    /// Budget and size limits, as opposed to malformed input.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            ChshError::BudgetExceeded { .. } | ChshError::StepLimit { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, ChshError>;
