use thiserror::Error as ThisError;

/// Errors raised by library operations.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable context: {0}")]
    InvalidContext(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("unknown world {0}")]
    UnknownWorld(i64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model is not stratified: {0}")]
    NotStratified(String),
    #[error("no world generates the whole model")]
    NoRoot,
    #[error("models are not pairwise 1-congruent")]
    NotOneCongruent,
    #[error("`{0}` does not have a constant truth value on the sheet")]
    ConstancyViolated(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("formula `{0}` mentions [0] where only [1] is allowed")]
    NotSheetFormula(String),
    #[error("sheet formula is not GL-projective: {0}")]
    GlNotProjective(String),
    #[error("bound exhausted: {0}")]
    BoundExhausted(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
