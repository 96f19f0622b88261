use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integral diverges: {0}")]
    Integrability(String),
    #[error("no small-jump activity at truncation level {eps}")]
    NoSmallJumps { eps: f64 },
    #[error("degenerate law: {0}")]
    DegenerateLaw(String),
    #[error("insufficient input: {0}")]
    InsufficientInput(String),
    #[error("bound not applicable: {0}")]
    Inapplicable(String),
    #[error("quadrature stopped at estimated error {achieved:e} (target {target:e})")]
    Accuracy { achieved: f64, target: f64 },
    #[error("construction defect: {0}")]
    ConstructionDefect(String),
    #[error("moment budget exceeded: needs {needed}, budget {budget}")]
    BudgetViolated { needed: f64, budget: f64 },
    #[error("exact simulation unavailable: {0}")]
    ExactSimulationUnavailable(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}
