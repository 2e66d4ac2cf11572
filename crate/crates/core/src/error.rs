use thiserror::Error;

use crate::symexpr::{ExprError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("not projectable")]
    NotProjectable,
    #[error("not in T1_V: base component {0} depends on fiber coordinates")]
    NotInT1(usize),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("singular matrix: {0}")]
    Singular(&'static str),
    #[error("value degree overflow: {0} exceeds {1}")]
    ValueDegreeOverflow(usize, usize),
    #[error("integration blow-up at sample {0}")]
    BlowUp(usize),
    #[error("singular frame at sample {0}")]
    SingularFrame(usize),
    #[error("unknown case '{0}'")]
    UnknownCase(String),
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
