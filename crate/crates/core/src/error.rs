use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("internal function `{name}` read before assignment at t={time}")]
    Unassigned { name: String, time: u32 },
    #[error("step budget of {budget} exceeded (non-terminating run?)")]
    BudgetExceeded { budget: u64 },
    #[error("value {value} exceeds the magnitude cap at t={time}")]
    ValueOverflow { value: i64, time: u32 },
    #[error("input `{name}` read at index {index} outside 1..={n} at t={time}")]
    InputOutOfRange {
        name: String,
        index: i64,
        n: usize,
        time: u32,
    },
    #[error("external `{name}` is not supplied by a word input")]
    UnsupportedExternal { name: String },
    #[error("output assigned at t={time} but not immediately followed by halt")]
    OutputNotFinal { time: u32 },
    #[error("halt reached without assigning the output")]
    NoOutput,
    #[error("control fell off the end of the program after label {label}")]
    FellOffEnd { label: u32 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("run on input {input}: {source}")]
    Run { input: String, source: RunError },
    #[error("domain of {size} inputs exceeds the enumeration cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
