use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ill-formed interval: {0}")]
    IllFormedInterval(String),

    #[error("missing value for parameter `{0}`")]
    MissingParameter(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("unknown place `{0}`")]
    UnknownPlace(String),

    #[error("unknown transition `{0}`")]
    UnknownTransition(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("valuation {0} lies outside the parameter domain")]
    OutsideDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot elapse {requested} time units, at most {allowed} allowed")]
    TimeOverrun { requested: u32, allowed: String },

    #[error("place `{place}` exceeds the token bound {bound} ({tokens} tokens)")]
    KBoundViolation {
        place: String,
        tokens: u32,
        bound: u32,
    },

    #[error("state graph is incomplete (capacity of {0} states reached)")]
    Incomplete(usize),

    #[error("time horizon {needed} exceeds the configured cap {cap}")]
    HorizonOverflow { needed: u32, cap: u32 },

    #[error("horizon {0} too small to decide the formula")]
    HorizonTooSmall(u32),

    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("formula shape error: {0}")]
    Shape(String),

    #[error("invalid net: {0}")]
    InvalidNet(String),

    #[error("invalid observer: {0}")]
    Observer(String),

    #[error("invalid search box: {0}")]
    InvalidBox(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
