use thiserror::Error;

/// Errors raised anywhere in the kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("undecidable group class: {0}")]
    UndecidableClass(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("group spec mismatch")]
    SpecMismatch,

    #[error("invalid pairing data for `{class}`: {message}")]
    InvalidPairing { class: String, message: String },

    #[error("invalid dimension {0}: need d >= 3")]
    InvalidDimension(u32),

    #[error("wrong mode: {0}")]
    WrongMode(String),

    #[error("window overflow at radius {window}: relation `{relation}` leaves the generator window")]
    WindowOverflow { window: u32, relation: String },

    #[error("invalid whisker table: {0}")]
    InvalidWhisker(String),

    #[error("orbit of `{value}` escapes the window")]
    OrbitEscapesWindow { value: String },

    #[error("scene error: {0}")]
    Scene(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn syntax(position: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            position,
            message: message.into(),
        }
    }
}
