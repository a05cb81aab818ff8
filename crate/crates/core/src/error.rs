use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("hash count {k} is not divisible by level count {d}")]
    NonIntegerHashCount { k: u32, d: usize },

    #[error("ratio is undefined: {0}")]
    UndefinedRatio(&'static str),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("name parse error: {0}")]
    Parse(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("counters are disabled on this filter")]
    CountersDisabled,

    #[error("element is not present in the filter")]
    NotPresent,

    #[error("no observations were supplied")]
    NoData,

    #[error("unknown node {0}")]
    UnknownNode(u32),

    #[error("unknown interface {0}")]
    UnknownInterface(u32),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
