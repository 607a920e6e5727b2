use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("state is not normalized (squared norm {0})")]
    Normalization(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("clean-discard violation on register `{register}`: trace distance {distance:e} from |0><0|")]
    CleanViolation { register: String, distance: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Validity(String),
    #[error("unknown resource `{0}`")]
    Lookup(String),
    #[error("internal error: {0}")]
    Internal(String),
}

macro_rules! err {
    ($kind:ident, $($arg:tt)*) => {
        $crate::error::Error::$kind(alloc::format!($($arg)*))
    };
}
pub(crate) use err;
