use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("pattern length must be at least 1")]
    InvalidLength,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid slot map: {0}")]
    SlotMap(String),
    #[error("parameter `{name}` out of range: {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("invalid pattern text: {0}")]
    PatternText(String),
    #[error("training error: {0}")]
    Training(&'static str),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("generation error: {0}")]
    Generation(String),
    #[error("invalid configuration:\n{0}")]
    InvalidConfig(FieldErrors),
    #[error("enumeration capacity exceeded: {free} free indices (max {max})")]
    Capacity { free: usize, max: usize },
}

/// A validation failure located by a dotted field path such as
/// `recall.q.phonological` or `damage[0].d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FieldErrors(pub Vec<FieldError>);

impl fmt::Display for FieldErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "  {e}")?;
        }
        Ok(())
    }
}
