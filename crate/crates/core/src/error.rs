use alloc::string::String;
use core::fmt;

/// A rejected experiment or array description.
///
/// `key` names the offending setting using the dotted names of the config
/// file schema (`frozen.placement`, `values.copies`, ...), so front ends can
/// point the user at the exact line to fix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub key: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &'static str, message: impl Into<String>) -> Self {
        Self {
            key,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

impl core::error::Error for ConfigError {}
