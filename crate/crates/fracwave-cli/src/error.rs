use fracwave::Error;
use std::fmt;

/// Command failure, split by exit code: 2 for invalid input or an
/// inadmissible configuration, 3 for a numerical failure.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical { message: String, diagnostic: serde_json::Value },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError::Numerical { message: message.into(), diagnostic: serde_json::Value::Null }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failure: {m}"),
            CliError::Numerical { message, .. } => write!(f, "numerical failure: {message}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let kind = match &e {
            Error::Domain(_) | Error::InvalidSpec(_) | Error::UnsupportedDimension(..) | Error::Geometry(_) | Error::Coverage(_) => {
                return CliError::Validation(message);
            }
            Error::Singularity(_) => "singularity",
            Error::Accuracy { .. } => "accuracy",
            Error::Resonance(_) => "resonance",
            Error::WavenumberTooSmall { .. } => "wavenumber_too_small",
            Error::Residual { .. } => "residual",
        };
        let mut diagnostic = serde_json::json!({ "kind": kind, "message": message });
        match e {
            Error::Accuracy { partial, .. } => diagnostic["partial"] = serde_json::json!([partial.re, partial.im]),
            Error::WavenumberTooSmall { k, norm } => {
                diagnostic["k"] = k.into();
                diagnostic["norm"] = norm.into();
            }
            Error::Residual { residual, bound } => {
                diagnostic["residual"] = residual.into();
                diagnostic["bound"] = bound.into();
            }
            _ => {}
        }
        CliError::Numerical { message, diagnostic }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical {
            message: format!("i/o error: {e}"),
            diagnostic: serde_json::json!({ "kind": "io", "message": e.to_string() }),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::numerical(format!("json error: {e}"))
    }
}
