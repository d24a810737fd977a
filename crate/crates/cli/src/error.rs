use std::fmt;

use reserve_core::boosting::BoostError;
use reserve_core::cascade::CascadeError;
use reserve_core::featurization::FeatureError;
use reserve_core::policy::PolicyError;
use reserve_core::simulator::SimError;

/// Failure reported as one `error: kind=... message=...` line.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new("usage", message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new("config", message)
    }

    pub fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        CliError::new("io", format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        if self.kind == "usage" {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message: String = self
            .message
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        write!(f, "error: kind={} message={}", self.kind, message)
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        let kind = match e {
            FeatureError::SchemaMismatch { .. } | FeatureError::Dimension { .. } => "schema",
            FeatureError::Io(_) => "io",
            FeatureError::Parse { .. } | FeatureError::InvalidRecord { .. } => "parse",
            _ => "config",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<BoostError> for CliError {
    fn from(e: BoostError) -> Self {
        let kind = match e {
            BoostError::Schema { .. } | BoostError::Dimension { .. } => "schema",
            _ => "training",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<CascadeError> for CliError {
    fn from(e: CascadeError) -> Self {
        match e {
            CascadeError::Boost(b) => b.into(),
            CascadeError::Config(_) => CliError::config(e.to_string()),
            other => CliError::new("training", other.to_string()),
        }
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        match e {
            PolicyError::Feature(f) => f.into(),
            PolicyError::Boost(b) => b.into(),
            PolicyError::Cascade(c) => c.into(),
            PolicyError::Config(_) | PolicyError::MissingBucket(_) => {
                CliError::config(e.to_string())
            }
            PolicyError::Io(_) => CliError::new("io", e.to_string()),
            PolicyError::SingleClass { .. } => CliError::new("training", e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Policy(p) => p.into(),
            SimError::Feature(f) => f.into(),
            SimError::Io(_) => CliError::new("io", e.to_string()),
            SimError::ZeroBaseline => CliError::new("replay", e.to_string()),
            SimError::EmptyGrid | SimError::Config(_) => CliError::config(e.to_string()),
        }
    }
}
