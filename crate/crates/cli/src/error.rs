use serde::Serialize;

/// A failed command. `Usage` exits with 2, everything else with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] feeloc::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use feeloc::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Csv(_) => "csv",
            CliError::Core(e) => match e {
                E::Validation(_) => "invalid_fee",
                E::EmptyInterval => "empty_interval",
                E::EmptyProfile => "empty_profile",
                E::EmptyPlacement => "empty_placement",
                E::InvalidLottery(_) => "invalid_lottery",
                E::Infeasible => "infeasible",
                E::BadRange(..) => "bad_range",
                E::BadIndex(..) => "bad_index",
                E::TooLarge(_) => "too_large",
                E::BadParams(_) => "bad_params",
                E::Parse(_) => "parse",
            },
        }
    }

    /// Single-line JSON object for standard error.
    pub fn to_json(&self) -> String {
        let body = ErrorJson { error: ErrorBody { kind: self.kind(), message: self.to_string() } };
        serde_json::to_string(&body).expect("error body serializes")
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
