use thiserror::Error;

use crate::scenario::ActorId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Schema or invariant violation in a scenario document or value.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("infeasible case-study parameters for actor {actor}: {reason}")]
    InfeasibleParams { actor: ActorId, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("window [{t}, {t}+{k}] is outside the scenario horizon 0..={horizon}")]
    WindowOutOfRange { t: usize, k: usize, horizon: usize },

    #[error("trajectory windows do not match: {0}")]
    WindowMismatch(String),

    #[error("trajectory history is empty")]
    EmptyHistory,

    #[error("unknown actor id {0}")]
    UnknownActor(ActorId),

    #[error("degenerate scenario: the Ego has no navigable plan even without other actors")]
    DegenerateScenario,

    #[error("lattice universe of {size} sequences exceeds the cap of {cap}")]
    LatticeTooLarge { size: u128, cap: u64 },

    #[error("no feasible plan: every edge leaving the Ego's start state collides")]
    NoFeasiblePlan,

    #[error("plan distributions are defined over different universes")]
    UniverseMismatch,

    #[error("sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("scenario document: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("scenario document: {0}")]
    Serialize(#[from] toml::ser::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidScenario(_)
            | Error::InfeasibleParams { .. }
            | Error::Parse(_)
            | Error::UnknownActor(_) => 3,
            Error::DegenerateScenario => 4,
            Error::LatticeTooLarge { .. } => 5,
            Error::Sample { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
