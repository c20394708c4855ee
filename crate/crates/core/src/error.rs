use thiserror::Error;

use crate::dsl::ParseErrors;
use crate::report::ValidationReport;
use crate::sim::Trace;

/// Errors raised by library operations. Each variant maps to a stable code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("model is not valid: {}", summarize(.0))]
    NotValid(Box<ValidationReport>),
    #[error("model is not in full form")]
    NotFullForm,
    #[error("event region is empty")]
    EmptyRegion,
    #[error("event region is not connected")]
    DisconnectedRegion,
    #[error("reference does not resolve: {0}")]
    DanglingRef(String),
    #[error("instance region must contain the create stage of exactly one thimac")]
    InstanceWithoutCreate,
    #[error("simulation reached the tick limit with work pending")]
    TickLimit(Box<Trace>),
    #[error("guard evaluation failed: {0}")]
    GuardEval(String),
    #[error("counter `{0}` dropped below zero")]
    CapacityUnderflow(String),
    #[error("invalid stimulus: {0}")]
    BadStimulus(String),
    #[error("graph has unreducible events: {0}")]
    Unreducible(String),
    #[error("node `{0}` has an empty label")]
    EmptyLabel(String),
    #[error("invalid property graph: {0}")]
    InvalidGraph(String),
    #[error("no such node `{0}`")]
    NoSuchNode(String),
    #[error("input is not valid for view {0}")]
    InvalidViewInput(String),
    #[error(transparent)]
    Parse(#[from] ParseErrors),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotValid(_) => "E_NOT_VALID",
            Error::NotFullForm => "E_NOT_FULL_FORM",
            Error::EmptyRegion => "E_EMPTY_REGION",
            Error::DisconnectedRegion => "E_DISCONNECTED_REGION",
            Error::DanglingRef(_) => "E_DANGLING_REF",
            Error::InstanceWithoutCreate => "E_INSTANCE_WITHOUT_CREATE",
            Error::TickLimit(_) => "E_TICK_LIMIT",
            Error::GuardEval(_) => "E_GUARD_EVAL",
            Error::CapacityUnderflow(_) => "E_CAPACITY_UNDERFLOW",
            Error::BadStimulus(_) => "E_BAD_STIMULUS",
            Error::Unreducible(_) => "E_UNREDUCIBLE",
            Error::EmptyLabel(_) => "E_EMPTY_LABEL",
            Error::InvalidGraph(_) => "E_INVALID_GRAPH",
            Error::NoSuchNode(_) => "E_NO_SUCH_NODE",
            Error::InvalidViewInput(_) => "E_INVALID_VIEW_INPUT",
            Error::Parse(_) => "E_PARSE",
            Error::Json(_) => "E_JSON",
            Error::Io(_) => "E_IO",
        }
    }
}

fn summarize(r: &ValidationReport) -> String {
    r.errors().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
