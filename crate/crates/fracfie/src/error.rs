use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("non-finite {what} evaluation at node {node} (xi = {xi})")]
    NonFinite {
        what: &'static str,
        node: usize,
        xi: f64,
    },

    #[error("theta = {theta} is below the grid spacing {spacing}; no node pair qualifies")]
    DegenerateTheta { theta: f64, spacing: f64 },

    #[error("iteration diverged: sup-norm {norm:.3e} exceeded the blow-up bound {bound:.3e}")]
    Diverged { norm: f64, bound: f64 },

    #[error("unknown problem {name:?}; available built-ins: {available:?}")]
    UnknownProblem {
        name: String,
        available: &'static [&'static str],
    },

    #[error("problem {0:?} declares no S1 envelope; hypothesis (V) cannot be evaluated")]
    MissingEnvelope(String),

    #[error("paper-as-stated P-hat is only available for built-in problems; {0:?} has none")]
    MissingPaperPhat(String),

    #[error(transparent)]
    Parse(#[from] crate::problems::ParseError),

    #[error(transparent)]
    Eval(#[from] crate::problems::EvalError),

    #[error("problem config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("problem file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
