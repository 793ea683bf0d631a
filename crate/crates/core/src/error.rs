use thiserror::Error;

use crate::dirichlet::SupCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("range upper end {hi} exceeds prime table limit {limit}")]
    RangeExceedsTable { hi: f64, limit: u64 },

    #[error("budget exceeded: {what} needs {needed} items, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    /// The requested gap was not reachable within the point budget. Carries
    /// the best certificate that fit in the budget.
    #[error("point budget exceeded; best achievable gap is {:e}", .0.gap())]
    SupBudgetExceeded(Box<SupCertificate>),

    #[error("degenerate phases: linear form {value:e} between {h:?} and {k:?} is numerically zero")]
    DegeneratePhases { h: Vec<u32>, k: Vec<u32>, value: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("infeasible scale: {0}")]
    InfeasibleScale(String),

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("requested accuracy unreachable; achieved error bound {achieved:e}")]
    AccuracyUnreachable { achieved: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
