use thiserror::Error;

use crate::cf::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("surds over different square roots cannot be combined (sqrt({0}) vs sqrt({1}))")]
    IncompatibleSurds(String, String),

    #[error("{value} is not a vertex of F_{n}")]
    NotInXN { value: String, n: u64 },

    #[error("{}", not_prime_power_message(*.n, *.witness))]
    NotPrimePower { n: u64, witness: Option<(u64, u64)> },

    #[error("{0} and {1} are not adjacent in F_{2}")]
    NotAdjacent(String, String, u64),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid continued fraction: {0}")]
    InvalidCf(Violation),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("backtracking required at term {0}")]
    BacktrackNeeded(usize),

    /// A proved invariant failed to hold. Always a bug.
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than a broken invariant.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

fn not_prime_power_message(n: u64, witness: Option<(u64, u64)>) -> String {
    match witness {
        Some((a, b)) => format!(
            "N={n} is not a prime power: F_{n} is disconnected, no vertex strictly between \
             {a}/{n} and {b}/{n} is reachable from inf (witness pair A={a}, B={b})"
        ),
        None => format!("N={n} is not a prime power"),
    }
}
