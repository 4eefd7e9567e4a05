use thiserror::Error;

/// Errors raised by group construction, the character-table engine and the
/// verification layer.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {p}^{n} does not fit the 2^31 residue range")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: u64, modulus: u64 },
    #[error("operation requires an odd prime, got p = {0}")]
    OddPrimeRequired(u64),
    #[error("group of order {required} exceeds the element budget {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("cannot reduce from level {from} to level {to}")]
    LevelMismatch { from: u32, to: u32 },
    #[error("operation requires n >= 2")]
    RequiresN2,
    #[error("element set is not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("eigenspaces could not be split over F_{ell}: {reason}")]
    SplitFailure { ell: u64, reason: String },
    #[error("residue {residue} mod {ell} does not lift into [0, {bound}] ({what})")]
    LiftOutOfRange {
        what: String,
        residue: u64,
        ell: u64,
        bound: u64,
    },
    #[error("bad subspace: {0}")]
    BadSubspace(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status: 1 when a computed invariant failed, 2 when the
    /// run was rejected for its parameters or resources.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SplitFailure { .. }
            | Error::LiftOutOfRange { .. }
            | Error::Invariant(_)
            | Error::NotASubgroup(_) => 1,
            _ => 2,
        }
    }
}
