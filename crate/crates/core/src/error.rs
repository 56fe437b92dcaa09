use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("gate {gate} has arity {arity} but {targets} targets were given")]
    ArityMismatch {
        gate: String,
        arity: usize,
        targets: usize,
    },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("matrix for {0} is not unitary")]
    NonUnitary(String),

    #[error("controlled gate would have arity {0}, maximum is 3")]
    ArityOverflow(usize),

    #[error("{what}: {needed} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("fault location {0} does not exist in the circuit")]
    UnknownFaultLocation(String),

    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("verifier is not reversible: {0}")]
    NotReversible(String),

    #[error("eigenvalue precondition violated: {0}")]
    EigenPrecondition(String),

    #[error("search instance has no solutions")]
    NoSolutions,

    #[error("collapse onto an outcome with zero probability (qubit {0})")]
    ZeroProbability(usize),
}

impl Error {
    /// True for errors caused by simulation resource limits.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
