use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("network needs at least 2 neurons, got {0}")]
    TooFewNeurons(usize),

    #[error("potential list must contain a zero entry (min over all neurons is 0), got min {0}")]
    NoZeroEntry(u64),

    #[error("neuron index {index} out of range for a network of {n}")]
    NeuronOutOfRange { index: usize, n: usize },

    #[error("neuron {0} has potential 0 and cannot spike")]
    SilentSpike(usize),

    #[error("rate base must be a finite number greater than 1, got {0}")]
    InvalidBase(f64),

    #[error("the null list is a trap and has no transitions")]
    TrapState,

    #[error("auxiliary dynamics found no allowed transition from {0:?}")]
    NoAllowedTransition(Vec<u64>),

    #[error("stop condition cannot guarantee termination: {0}")]
    UnboundedRun(&'static str),

    #[error("potential lists have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("oracle supports n in {{2, 3}} with cap >= n, got n = {n}, cap = {cap}")]
    OracleRange { n: usize, cap: u64 },

    #[error("state {0:?} is outside the oracle's truncation window")]
    OutsideWindow(Vec<u64>),

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("samples must be finite and strictly positive")]
    NonPositiveSample,

    #[error("no surviving replicas at t = {0}; the conditional estimate is undefined")]
    NoSurvivors(f64),

    #[error("replica {replica} reached the jump budget of {budget} before absorption")]
    Censored { replica: u64, budget: u64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
