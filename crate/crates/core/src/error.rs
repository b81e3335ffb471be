use thiserror::Error;

/// Errors shared across the engine.
#[derive(Debug, Error)]
pub enum GameError {
    /// An argument fell outside an operation's domain (negative time,
    /// non-positive speed, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An algorithm was invoked on a game outside the class it is proven
    /// for. The message names the violated requirement.
    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    /// A brute-force search would visit more states than allowed.
    #[error("budget exceeded: search needs {needed} states, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    /// Best-response dynamics ran out of steps before converging or
    /// detecting a cycle.
    #[error("step budget exhausted after {0} steps")]
    StepBudgetExceeded(usize),

    /// Generator parameters admit no instance.
    #[error("parameter infeasible: {0}")]
    ParameterInfeasible(String),

    /// A constructed instance violates a structural invariant.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A random-sampling spec is self-contradictory.
    #[error("infeasible sample spec: {0}")]
    InfeasibleSpec(String),

    /// A profile does not have the shape an operation requires.
    #[error("malformed profile: {0}")]
    MalformedProfile(String),
}

pub type Result<T> = std::result::Result<T, GameError>;
