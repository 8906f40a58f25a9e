use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base curve: {0}")]
    BadBaseCurve(String),
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),
    #[error("vertex budget exceeded: more than {budget} vertices in ball of radius {radius}")]
    BudgetExceeded { budget: usize, radius: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("patch violates invariants:\n{0}")]
    InvalidFile(String),
    #[error("label map is not a bijection onto the target label set")]
    BadLabelMap,
    #[error("collision error: {0}")]
    Collision(String),
    #[error("unsupported expression: {0}")]
    UnsupportedExpr(String),
    #[error("function parse error: {0}")]
    FnParse(String),
    #[error("analytic: {0}")]
    Analytic(String),
    #[error("{0} is a critical base point")]
    CriticalBasePoint(String),
    #[error("target is a critical value of the function")]
    CriticalTarget,
    #[error("lift error: {0}")]
    Lift(String),
    #[error("disk {index} of the chain contains the singular value {value}")]
    DiskContainsSingular { index: usize, value: String },
    #[error("disk chain broken: disk {index} does not contain the next center")]
    ChainBroken { index: usize },
    #[error("branch continuation failed on grid edge {from} -> {to} (n = {n})")]
    BranchEdge { from: usize, to: usize, n: String },
    #[error("branch mismatch between lifting and closed form: {0}")]
    BranchMismatch(String),
    #[error("convergence check: {0}")]
    Convergence(String),
    #[error("family parameters: {0}")]
    Family(String),
    #[error("resistance diagnostics: {0}")]
    Resistance(String),
    #[error("linear solver did not reach tolerance {tol} (residual {residual}) within {iters} iterations")]
    SolverStalled { tol: f64, residual: f64, iters: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
