use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("expression is not positive at x = {x} (value {value})")]
    NotPositive { x: f64, value: f64 },

    #[error("expression evaluates to a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("empty or inverted interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },

    #[error("coefficient `{field}`: {source}")]
    Field {
        field: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("endpoints must satisfy a < 0 < b, got a = {a}, b = {b}")]
    Ordering { a: f64, b: f64 },

    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),

    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },

    #[error("right-hand side is not finite at x = {x}")]
    NonFiniteRhs { x: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("adaptive quadrature on [{lo}, {hi}] exhausted its recursion depth")]
    QuadratureDepth { lo: f64, hi: f64 },

    #[error("could not bracket eigenvalue {n} within [{lo}, {hi}]")]
    BracketExpansion { n: usize, lo: f64, hi: f64 },

    #[error("eigenvalue index must be at least 1")]
    ZeroIndex,

    #[error("inconsistent second-order coefficient: volume form {volume}, boundary form {boundary}")]
    NuMismatch { volume: f64, boundary: f64 },

    #[error("resonant corrector is not solvable: w(0) = {got}, expected {expected}")]
    Solvability { got: f64, expected: f64 },

    #[error("solvability condition degenerates at omega = {omega} (coefficient {coefficient:e})")]
    Resonant { omega: f64, coefficient: f64 },

    #[error("amplitude undefined: delta = pi/2 and v0(0) = 0 at omega = {omega}")]
    HalfPiInconsistent { omega: f64 },

    #[error("no admissible frequency for l = {l} in [{lo}, {hi}]")]
    NoAdmissibleRoot { l: i64, lo: f64, hi: f64 },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn in_field(self, field: &'static str) -> Error {
        Error::Field { field, source: Box::new(self) }
    }

    /// True for errors in the problem description rather than the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::NotPositive { .. }
                | Error::NonFinite { .. }
                | Error::BadInterval { .. }
                | Error::Field { .. }
                | Error::Ordering { .. }
                | Error::Epsilon(_)
                | Error::ZeroIndex
                | Error::Invalid(_)
        )
    }
}
