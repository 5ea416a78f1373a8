use thiserror::Error;

/// Errors surfaced by parameter validation, grid construction, kernel
/// assembly, and the experiment runners.
#[derive(Debug, Error)]
pub enum CslError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("critical coupling q(d-2s) = d+alpha at d={d}, s={s}, alpha={alpha}, q={q}: the interpolation exponents are undefined on this line")]
    CriticalQ { d: u32, s: f64, alpha: f64, q: f64 },

    #[error("radial estimates require d >= 2 (got d={0})")]
    RadialTheoryUnavailable(u32),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("kernel error: {0}")]
    Kernel(String),

    #[error("quadrature failed to reach tolerance {tol:e} (best error {best:e}) for {context}")]
    QuadratureNonConvergence {
        tol: f64,
        best: f64,
        context: String,
    },

    #[error("degenerate quotient: {0}")]
    DegenerateQuotient(String),

    #[error("p={p} is outside the valid range: {detail}")]
    OutsideValidity { p: f64, detail: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CslError>;
