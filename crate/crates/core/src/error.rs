use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("period matrix is not symmetric: |Ω[{row}][{col}] - Ω[{col}][{row}]| = {deviation:e} exceeds {tol:e}")]
    Asymmetry {
        row: usize,
        col: usize,
        deviation: f64,
        tol: f64,
    },
    #[error("imaginary part is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("outside the upper half plane: {0}")]
    Domain(String),
    #[error("the zero charge has no area")]
    DegenerateCharge,
    #[error("monodromy exponent {imag:e} is {distance:e} away from the nearest multiple of π")]
    Snap { imag: f64, distance: f64 },
    #[error("base charge is degenerate: |v[{index}]| = {modulus:e}")]
    DegenerateBase { index: usize, modulus: f64 },
    #[error("probe is not proportional to the base (mismatch {mismatch:e})")]
    NotASolution { mismatch: f64 },
    #[error("cover monodromy deviates from the lattice Z + c̄Z by {defect:e}")]
    LatticeDefect { defect: f64 },
    #[error("cover degree {degree} is not a positive integer")]
    NotIntegralDegree { degree: f64 },
    #[error("cover is undefined for a real ratio c = {0}")]
    RealRatio(f64),
    #[error("theta sums diverge: Re(D'/D) = {0:e} <= 0")]
    ConvergenceDomain(f64),
    #[error("rationality violated: {0}")]
    BadRationality(String),
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("({k}, {j}) is not in the lattice Γ{branch}")]
    NotInGamma { k: i64, j: i64, branch: char },
    #[error("{}line {line}: {message}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }
}
