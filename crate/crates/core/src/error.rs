use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point outside the valid domain of the {chart} chart: {detail}")]
    Domain { chart: &'static str, detail: String },
    #[error("surface is not regular at the point (|g_u x g_v| = {0:e})")]
    NotRegular(f64),
    #[error("numeric quality check failed for {what}: residual {residual:e}")]
    NumericQuality { what: &'static str, residual: f64 },
    #[error("point lies within {distance:e} of an umbilic (guard radius {radius:e})")]
    NearUmbilic { distance: f64, radius: f64 },
    #[error("point is umbilic; principal directions are undefined")]
    Umbilic,
    #[error("point is not umbilic")]
    NotUmbilic,
    #[error("no focal point (κ=0)")]
    NoFocalPoint,
    #[error("front is not singular here (lambda = {0:e})")]
    NotSingular(f64),
    #[error("t = {t} does not match a focal value (1/k1 = {inv_k1}, 1/k2 = {inv_k2})")]
    SheetMismatch { t: f64, inv_k1: f64, inv_k2: f64 },
    #[error("germ is not singular (nonzero linear part)")]
    RegularGerm,
    #[error("Hessian of the germ has rank {0}, expected 1")]
    KernelRank(usize),
    #[error("no finite determinacy bound available for class {0}")]
    UnsupportedDeterminacy(String),
    #[error("germ carries no unfolding data")]
    MissingUnfolding,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the point or surface (as opposed to malformed input).
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Invalid(_))
    }
}
