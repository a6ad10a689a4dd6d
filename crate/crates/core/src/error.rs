use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("model {kind} is not defined on a {dim}-d lattice")]
    IncompatibleModel { kind: String, dim: usize },

    #[error("locality scale must be non-negative, got {0}")]
    NegativeAlpha(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator has no circulant symbol")]
    NotTranslationInvariant,

    #[error("operator function broke the parity tag: imaginary residue {max_imag:e}")]
    ParityViolation { max_imag: f64 },

    #[error("operator has non-finite symbol values; dense entries are not representable")]
    NonFiniteOperator,

    #[error("expected a {expected} solution")]
    WrongSolutionKind { expected: &'static str },

    #[error("BdG spectrum has a zero mode (|E| = {energy:e}); ground state is ill-defined")]
    DegenerateZeroMode { energy: f64 },

    #[error("eigensolver residual {residual:e} exceeds bound {bound:e}")]
    EigenResidual { residual: f64, bound: f64 },

    #[error("dense and symbol spectra disagree by {deviation:e}")]
    SpectrumMismatch { deviation: f64 },

    #[error("anomalous correlator F violates antisymmetry by {deviation:e}")]
    NonAntisymmetricF { deviation: f64 },

    #[error("correlation matrix G is not Hermitian to {deviation:e}")]
    NonHermitianG { deviation: f64 },

    #[error("entanglement eigenvalue {value:e} outside its admissible range")]
    SpectrumOutOfRange { value: f64 },

    #[error("site {site} outside lattice of {sites} sites")]
    RegionOutOfRange { site: usize, sites: usize },

    #[error("subregion is invalid: {0}")]
    InvalidRegion(String),

    #[error("need at least {needed} samples in the fit window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("fit window has no spread in L")]
    DegenerateWindow,

    #[error("minimizer did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ParityViolation { .. }
                | Error::NonFiniteOperator
                | Error::DegenerateZeroMode { .. }
                | Error::EigenResidual { .. }
                | Error::SpectrumMismatch { .. }
                | Error::NonAntisymmetricF { .. }
                | Error::NonHermitianG { .. }
                | Error::SpectrumOutOfRange { .. }
                | Error::NonConvergence { .. }
                | Error::DegenerateFit(_)
        )
    }
}
