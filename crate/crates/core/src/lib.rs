//! Free-fermion lattice models with local and nonlocal (compact or
//! noncompact) derivative operators, their ground-state correlations and the
//! entanglement entropy of subregions.
//!
//! The pipeline runs lattice → model → spectrum → correlations → entropy,
//! and [`scaling`] and [`holography`] analyse the resulting curves.
//!
//! ```
//! use nlfermion::{entropy_of, LatticeSpec, ModelKind, ModelSpec, Subregion};
//!
//! let lattice = LatticeSpec::chain(66)?;
//! let region = Subregion::interval(&lattice, 1, 0)?;
//! let s = entropy_of(&ModelSpec::new(ModelKind::LocalHopping, 0.0), &lattice, &region)?;
//! assert!((s - std::f64::consts::LN_2).abs() < 1e-12);
//! # Ok::<(), nlfermion::Error>(())
//! ```

pub mod correlations;
pub mod entanglement;
pub mod error;
mod fourier;
pub mod holography;
pub mod lattice;
pub mod models;
pub mod scaling;
pub mod spectral;
pub mod verify;

pub use correlations::{ground_state_correlations, CorrelationPair, OccupationSet};
pub use entanglement::{entropy_of, EntanglementSpectrum, GroundState, Subregion};
pub use error::{Error, Result};
pub use holography::{fit_metric, geodesic_length, holographic_entropy, MetricParams};
pub use lattice::{LatticeOperator, LatticeSpec, Stencil};
pub use models::{build_model, EnergyScale, HamiltonianPair, ModelKind, ModelSpec};
pub use scaling::{crossover_report, fit, sweep, EntropyCurve, FitForm, ScalingFit};
pub use spectral::{diagonalize, QuadraticSolution};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/correlations.md")]
    mod correlations {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/scaling.md")]
    mod scaling {}
    #[doc = include_str!("../../../book/src/holography.md")]
    mod holography {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
