//! The Hamiltonian catalogue: local, noncompact and compact nonlocal
//! hopping and pairing models on periodic lattices.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_s, build_t, operator_function, LatticeOperator, LatticeSpec, Parity, Wavenumber};
use crate::spectral::bdg_symbol_energies;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `A = -S`, dispersion `-cos k`.
    LocalHopping,
    /// `A = S`, `B = T`.
    LocalPairing,
    /// `A = cosh(αS)`, `B = sinh(αT)`.
    NoncompactNlPairing,
    /// `A = cos(αS)`, `B = sinh(-αT)`.
    CompactNlPairing,
    /// `A = exp(-α² S)`, dispersion `e^{-α² cos k}`.
    NoncompactNlHopping,
    /// `A = cos(iαT)`, dispersion `cos(α sin k)`.
    CompactCos,
    /// `A = sin(αS)`, dispersion `sin(α s(k))`.
    CompactSin,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::LocalHopping,
        ModelKind::LocalPairing,
        ModelKind::NoncompactNlPairing,
        ModelKind::CompactNlPairing,
        ModelKind::NoncompactNlHopping,
        ModelKind::CompactCos,
        ModelKind::CompactSin,
    ];

    pub fn is_pairing(self) -> bool {
        matches!(
            self,
            ModelKind::LocalPairing | ModelKind::NoncompactNlPairing | ModelKind::CompactNlPairing
        )
    }

    pub fn supports_dim(self, dim: usize) -> bool {
        match self {
            ModelKind::LocalHopping | ModelKind::CompactSin | ModelKind::NoncompactNlHopping => {
                dim == 1 || dim == 2
            }
            _ => dim == 1,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelKind::LocalHopping => "local_hopping",
            ModelKind::LocalPairing => "local_pairing",
            ModelKind::NoncompactNlPairing => "noncompact_nl_pairing",
            ModelKind::CompactNlPairing => "compact_nl_pairing",
            ModelKind::NoncompactNlHopping => "noncompact_nl_hopping",
            ModelKind::CompactCos => "compact_cos",
            ModelKind::CompactSin => "compact_sin",
        };
        f.write_str(name)
    }
}

/// Overall energy scale ε multiplying the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnergyScale {
    Fixed(f64),
    /// `ε = 1/α²`, the nonrelativistic localization energy.
    Named(NamedScale),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedScale {
    Nonrelativistic,
}

impl Default for EnergyScale {
    fn default() -> Self {
        EnergyScale::Fixed(1.0)
    }
}

impl EnergyScale {
    pub fn value(self, alpha: f64) -> f64 {
        match self {
            EnergyScale::Fixed(e) => e,
            EnergyScale::Named(NamedScale::Nonrelativistic) => 1.0 / (alpha * alpha),
        }
    }
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub epsilon: EnergyScale,
    /// Particle fraction; ignored by pairing models.
    #[serde(default = "half")]
    pub filling: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, alpha: f64) -> Self {
        ModelSpec {
            kind,
            alpha,
            epsilon: EnergyScale::default(),
            filling: 0.5,
        }
    }

    pub fn with_filling(mut self, filling: f64) -> Self {
        self.filling = filling;
        self
    }

    pub fn with_epsilon(mut self, epsilon: EnergyScale) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::NegativeAlpha(self.alpha));
        }
        if !self.kind.supports_dim(lattice.dim()) {
            return Err(Error::IncompatibleModel {
                kind: self.kind.to_string(),
                dim: lattice.dim(),
            });
        }
        if !self.kind.is_pairing() && !(self.filling > 0.0 && self.filling <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "filling must lie in (0, 1], got {}",
                self.filling
            )));
        }
        let eps = self.epsilon.value(self.alpha);
        if !eps.is_finite() || eps == 0.0 {
            return Err(Error::InvalidParameter(format!("energy scale {eps} is unusable")));
        }
        Ok(())
    }
}

/// Kinetic matrix `A` (symmetric) and optional pairing matrix `B` (antisymmetric).
#[derive(Debug, Clone)]
pub struct HamiltonianPair {
    pub kinetic: LatticeOperator,
    pub pairing: Option<LatticeOperator>,
}

impl HamiltonianPair {
    pub fn lattice(&self) -> &LatticeSpec {
        self.kinetic.lattice()
    }
}

fn scaled(eps: f64, f: impl Fn(Complex64) -> Complex64) -> impl Fn(Complex64) -> Complex64 {
    move |x| f(x) * eps
}

pub fn build_model(spec: &ModelSpec, lattice: &LatticeSpec) -> Result<HamiltonianPair> {
    spec.validate(lattice)?;
    let alpha = spec.alpha;
    let eps = spec.epsilon.value(alpha);
    let s = build_s(lattice);
    let even = Parity::Even;
    let odd = Parity::Odd;
    let pair = match spec.kind {
        ModelKind::LocalHopping => HamiltonianPair {
            kinetic: operator_function(&s, scaled(eps, |x| -x), even)?,
            pairing: None,
        },
        ModelKind::NoncompactNlHopping => HamiltonianPair {
            kinetic: operator_function(&s, scaled(eps, move |x| (x * -(alpha * alpha)).exp()), even)?,
            pairing: None,
        },
        ModelKind::CompactCos => {
            let t = build_t(lattice)?;
            let i = Complex64::i();
            HamiltonianPair {
                kinetic: operator_function(&t, scaled(eps, move |x| (i * alpha * x).cos()), even)?,
                pairing: None,
            }
        }
        ModelKind::CompactSin => HamiltonianPair {
            kinetic: operator_function(&s, scaled(eps, move |x| (x * alpha).sin()), even)?,
            pairing: None,
        },
        ModelKind::LocalPairing => {
            let t = build_t(lattice)?;
            HamiltonianPair {
                kinetic: operator_function(&s, scaled(eps, |x| x), even)?,
                pairing: Some(operator_function(&t, scaled(eps, |x| x), odd)?),
            }
        }
        ModelKind::NoncompactNlPairing => {
            let t = build_t(lattice)?;
            HamiltonianPair {
                kinetic: operator_function(&s, scaled(eps, move |x| (x * alpha).cosh()), even)?,
                pairing: Some(operator_function(&t, scaled(eps, move |x| (x * alpha).sinh()), odd)?),
            }
        }
        ModelKind::CompactNlPairing => {
            let t = build_t(lattice)?;
            HamiltonianPair {
                kinetic: operator_function(&s, scaled(eps, move |x| (x * alpha).cos()), even)?,
                pairing: Some(operator_function(&t, scaled(eps, move |x| (x * -alpha).sinh()), odd)?),
            }
        }
    };
    Ok(pair)
}

/// Single-particle (or positive quasiparticle) energy per wavenumber, in
/// canonical mode order.
pub fn dispersion(spec: &ModelSpec, lattice: &LatticeSpec) -> Result<Vec<(Wavenumber, f64)>> {
    let h = build_model(spec, lattice)?;
    let energies: Vec<f64> = match &h.pairing {
        None => h
            .kinetic
            .symbol()
            .expect("catalogue models are circulant")
            .iter()
            .map(|s| s.re)
            .collect(),
        Some(_) => bdg_symbol_energies(&h)?,
    };
    Ok(lattice.modes().into_iter().zip(energies).collect())
}
