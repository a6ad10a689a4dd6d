//! Periodic lattices, the nearest-neighbour derivative operators and
//! functions of translation-invariant operators.
//!
//! A translation-invariant operator is stored by its circulant symbol
//! `σ(k)`, its eigenvalue on the plane wave `e^{-i k·x}`. The dense matrix
//! is `A_xy = c(x - y)` with `c(d) = (1/N) Σ_k σ(k) e^{-i k·d}`; it is
//! materialized only on request because 2-d lattices make it large.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;

/// Weight given to each nearest-neighbour bond by `S` and `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    /// ½ per neighbour: 1-d symbols `cos k` and `i sin k`.
    Half,
    /// 1 per neighbour: 2-d symbol `2 cos k₁ + 2 cos k₂`.
    Unit,
}

impl Stencil {
    pub fn default_for_dim(dim: usize) -> Self {
        if dim == 1 {
            Stencil::Half
        } else {
            Stencil::Unit
        }
    }

    fn weight(self) -> f64 {
        match self {
            Stencil::Half => 0.5,
            Stencil::Unit => 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawLattice {
    extent: Vec<usize>,
    #[serde(default)]
    stencil: Option<Stencil>,
}

/// Periodic chain (`dim = 1`) or square torus (`dim = 2`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLattice", into = "RawLattice")]
pub struct LatticeSpec {
    extent: Vec<usize>,
    stencil: Stencil,
}

impl TryFrom<RawLattice> for LatticeSpec {
    type Error = Error;

    fn try_from(raw: RawLattice) -> Result<Self> {
        let lattice = LatticeSpec::new(raw.extent)?;
        Ok(match raw.stencil {
            Some(stencil) => lattice.with_stencil(stencil),
            None => lattice,
        })
    }
}

impl From<LatticeSpec> for RawLattice {
    fn from(lattice: LatticeSpec) -> Self {
        RawLattice {
            extent: lattice.extent,
            stencil: Some(lattice.stencil),
        }
    }
}

impl LatticeSpec {
    pub fn new(extent: Vec<usize>) -> Result<Self> {
        if extent.is_empty() || extent.len() > 2 {
            return Err(Error::InvalidLattice(format!(
                "dimension must be 1 or 2, got {}",
                extent.len()
            )));
        }
        if let Some(&r) = extent.iter().find(|&&r| r < 4) {
            return Err(Error::InvalidLattice(format!(
                "every extent must be at least 4, got {r}"
            )));
        }
        let stencil = Stencil::default_for_dim(extent.len());
        Ok(LatticeSpec { extent, stencil })
    }

    pub fn chain(sites: usize) -> Result<Self> {
        Self::new(vec![sites])
    }

    pub fn square(side: usize) -> Result<Self> {
        Self::new(vec![side, side])
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    /// Total number of sites (= number of modes).
    pub fn sites(&self) -> usize {
        self.extent.iter().product()
    }

    /// Row-major site index `x + R·y`, coordinates taken modulo the extent.
    pub fn site_index(&self, coords: &[i64]) -> usize {
        let mut index = 0;
        let mut stride = 1;
        for (&c, &len) in coords.iter().zip(&self.extent) {
            index += c.rem_euclid(len as i64) as usize * stride;
            stride *= len;
        }
        index
    }

    pub fn coords(&self, site: usize) -> Vec<i64> {
        let mut rem = site;
        self.extent
            .iter()
            .map(|&len| {
                let c = rem % len;
                rem /= len;
                c as i64
            })
            .collect()
    }

    /// Index of the displacement `x - y` in kernel arrays.
    pub fn displacement(&self, x: usize, y: usize) -> usize {
        let mut rx = x;
        let mut ry = y;
        let mut index = 0;
        let mut stride = 1;
        for &len in &self.extent {
            let d = (rx % len + len - ry % len) % len;
            rx /= len;
            ry /= len;
            index += d * stride;
            stride *= len;
        }
        index
    }

    pub fn wavenumber(&self, mode: usize) -> Wavenumber {
        let mut rem = mode;
        let mut n = [0i64; 2];
        let mut k = [0.0; 2];
        for (axis, &len) in self.extent.iter().enumerate() {
            let slot = rem % len;
            rem /= len;
            n[axis] = slot as i64 - (len / 2) as i64;
            k[axis] = 2.0 * PI * n[axis] as f64 / len as f64;
        }
        Wavenumber { index: mode, n, k }
    }

    /// All modes in canonical order (`n` ascending along axis 0 fastest).
    pub fn modes(&self) -> Vec<Wavenumber> {
        (0..self.sites()).map(|j| self.wavenumber(j)).collect()
    }

    /// Symbol of `S` at a wavenumber.
    pub fn s_symbol(&self, w: &Wavenumber) -> f64 {
        let weight = self.stencil.weight();
        w.k[..self.dim()].iter().map(|k| 2.0 * weight * k.cos()).sum()
    }
}

/// Plane-wave label. Axis 1 is zero on a chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    /// Canonical mode index.
    pub index: usize,
    pub n: [i64; 2],
    pub k: [f64; 2],
}

/// Realness class of an operator built from a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Real symmetric matrix; real symbol.
    Even,
    /// Real antisymmetric matrix; imaginary symbol.
    Odd,
}

#[derive(Debug, Clone)]
enum Repr {
    Circulant {
        symbol: Vec<Complex64>,
        /// Real kernel, absent when the symbol has non-finite values.
        kernel: Option<Vec<f64>>,
    },
    Dense(DMatrix<f64>),
}

#[derive(Debug, Clone)]
pub struct LatticeOperator {
    lattice: LatticeSpec,
    repr: Repr,
}

fn relative_scale(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(1.0_f64, |acc, v| acc.max(v.abs()))
}

impl LatticeOperator {
    /// Builds the operator with the given symbol, checking that the kernel
    /// is real and has the requested parity.
    pub fn from_symbol(
        lattice: LatticeSpec,
        symbol: Vec<Complex64>,
        parity: Parity,
    ) -> Result<Self> {
        if symbol.len() != lattice.sites() {
            return Err(Error::InvalidParameter(format!(
                "symbol has {} values for {} modes",
                symbol.len(),
                lattice.sites()
            )));
        }
        let finite = symbol.iter().all(|s| s.re.is_finite() && s.im.is_finite());
        let kernel = if finite {
            let raw = fourier::kernel_from_symbol(&symbol, lattice.extent());
            let scale = relative_scale(raw.iter().map(|c| c.norm()));
            let max_imag = raw.iter().fold(0.0_f64, |acc, c| acc.max(c.im.abs()));
            if max_imag > 1e-10 * scale {
                return Err(Error::ParityViolation { max_imag });
            }
            let sign = match parity {
                Parity::Even => 1.0,
                Parity::Odd => -1.0,
            };
            let mut max_skew = 0.0_f64;
            let mut kernel = vec![0.0; raw.len()];
            for d in 0..raw.len() {
                let minus = fourier::negate_displacement(d, lattice.extent());
                max_skew = max_skew.max((raw[d].re - sign * raw[minus].re).abs());
                kernel[d] = 0.5 * (raw[d].re + sign * raw[minus].re);
            }
            if max_skew > 1e-10 * scale {
                return Err(Error::ParityViolation { max_imag: max_skew });
            }
            Some(kernel)
        } else {
            None
        };
        Ok(LatticeOperator {
            lattice,
            repr: Repr::Circulant { symbol, kernel },
        })
    }

    /// Wraps a dense matrix with no circulant representation.
    pub fn from_dense(lattice: LatticeSpec, entries: DMatrix<f64>) -> Result<Self> {
        let n = lattice.sites();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}x{}, lattice has {n} sites",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(LatticeOperator {
            lattice,
            repr: Repr::Dense(entries),
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn symbol(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Circulant { symbol, .. } => Some(symbol),
            Repr::Dense(_) => None,
        }
    }

    /// Displacement kernel `c(d)` of a circulant operator.
    pub fn kernel(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Circulant { kernel, .. } => kernel.as_deref(),
            Repr::Dense(_) => None,
        }
    }

    pub fn entry(&self, x: usize, y: usize) -> Result<f64> {
        match &self.repr {
            Repr::Circulant { kernel, .. } => kernel
                .as_ref()
                .map(|c| c[self.lattice.displacement(x, y)])
                .ok_or(Error::NonFiniteOperator),
            Repr::Dense(m) => Ok(m[(x, y)]),
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        match &self.repr {
            Repr::Circulant { kernel, .. } => {
                let c = kernel.as_ref().ok_or(Error::NonFiniteOperator)?;
                let n = self.lattice.sites();
                Ok(DMatrix::from_fn(n, n, |x, y| c[self.lattice.displacement(x, y)]))
            }
            Repr::Dense(m) => Ok(m.clone()),
        }
    }

    /// Largest |deviation| between the dense spectrum and the symbol values,
    /// matched greedily as multisets.
    pub fn duality_deviation(&self) -> Result<f64> {
        let symbol = self.symbol().ok_or(Error::NotTranslationInvariant)?;
        let dense = self.to_dense()?;
        let eigen: Vec<Complex64> = if dense.clone().transpose() == dense {
            dense
                .symmetric_eigenvalues()
                .iter()
                .map(|&e| Complex64::new(e, 0.0))
                .collect()
        } else {
            dense.complex_eigenvalues().iter().copied().collect()
        };
        Ok(multiset_distance(symbol, &eigen))
    }
}

/// Greedy nearest-neighbour matching distance between two equal-size sets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for x in a {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, y) in b.iter().enumerate() {
            if !used[j] {
                let dist = (x - y).norm();
                if dist < best {
                    best = dist;
                    best_j = j;
                }
            }
        }
        if best_j == usize::MAX {
            return f64::INFINITY;
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}

/// Symmetric nearest-neighbour operator `S`.
pub fn build_s(lattice: &LatticeSpec) -> LatticeOperator {
    let symbol = lattice
        .modes()
        .iter()
        .map(|w| Complex64::new(lattice.s_symbol(w), 0.0))
        .collect();
    LatticeOperator::from_symbol(lattice.clone(), symbol, Parity::Even)
        .expect("S is real symmetric")
}

/// Antisymmetric nearest-neighbour operator `T` (chains only), symbol `i sin k`.
pub fn build_t(lattice: &LatticeSpec) -> Result<LatticeOperator> {
    if lattice.dim() != 1 {
        return Err(Error::InvalidLattice(
            "antisymmetric derivative is only defined on a chain".into(),
        ));
    }
    let weight = lattice.stencil().weight();
    let symbol = lattice
        .modes()
        .iter()
        .map(|w| Complex64::new(0.0, 2.0 * weight * w.k[0].sin()))
        .collect();
    LatticeOperator::from_symbol(lattice.clone(), symbol, Parity::Odd)
}

/// `f(op)` evaluated on the symbol. `parity` declares the realness class of
/// the result; a mismatch is reported as [`Error::ParityViolation`].
pub fn operator_function<F>(op: &LatticeOperator, f: F, parity: Parity) -> Result<LatticeOperator>
where
    F: Fn(Complex64) -> Complex64,
{
    let symbol = op.symbol().ok_or(Error::NotTranslationInvariant)?;
    let mapped = symbol.iter().map(|&s| f(s)).collect();
    LatticeOperator::from_symbol(op.lattice.clone(), mapped, parity)
}

/// Dense oracle for functions of a real symmetric operator: `V f(Λ) Vᵀ`.
pub fn dense_function_symmetric<F>(matrix: &DMatrix<f64>, f: F) -> DMatrix<f64>
where
    F: Fn(f64) -> f64,
{
    let eig = matrix.clone().symmetric_eigen();
    let mapped = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * mapped * eig.eigenvectors.transpose()
}
