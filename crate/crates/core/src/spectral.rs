//! Diagonalization of quadratic Hamiltonians.
//!
//! Number-conserving models are diagonal in the plane-wave basis, so their
//! spectrum is read off the kinetic symbol. Pairing models go through the
//! dense `2N × 2N` BdG matrix; the per-wavenumber 2×2 spectrum is kept as an
//! independent check.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{multiset_distance, LatticeSpec};
use crate::models::{dispersion, HamiltonianPair, ModelSpec};

/// Relative tolerance under which two energies count as one level.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Below this |E| a BdG level is treated as a zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-12;

pub fn is_degenerate(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() < DEGENERACY_TOL * a.abs().max(1.0)
}

#[derive(Debug, Clone)]
pub struct PlaneWaveSolution {
    pub lattice: LatticeSpec,
    /// Ascending; ties broken by mode index.
    pub energies: Vec<f64>,
    /// Canonical mode index of each energy.
    pub modes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BdgSolution {
    pub lattice: LatticeSpec,
    /// The N nonnegative quasiparticle energies, ascending.
    pub energies: Vec<f64>,
    /// Column n is `u_n`.
    pub u: DMatrix<f64>,
    /// Column n is `v_n`.
    pub v: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub enum QuadraticSolution {
    NumberConserving(PlaneWaveSolution),
    Bdg(BdgSolution),
}

impl QuadraticSolution {
    pub fn energies(&self) -> &[f64] {
        match self {
            QuadraticSolution::NumberConserving(s) => &s.energies,
            QuadraticSolution::Bdg(s) => &s.energies,
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        match self {
            QuadraticSolution::NumberConserving(s) => &s.lattice,
            QuadraticSolution::Bdg(s) => &s.lattice,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DiagonalizeOptions {
    /// Compare the symbol spectrum with a dense eigensolve of `A`.
    pub dense_cross_check: bool,
}

pub fn diagonalize(h: &HamiltonianPair) -> Result<QuadraticSolution> {
    match h.pairing {
        None => diagonalize_number_conserving(h, DiagonalizeOptions::default())
            .map(QuadraticSolution::NumberConserving),
        Some(_) => diagonalize_bdg(h).map(QuadraticSolution::Bdg),
    }
}

pub fn diagonalize_number_conserving(
    h: &HamiltonianPair,
    options: DiagonalizeOptions,
) -> Result<PlaneWaveSolution> {
    if h.pairing.is_some() {
        return Err(Error::WrongSolutionKind {
            expected: "number-conserving",
        });
    }
    let symbol = h.kinetic.symbol().ok_or(Error::NotTranslationInvariant)?;
    let mut order: Vec<usize> = (0..symbol.len()).collect();
    order.sort_by(|&a, &b| symbol[a].re.total_cmp(&symbol[b].re).then(a.cmp(&b)));
    if options.dense_cross_check {
        let deviation = h.kinetic.duality_deviation()?;
        let scale = symbol.iter().fold(1.0_f64, |m, s| m.max(s.norm()));
        if deviation > 1e-9 * scale {
            return Err(Error::SpectrumMismatch { deviation });
        }
    }
    Ok(PlaneWaveSolution {
        lattice: h.lattice().clone(),
        energies: order.iter().map(|&j| symbol[j].re).collect(),
        modes: order,
    })
}

/// Assembles `[[A, B], [-B, -A]]`.
pub fn bdg_matrix(h: &HamiltonianPair) -> Result<DMatrix<f64>> {
    let a = h.kinetic.to_dense()?;
    let b = h
        .pairing
        .as_ref()
        .ok_or(Error::WrongSolutionKind { expected: "BdG" })?
        .to_dense()?;
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&a);
    m.view_mut((0, n), (n, n)).copy_from(&b);
    m.view_mut((n, 0), (n, n)).copy_from(&(-&b));
    m.view_mut((n, n), (n, n)).copy_from(&(-&a));
    Ok(m)
}

pub fn diagonalize_bdg(h: &HamiltonianPair) -> Result<BdgSolution> {
    let m = bdg_matrix(h)?;
    let n = m.nrows() / 2;
    let eig = m.clone().symmetric_eigen();
    if let Some(e) = eig.eigenvalues.iter().find(|e| e.abs() < ZERO_MODE_TOL) {
        return Err(Error::DegenerateZeroMode { energy: *e });
    }
    let mut positive: Vec<usize> = (0..2 * n).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
    if positive.len() != n {
        return Err(Error::DegenerateZeroMode { energy: 0.0 });
    }
    positive.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let norm_h = eig.eigenvalues.iter().fold(0.0_f64, |acc, e| acc.max(e.abs()));
    let bound = 1e-9 * norm_h.max(1.0);
    let mut energies = Vec::with_capacity(n);
    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for (col, &i) in positive.iter().enumerate() {
        let mut phi = eig.eigenvectors.column(i).into_owned();
        phi /= phi.norm();
        let e = eig.eigenvalues[i];
        let residual = (&m * &phi - &phi * e).norm();
        if residual > bound {
            return Err(Error::EigenResidual { residual, bound });
        }
        energies.push(e);
        u.set_column(col, &phi.rows(0, n));
        v.set_column(col, &phi.rows(n, n));
    }
    Ok(BdgSolution {
        lattice: h.lattice().clone(),
        energies,
        u,
        v,
    })
}

/// Per-wavenumber BdG energies `√(a_k² + |b_k|²)` in canonical mode order.
pub fn bdg_symbol_energies(h: &HamiltonianPair) -> Result<Vec<f64>> {
    let a = h.kinetic.symbol().ok_or(Error::NotTranslationInvariant)?;
    let b = h
        .pairing
        .as_ref()
        .ok_or(Error::WrongSolutionKind { expected: "BdG" })?
        .symbol()
        .ok_or(Error::NotTranslationInvariant)?;
    Ok(a.iter().zip(b).map(|(a, b)| (a.re * a.re + b.norm_sqr()).sqrt()).collect())
}

/// Largest residual `‖H(v, u) + E(v, u)‖` over the solution's eigenpairs.
pub fn particle_hole_residual(h: &HamiltonianPair, sol: &BdgSolution) -> Result<f64> {
    let m = bdg_matrix(h)?;
    let n = sol.u.nrows();
    let mut worst = 0.0_f64;
    for (col, &e) in sol.energies.iter().enumerate() {
        let mut flipped = nalgebra::DVector::zeros(2 * n);
        flipped.rows_mut(0, n).copy_from(&sol.v.column(col));
        flipped.rows_mut(n, n).copy_from(&sol.u.column(col));
        worst = worst.max((&m * &flipped + &flipped * e).norm());
    }
    Ok(worst)
}

/// Dense BdG spectrum against the per-wavenumber spectrum.
pub fn bdg_symbol_deviation(h: &HamiltonianPair, sol: &BdgSolution) -> Result<f64> {
    let promote = |v: &[f64]| -> Vec<num_complex::Complex64> {
        v.iter().map(|&x| num_complex::Complex64::new(x, 0.0)).collect()
    };
    let per_k = bdg_symbol_energies(h)?;
    Ok(multiset_distance(&promote(&per_k), &promote(&sol.energies)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiPointCount {
    pub crossings: usize,
    /// `c = 1/2` per crossing.
    pub c_eff_estimate: f64,
}

/// Counts sign changes of `E(k) - fermi_energy` once around the Brillouin zone.
pub fn count_fermi_points(
    spec: &ModelSpec,
    lattice: &LatticeSpec,
    fermi_energy: f64,
) -> Result<FermiPointCount> {
    if lattice.dim() != 1 || spec.kind.is_pairing() {
        return Err(Error::IncompatibleModel {
            kind: spec.kind.to_string(),
            dim: lattice.dim(),
        });
    }
    let band: Vec<bool> = dispersion(spec, lattice)?
        .iter()
        .map(|(_, e)| e - fermi_energy >= 0.0)
        .collect();
    let crossings = (0..band.len())
        .filter(|&i| band[i] != band[(i + 1) % band.len()])
        .count();
    Ok(FermiPointCount {
        crossings,
        c_eff_estimate: crossings as f64 / 2.0,
    })
}
