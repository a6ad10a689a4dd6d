//! Subregions and the von Neumann entropy of Gaussian fermion states.
//!
//! With pairing the single-particle entanglement energies `ε_l` solve
//! `(G − F − ½)(G + F − ½) P_l = ¼ tanh²(ε_l/2) P_l` on the subregion block;
//! without pairing the eigenvalues `ζ_l` of `G` suffice.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::correlations::{ground_state_correlations, CorrelationPair, OccupationSet};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::models::{build_model, ModelSpec};
use crate::spectral::{diagonalize, QuadraticSolution};

const RANGE_TOL: f64 = 1e-8;
const SCHUR_SWEEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionShape {
    Interval(usize),
    Square(usize),
    /// Arbitrary site set, e.g. a complement.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subregion {
    sites: Vec<usize>,
    shape: RegionShape,
    anchor: usize,
}

impl Subregion {
    /// `len` consecutive sites starting at `anchor`, wrapping around the chain.
    pub fn interval(lattice: &LatticeSpec, len: usize, anchor: usize) -> Result<Self> {
        if lattice.dim() != 1 {
            return Err(Error::InvalidRegion("intervals live on chains".into()));
        }
        let r = lattice.sites();
        if len == 0 || len > r || anchor >= r {
            return Err(Error::InvalidRegion(format!(
                "interval of length {len} at {anchor} on {r} sites"
            )));
        }
        Ok(Subregion {
            sites: (0..len).map(|i| (anchor + i) % r).collect(),
            shape: RegionShape::Interval(len),
            anchor,
        })
    }

    /// `side × side` block with lower-left corner at `anchor`, row-major.
    pub fn square(lattice: &LatticeSpec, side: usize, anchor: usize) -> Result<Self> {
        if lattice.dim() != 2 {
            return Err(Error::InvalidRegion("squares live on 2-d lattices".into()));
        }
        let max = lattice.extent().iter().copied().min().unwrap_or(0);
        if side == 0 || side > max || anchor >= lattice.sites() {
            return Err(Error::InvalidRegion(format!("square of side {side} at {anchor}")));
        }
        let origin = lattice.coords(anchor);
        let mut sites = Vec::with_capacity(side * side);
        for dy in 0..side as i64 {
            for dx in 0..side as i64 {
                sites.push(lattice.site_index(&[origin[0] + dx, origin[1] + dy]));
            }
        }
        Ok(Subregion {
            sites,
            shape: RegionShape::Square(side),
            anchor,
        })
    }

    /// Interval on a chain, square on a 2-d lattice.
    pub fn block(lattice: &LatticeSpec, len: usize, anchor: usize) -> Result<Self> {
        match lattice.dim() {
            1 => Self::interval(lattice, len, anchor),
            _ => Self::square(lattice, len, anchor),
        }
    }

    pub fn from_sites(lattice: &LatticeSpec, sites: Vec<usize>) -> Result<Self> {
        let n = lattice.sites();
        let mut seen = vec![false; n];
        for &s in &sites {
            if s >= n {
                return Err(Error::RegionOutOfRange { site: s, sites: n });
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidRegion(format!("site {s} repeated")));
            }
        }
        if sites.is_empty() {
            return Err(Error::InvalidRegion("empty region".into()));
        }
        let anchor = sites[0];
        Ok(Subregion {
            sites,
            shape: RegionShape::Custom,
            anchor,
        })
    }

    pub fn complement(&self, lattice: &LatticeSpec) -> Result<Self> {
        let mut inside = vec![false; lattice.sites()];
        for &s in &self.sites {
            inside[s] = true;
        }
        let rest = (0..lattice.sites()).filter(|&s| !inside[s]).collect();
        Self::from_sites(lattice, rest)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn shape(&self) -> RegionShape {
        self.shape
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// `G` and `F` restricted to a subregion. `f` is `None` when `F ≡ 0`.
#[derive(Debug, Clone)]
pub struct CorrelationBlock {
    g: DMatrix<Complex64>,
    f: Option<DMatrix<f64>>,
}

impl CorrelationBlock {
    pub fn new(g: DMatrix<Complex64>, f: Option<DMatrix<f64>>) -> Self {
        CorrelationBlock { g, f }
    }

    pub fn real(g: DMatrix<f64>, f: Option<DMatrix<f64>>) -> Self {
        Self::new(g.map(|x| Complex64::new(x, 0.0)), f)
    }

    pub fn g(&self) -> &DMatrix<Complex64> {
        &self.g
    }

    pub fn f(&self) -> Option<&DMatrix<f64>> {
        self.f.as_ref()
    }

    pub fn len(&self) -> usize {
        self.g.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.g.nrows() == 0
    }

    fn max_imag(&self) -> f64 {
        self.g.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSpectrum {
    /// Nonnegative single-particle entanglement energies; `+∞` for pure modes.
    pub epsilons: Vec<f64>,
    pub entropy: f64,
}

/// `log(1 + e^{-ε}) + ε/(1 + e^{ε})`, zero once `ε > 700`.
pub fn mode_entropy(eps: f64) -> f64 {
    if eps > 700.0 {
        return 0.0;
    }
    (-eps).exp().ln_1p() + eps / (1.0 + eps.exp())
}

fn spectrum(epsilons: Vec<f64>) -> EntanglementSpectrum {
    let entropy = epsilons.iter().map(|&e| mode_entropy(e)).sum();
    EntanglementSpectrum { epsilons, entropy }
}

/// General (pairing) form; diagonalizes the nonsymmetric product matrix.
pub fn entanglement_spectrum(block: &CorrelationBlock) -> Result<EntanglementSpectrum> {
    if block.max_imag() > 1e-10 {
        return match block.f() {
            None => number_conserving_spectrum(block),
            Some(_) => Err(Error::NonHermitianG {
                deviation: block.max_imag(),
            }),
        };
    }
    let n = block.len();
    let g = block.g.map(|c| c.re);
    let f = block.f.clone().unwrap_or_else(|| DMatrix::zeros(n, n));
    let half = DMatrix::<f64>::identity(n, n) * 0.5;
    let lower = &g - &f - &half;
    let m = &lower * (&g + &f - &half);
    let mus: Vec<Complex64> = match Schur::try_new(m, f64::EPSILON, SCHUR_SWEEPS * n.max(1)) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        // With G symmetric and F antisymmetric the product is (G−F−½)(G−F−½)ᵀ.
        None => lower
            .singular_values()
            .iter()
            .map(|s| Complex64::new(s * s, 0.0))
            .collect(),
    };
    let mut epsilons = Vec::with_capacity(n);
    for mu in mus {
        if mu.im.abs() > RANGE_TOL || mu.re < -RANGE_TOL || mu.re > 0.25 + RANGE_TOL {
            return Err(Error::SpectrumOutOfRange { value: mu.re });
        }
        let mu = mu.re.clamp(0.0, 0.25);
        let eps = if mu > 0.25 - 1e-14 {
            f64::INFINITY
        } else {
            2.0 * (2.0 * mu.sqrt()).atanh()
        };
        epsilons.push(eps);
    }
    Ok(spectrum(epsilons))
}

/// `F = 0` reduction: `S = Σ −ζ log ζ − (1−ζ) log(1−ζ)` over eigenvalues of `G`.
pub fn number_conserving_spectrum(block: &CorrelationBlock) -> Result<EntanglementSpectrum> {
    if let Some(f) = block.f() {
        if f.amax() > 0.0 {
            return Err(Error::InvalidParameter("block has pairing correlations".into()));
        }
    }
    let zetas: Vec<f64> = if block.max_imag() > 1e-10 {
        block.g.clone().symmetric_eigenvalues().iter().copied().collect()
    } else {
        block.g.map(|c| c.re).symmetric_eigenvalues().iter().copied().collect()
    };
    let mut epsilons = Vec::with_capacity(zetas.len());
    let mut entropy = 0.0;
    for z in zetas {
        if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&z) {
            return Err(Error::SpectrumOutOfRange { value: z });
        }
        let z = z.clamp(0.0, 1.0);
        if z > 0.0 && z < 1.0 {
            entropy -= z * z.ln() + (1.0 - z) * (-z).ln_1p();
            epsilons.push(((1.0 - z) / z).ln().abs());
        } else {
            epsilons.push(f64::INFINITY);
        }
    }
    Ok(EntanglementSpectrum { epsilons, entropy })
}

/// A diagonalized model with its full-lattice correlations, ready for
/// repeated subregion queries.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub model: ModelSpec,
    pub solution: QuadraticSolution,
    pub correlations: CorrelationPair,
    pub occupation: Option<OccupationSet>,
}

impl GroundState {
    pub fn prepare(model: &ModelSpec, lattice: &LatticeSpec) -> Result<Self> {
        let h = build_model(model, lattice)?;
        let solution = diagonalize(&h)?;
        let (correlations, occupation) = ground_state_correlations(&solution, model.filling)?;
        Ok(GroundState {
            model: *model,
            solution,
            correlations,
            occupation,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        self.correlations.lattice()
    }

    pub fn spectrum(&self, region: &Subregion) -> Result<EntanglementSpectrum> {
        let block = self.correlations.restrict(region)?;
        if self.correlations.is_number_conserving() {
            number_conserving_spectrum(&block)
        } else {
            entanglement_spectrum(&block)
        }
    }

    pub fn entropy(&self, region: &Subregion) -> Result<f64> {
        Ok(self.spectrum(region)?.entropy)
    }

    /// Entropy of the block of linear size `len` anchored at site 0.
    pub fn block_entropy(&self, len: usize) -> Result<f64> {
        self.entropy(&Subregion::block(self.lattice(), len, 0)?)
    }
}

/// Full pipeline: build, diagonalize, correlate, restrict, entropy.
pub fn entropy_of(model: &ModelSpec, lattice: &LatticeSpec, region: &Subregion) -> Result<f64> {
    GroundState::prepare(model, lattice)?.entropy(region)
}
