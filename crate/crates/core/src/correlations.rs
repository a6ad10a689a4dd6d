//! Ground-state correlators `G_xy = ⟨c†_x c_y⟩` and `F_xy = ⟨c†_x c†_y⟩`.
//!
//! Number-conserving ground states are translation invariant, so `G` is kept
//! as a displacement kernel computed by FFT of the occupation indicator and
//! only materialized on subregions. BdG ground states are stored densely.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entanglement::{number_conserving_spectrum, CorrelationBlock, Subregion};
use crate::error::{Error, Result};
use crate::fourier;
use crate::lattice::LatticeSpec;
use crate::scaling::fit_through_origin;
use crate::spectral::{is_degenerate, BdgSolution, PlaneWaveSolution, QuadraticSolution};

/// Modes filled in a number-conserving ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationSet {
    /// Canonical mode indices, in energy order.
    pub filled: Vec<usize>,
    pub requested_fraction: f64,
    /// `|filled| / N` after whole-multiplet adjustment.
    pub fraction: f64,
    /// Midpoint between the highest filled and lowest empty level.
    pub fermi_energy: f64,
}

/// Fills the `round(fraction·N)` lowest modes, moving the cut to the nearer
/// multiplet boundary (ties: fewer particles) when it would split a degenerate level.
pub fn select_occupation(sol: &QuadraticSolution, fraction: f64) -> Result<OccupationSet> {
    let QuadraticSolution::NumberConserving(pw) = sol else {
        return Err(Error::WrongSolutionKind {
            expected: "number-conserving",
        });
    };
    select_occupation_plane_waves(pw, fraction)
}

pub fn select_occupation_plane_waves(pw: &PlaneWaveSolution, fraction: f64) -> Result<OccupationSet> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("filling fraction {fraction} outside [0, 1]")));
    }
    let e = &pw.energies;
    let n = e.len();
    let target = ((fraction * n as f64).round() as usize).min(n);
    let mut count = target;
    if target > 0 && target < n && is_degenerate(e[target - 1], e[target]) {
        let level = e[target - 1];
        let mut lo = target - 1;
        while lo > 0 && is_degenerate(e[lo - 1], level) {
            lo -= 1;
        }
        let mut hi = target;
        while hi < n && is_degenerate(e[hi], level) {
            hi += 1;
        }
        count = if target - lo <= hi - target { lo } else { hi };
    }
    let fermi_energy = match (count.checked_sub(1).map(|i| e[i]), e.get(count)) {
        (Some(a), Some(&b)) => 0.5 * (a + b),
        (Some(a), None) => a,
        (None, Some(&b)) => b,
        (None, None) => 0.0,
    };
    Ok(OccupationSet {
        filled: pw.modes[..count].to_vec(),
        requested_fraction: fraction,
        fraction: count as f64 / n as f64,
        fermi_energy,
    })
}

#[derive(Debug, Clone)]
enum Storage {
    /// `G_xy = g(x - y)`, `F = 0`.
    Translational(Vec<Complex64>),
    Dense { g: DMatrix<Complex64>, f: DMatrix<f64> },
}

#[derive(Debug, Clone)]
pub struct CorrelationPair {
    lattice: LatticeSpec,
    storage: Storage,
}

impl CorrelationPair {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    /// True when `F` vanishes identically.
    pub fn is_number_conserving(&self) -> bool {
        matches!(self.storage, Storage::Translational(_))
    }

    pub fn g(&self, x: usize, y: usize) -> Complex64 {
        match &self.storage {
            Storage::Translational(kernel) => kernel[self.lattice.displacement(x, y)],
            Storage::Dense { g, .. } => g[(x, y)],
        }
    }

    pub fn f(&self, x: usize, y: usize) -> f64 {
        match &self.storage {
            Storage::Translational(_) => 0.0,
            Storage::Dense { f, .. } => f[(x, y)],
        }
    }

    /// Displacement kernel when the pair is stored translationally.
    pub fn g_kernel(&self) -> Option<&[Complex64]> {
        match &self.storage {
            Storage::Translational(kernel) => Some(kernel),
            Storage::Dense { .. } => None,
        }
    }

    pub fn trace_g(&self) -> f64 {
        match &self.storage {
            Storage::Translational(kernel) => kernel[0].re * self.lattice.sites() as f64,
            Storage::Dense { g, .. } => g.diagonal().iter().map(|c| c.re).sum(),
        }
    }

    pub fn dense_g(&self) -> DMatrix<Complex64> {
        let n = self.lattice.sites();
        match &self.storage {
            Storage::Dense { g, .. } => g.clone(),
            Storage::Translational(_) => DMatrix::from_fn(n, n, |x, y| self.g(x, y)),
        }
    }

    pub fn dense_f(&self) -> DMatrix<f64> {
        let n = self.lattice.sites();
        match &self.storage {
            Storage::Dense { f, .. } => f.clone(),
            Storage::Translational(_) => DMatrix::zeros(n, n),
        }
    }

    /// Principal blocks of `G` and `F` on the region's sites, in region order.
    pub fn restrict(&self, region: &Subregion) -> Result<CorrelationBlock> {
        let n = self.lattice.sites();
        if let Some(&site) = region.sites().iter().find(|&&s| s >= n) {
            return Err(Error::RegionOutOfRange { site, sites: n });
        }
        let sites = region.sites();
        let m = sites.len();
        let g = DMatrix::from_fn(m, m, |i, j| self.g(sites[i], sites[j]));
        let f = match &self.storage {
            Storage::Translational(_) => None,
            Storage::Dense { f, .. } => Some(DMatrix::from_fn(m, m, |i, j| f[(sites[i], sites[j])])),
        };
        Ok(CorrelationBlock::new(g, f))
    }
}

/// `G_xy = (1/N) Σ_{n ∈ filled} e^{i k_n·(x − y)}` via FFT; `F = 0`.
pub fn correlations_number_conserving(sol: &QuadraticSolution, occ: &OccupationSet) -> Result<CorrelationPair> {
    let lattice = sol.lattice().clone();
    if !matches!(sol, QuadraticSolution::NumberConserving(_)) {
        return Err(Error::WrongSolutionKind {
            expected: "number-conserving",
        });
    }
    Ok(correlations_from_indicator(&lattice, &occupation_indicator(&lattice, &occ.filled)))
}

fn occupation_indicator(lattice: &LatticeSpec, filled: &[usize]) -> Vec<f64> {
    let mut indicator = vec![0.0; lattice.sites()];
    for &m in filled {
        indicator[m] = 1.0;
    }
    indicator
}

/// Translational correlations of an arbitrary mode-occupation indicator.
pub fn correlations_from_indicator(lattice: &LatticeSpec, indicator: &[f64]) -> CorrelationPair {
    CorrelationPair {
        lattice: lattice.clone(),
        storage: Storage::Translational(fourier::kernel_from_weights(indicator, lattice.extent())),
    }
}

/// Outer-product construction of `G`; O(N²·|filled|), for checking the FFT path.
pub fn correlations_number_conserving_dense(sol: &QuadraticSolution, occ: &OccupationSet) -> Result<CorrelationPair> {
    let lattice = sol.lattice().clone();
    let n = lattice.sites();
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for &mode in &occ.filled {
        let w = lattice.wavenumber(mode);
        let phase: Vec<Complex64> = (0..n)
            .map(|x| {
                let c = lattice.coords(x);
                let kx: f64 = c.iter().zip(&w.k).map(|(&c, k)| c as f64 * k).sum();
                Complex64::from_polar(1.0 / (n as f64).sqrt(), kx)
            })
            .collect();
        for x in 0..n {
            for y in 0..n {
                g[(x, y)] += phase[x] * phase[y].conj();
            }
        }
    }
    Ok(CorrelationPair {
        lattice,
        storage: Storage::Dense {
            g,
            f: DMatrix::zeros(n, n),
        },
    })
}

/// `max(1, E_max/E_min)`; eigenvector accuracy degrades with it.
fn spectral_condition(energies: &[f64]) -> f64 {
    match (energies.first(), energies.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => (hi / lo).max(1.0),
        _ => 1.0,
    }
}

/// `G = Σ_n v_n v_nᵀ`, `F = Σ_n v_n u_nᵀ` over positive-energy modes.
pub fn correlations_bdg(sol: &QuadraticSolution) -> Result<CorrelationPair> {
    let QuadraticSolution::Bdg(bdg) = sol else {
        return Err(Error::WrongSolutionKind { expected: "BdG" });
    };
    correlations_bdg_solution(bdg)
}

pub fn correlations_bdg_solution(bdg: &BdgSolution) -> Result<CorrelationPair> {
    let g = &bdg.v * bdg.v.transpose();
    let raw_f = &bdg.v * bdg.u.transpose();
    let skew = (&raw_f + raw_f.transpose()).amax();
    if skew > 1e-10 * spectral_condition(&bdg.energies) {
        return Err(Error::NonAntisymmetricF { deviation: skew });
    }
    let f = (&raw_f - raw_f.transpose()) * 0.5;
    let g = (&g + g.transpose()) * 0.5;
    Ok(CorrelationPair {
        lattice: bdg.lattice.clone(),
        storage: Storage::Dense {
            g: g.map(|x| Complex64::new(x, 0.0)),
            f,
        },
    })
}

pub fn ground_state_correlations(sol: &QuadraticSolution, fraction: f64) -> Result<(CorrelationPair, Option<OccupationSet>)> {
    match sol {
        QuadraticSolution::NumberConserving(_) => {
            let occ = select_occupation(sol, fraction)?;
            Ok((correlations_number_conserving(sol, &occ)?, Some(occ)))
        }
        QuadraticSolution::Bdg(_) => Ok((correlations_bdg(sol)?, None)),
    }
}

/// Largest entry of `Γ² − Γ` for `Γ = [[G, F], [−F, I − G]]`.
pub fn bdg_projector_deviation(corr: &CorrelationPair) -> f64 {
    let n = corr.lattice.sites();
    let g = corr.dense_g().map(|c| c.re);
    let f = corr.dense_f();
    let mut gamma = DMatrix::zeros(2 * n, 2 * n);
    gamma.view_mut((0, 0), (n, n)).copy_from(&g);
    gamma.view_mut((0, n), (n, n)).copy_from(&f);
    gamma.view_mut((n, 0), (n, n)).copy_from(&(-&f));
    gamma
        .view_mut((n, n), (n, n))
        .copy_from(&(DMatrix::identity(n, n) - &g));
    (&gamma * &gamma - &gamma).amax()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomToeplitzConfig {
    pub sites: usize,
    pub trials: usize,
    pub seed: u64,
    /// Probability that each mode is filled.
    pub fill_probability: f64,
}

impl RandomToeplitzConfig {
    pub fn new(sites: usize, trials: usize, seed: u64) -> Self {
        RandomToeplitzConfig {
            sites,
            trials,
            seed,
            fill_probability: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomToeplitzStats {
    pub seed: u64,
    pub trials: usize,
    /// Interval lengths `1..=R/2`.
    pub lengths: Vec<usize>,
    pub mean_entropy: Vec<f64>,
    /// Least-squares slope of mean entropy against L through the origin.
    pub slope: f64,
    /// Sample variance of Re G(d) over d ≠ 0, pooled over trials.
    pub offdiag_variance: f64,
    /// `σ₀²/(2R)` with `σ₀² = 1/4`.
    pub expected_variance: f64,
}

/// Random-occupation Toeplitz ensemble: each trial fills modes independently
/// and measures interval entropies of the resulting translation-invariant `G`.
pub fn random_toeplitz_oracle(config: &RandomToeplitzConfig) -> Result<RandomToeplitzStats> {
    let r = config.sites;
    if r < 16 || config.trials == 0 {
        return Err(Error::InvalidParameter(format!(
            "random Toeplitz ensemble needs R >= 16 and trials >= 1 (got R = {r}, trials = {})",
            config.trials
        )));
    }
    let lattice = LatticeSpec::chain(r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lengths: Vec<usize> = (1..=r / 2).collect();
    let mut sums = vec![0.0; lengths.len()];
    let (mut acc, mut acc_sq, mut count) = (0.0, 0.0, 0usize);
    for _ in 0..config.trials {
        let indicator: Vec<f64> = (0..r)
            .map(|_| if rng.random::<f64>() < config.fill_probability { 1.0 } else { 0.0 })
            .collect();
        let corr = correlations_from_indicator(&lattice, &indicator);
        let kernel = corr.g_kernel().expect("translational");
        for g in &kernel[1..] {
            acc += g.re;
            acc_sq += g.re * g.re;
            count += 1;
        }
        for (slot, &len) in sums.iter_mut().zip(&lengths) {
            let block = corr.restrict(&Subregion::interval(&lattice, len, 0)?)?;
            *slot += number_conserving_spectrum(&block)?.entropy;
        }
    }
    let mean_entropy: Vec<f64> = sums.iter().map(|s| s / config.trials as f64).collect();
    let xs: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let slope = fit_through_origin(&xs, &mean_entropy);
    let mean = acc / count as f64;
    let offdiag_variance = (acc_sq / count as f64 - mean * mean) * count as f64 / (count as f64 - 1.0);
    Ok(RandomToeplitzStats {
        seed: config.seed,
        trials: config.trials,
        lengths,
        mean_entropy,
        slope,
        offdiag_variance,
        expected_variance: 0.25 / (2.0 * r as f64),
    })
}
