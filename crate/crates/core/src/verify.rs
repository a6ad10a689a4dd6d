//! Self-contained oracle suite. Each check reports its worst deviation
//! against a fixed bound.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::correlations::{
    bdg_projector_deviation, random_toeplitz_oracle, select_occupation, CorrelationPair, RandomToeplitzConfig,
};
use crate::entanglement::{entanglement_spectrum, number_conserving_spectrum, CorrelationBlock, GroundState, Subregion};
use crate::error::Result;
use crate::lattice::{build_s, LatticeOperator, build_t, dense_function_symmetric, operator_function, LatticeSpec, Parity};
use crate::models::{build_model, ModelKind, ModelSpec};
use crate::spectral::{bdg_symbol_deviation, diagonalize, particle_hole_residual, QuadraticSolution};

pub const CHECK_NAMES: [&str; 7] = [
    "dense_vs_symbol",
    "particle_hole",
    "f_zero_reduction",
    "noncompact_identity",
    "complementarity",
    "projector",
    "random_toeplitz",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, value: f64, bound: f64, kind: Bound) -> Self {
        let passed = match kind {
            Bound::AtMost => value <= bound,
            Bound::AtLeast => value >= bound,
        };
        CheckOutcome {
            name,
            value,
            bound,
            kind,
            passed,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub seed: Option<u64>,
    /// Replace the named check's bound with an unsatisfiable one.
    pub corrupt: Option<String>,
}

pub const DEFAULT_SEED: u64 = 20240611;

fn symbol_scale(op: &LatticeOperator) -> f64 {
    op.symbol()
        .map_or(1.0, |s| s.iter().fold(1.0_f64, |m, v| m.max(v.norm())))
}

/// Largest dense/symbol spectral mismatch relative to `max(1, max|σ|)`.
fn model_duality(lattice: &LatticeSpec, kinds: &[ModelKind], alpha: f64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &kind in kinds.iter().filter(|k| k.supports_dim(lattice.dim())) {
        let h = build_model(&ModelSpec::new(kind, alpha), lattice)?;
        for op in std::iter::once(&h.kinetic).chain(h.pairing.as_ref()) {
            worst = worst.max(op.duality_deviation()? / symbol_scale(op));
        }
    }
    Ok(worst)
}

pub fn dense_vs_symbol() -> Result<f64> {
    let mut worst = 0.0_f64;
    for lattice in [LatticeSpec::chain(32)?, LatticeSpec::square(8)?] {
        let s = build_s(&lattice);
        let dense = s.to_dense()?;
        let by_symbol = operator_function(&s, |x| (x * 3.0).cos(), Parity::Even)?.to_dense()?;
        let by_eigen = dense_function_symmetric(&dense, |x| (3.0 * x).cos());
        worst = worst.max((by_symbol - by_eigen).amax());
        worst = worst.max(model_duality(&lattice, &ModelKind::ALL, 2.5)?);
    }
    let chain = LatticeSpec::chain(32)?;
    let t = build_t(&chain)?;
    let t2 = operator_function(&t, |x| x * x, Parity::Even)?.to_dense()?;
    let td = t.to_dense()?;
    worst = worst.max((t2 - &td * &td).amax());
    Ok(worst)
}

pub fn particle_hole() -> Result<f64> {
    let lattice = LatticeSpec::chain(40)?;
    let mut worst = 0.0_f64;
    for kind in ModelKind::ALL.into_iter().filter(|k| k.is_pairing()) {
        let h = build_model(&ModelSpec::new(kind, 4.0), &lattice)?;
        if let QuadraticSolution::Bdg(sol) = diagonalize(&h)? {
            worst = worst.max(particle_hole_residual(&h, &sol)?);
            worst = worst.max(bdg_symbol_deviation(&h, &sol)?);
        }
    }
    Ok(worst)
}

pub fn f_zero_reduction() -> Result<f64> {
    let lattice = LatticeSpec::chain(64)?;
    let mut worst = 0.0_f64;
    for kind in ModelKind::ALL.into_iter().filter(|k| !k.is_pairing()) {
        let gs = GroundState::prepare(&ModelSpec::new(kind, 7.0), &lattice)?;
        for len in [1, 6, 19, 32] {
            let block = gs.correlations.restrict(&Subregion::interval(&lattice, len, 0)?)?;
            let framed = CorrelationBlock::new(block.g().clone(), Some(DMatrix::zeros(len, len)));
            let general = entanglement_spectrum(&framed)?.entropy;
            let reduced = number_conserving_spectrum(&block)?.entropy;
            worst = worst.max((general - reduced).abs());
        }
    }
    Ok(worst)
}

pub fn noncompact_identity() -> Result<f64> {
    let lattice = LatticeSpec::chain(100)?;
    let nl = GroundState::prepare(&ModelSpec::new(ModelKind::NoncompactNlHopping, 30.0), &lattice)?;
    let local = GroundState::prepare(&ModelSpec::new(ModelKind::LocalHopping, 0.0), &lattice)?;
    Ok(correlation_distance(&nl.correlations, &local.correlations))
}

pub fn correlation_distance(a: &CorrelationPair, b: &CorrelationPair) -> f64 {
    let n = a.lattice().sites();
    (0..n)
        .map(|y| (a.g(0, y) - b.g(0, y)).norm())
        .fold(0.0_f64, f64::max)
}

pub fn complementarity() -> Result<f64> {
    let mut worst = 0.0_f64;
    let chain = LatticeSpec::chain(40)?;
    for kind in ModelKind::ALL {
        let gs = GroundState::prepare(&ModelSpec::new(kind, 4.0), &chain)?;
        for len in [1, 7, 13, 20] {
            let region = Subregion::interval(&chain, len, 0)?;
            let same = gs.entropy(&region)? - gs.entropy(&region.complement(&chain)?)?;
            let mirrored = gs.block_entropy(len)? - gs.block_entropy(40 - len)?;
            worst = worst.max(same.abs()).max(mirrored.abs());
        }
    }
    let torus = LatticeSpec::square(8)?;
    for kind in ModelKind::ALL.into_iter().filter(|k| k.supports_dim(2)) {
        let gs = GroundState::prepare(&ModelSpec::new(kind, 4.0), &torus)?;
        let region = Subregion::square(&torus, 3, 0)?;
        let d = gs.entropy(&region)? - gs.entropy(&region.complement(&torus)?)?;
        worst = worst.max(d.abs());
    }
    Ok(worst)
}

pub fn projector() -> Result<f64> {
    let lattice = LatticeSpec::chain(40)?;
    let mut worst = 0.0_f64;
    for kind in ModelKind::ALL {
        let gs = GroundState::prepare(&ModelSpec::new(kind, 11.0), &lattice)?;
        let dev = if gs.correlations.is_number_conserving() {
            let g = gs.correlations.dense_g();
            (&g * &g - &g).iter().fold(0.0_f64, |m, c| m.max(c.norm()))
        } else {
            bdg_projector_deviation(&gs.correlations)
        };
        worst = worst.max(dev);
    }
    // partial fillings with closed shells
    let h = build_model(&ModelSpec::new(ModelKind::LocalHopping, 0.0), &lattice)?;
    let sol = diagonalize(&h)?;
    for fraction in [0.125, 0.325] {
        let occ = select_occupation(&sol, fraction)?;
        let corr = crate::correlations::correlations_number_conserving(&sol, &occ)?;
        let g = corr.dense_g();
        let dev = (&g * &g - &g).iter().fold(0.0_f64, |m, c: &Complex64| m.max(c.norm()));
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Slope of the mean random-occupation entropy against `L`.
pub fn random_toeplitz(seed: u64) -> Result<f64> {
    Ok(random_toeplitz_oracle(&RandomToeplitzConfig::new(128, 50, seed))?.slope)
}

pub fn run(options: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let seed = options.seed.unwrap_or(DEFAULT_SEED);
    let raw = [
        ("dense_vs_symbol", dense_vs_symbol()?, 1e-9, Bound::AtMost),
        ("particle_hole", particle_hole()?, 1e-9, Bound::AtMost),
        ("f_zero_reduction", f_zero_reduction()?, 1e-10, Bound::AtMost),
        ("noncompact_identity", noncompact_identity()?, 1e-10, Bound::AtMost),
        ("complementarity", complementarity()?, 1e-8, Bound::AtMost),
        ("projector", projector()?, 1e-9, Bound::AtMost),
        ("random_toeplitz", random_toeplitz(seed)?, 0.3, Bound::AtLeast),
    ];
    Ok(raw
        .into_iter()
        .map(|(name, value, bound, kind)| {
            let bound = if options.corrupt.as_deref() == Some(name) {
                match kind {
                    Bound::AtMost => -1.0,
                    Bound::AtLeast => f64::INFINITY,
                }
            } else {
                bound
            };
            CheckOutcome::new(name, value, bound, kind)
        })
        .collect())
}
