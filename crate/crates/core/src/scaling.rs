//! Entropy-versus-size sweeps and fits of the scaling laws
//! `S = dL^D`, `S = c₀ + (c_eff/3) log L` and `S = L(c + (2/3)c_eff log L)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::GroundState;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::models::ModelSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub model: ModelSpec,
    pub lattice: LatticeSpec,
    /// `(L, S)` with `L` strictly increasing.
    pub samples: Vec<(usize, f64)>,
}

impl EntropyCurve {
    pub fn lengths(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn at(&self, len: usize) -> Option<f64> {
        self.samples
            .binary_search_by_key(&len, |s| s.0)
            .ok()
            .map(|i| self.samples[i].1)
    }

    fn in_window(&self, (lo, hi): (usize, usize)) -> Vec<(usize, f64)> {
        self.samples.iter().copied().filter(|&(l, _)| l >= lo && l <= hi).collect()
    }
}

/// Largest block size before finite-size saturation: `R/4` on a chain,
/// `⌊extent/2⌋ − 1` on a torus.
pub fn saturation_cap(lattice: &LatticeSpec) -> usize {
    let e = lattice.extent().iter().copied().min().unwrap_or(0);
    match lattice.dim() {
        1 => e / 4,
        _ => (e / 2).saturating_sub(1),
    }
}

fn checked_lengths(lattice: &LatticeSpec, lengths: &[usize]) -> Result<Vec<usize>> {
    let max = lattice.extent().iter().copied().min().unwrap_or(0);
    if lengths.is_empty() {
        return Err(Error::InvalidParameter("sweep has no block sizes".into()));
    }
    if let Some(&bad) = lengths.iter().find(|&&l| l == 0 || l > max) {
        return Err(Error::InvalidRegion(format!("block size {bad} outside 1..={max}")));
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

pub fn sweep(model: &ModelSpec, lattice: &LatticeSpec, lengths: &[usize]) -> Result<EntropyCurve> {
    let lengths = checked_lengths(lattice, lengths)?;
    let ground = GroundState::prepare(model, lattice)?;
    sweep_ground_state(&ground, &lengths)
}

/// Sweep over an already prepared ground state. Points are evaluated in
/// parallel and collected in order of `L`.
pub fn sweep_ground_state(ground: &GroundState, lengths: &[usize]) -> Result<EntropyCurve> {
    let lengths = checked_lengths(ground.lattice(), lengths)?;
    let samples = lengths
        .par_iter()
        .map(|&l| ground.block_entropy(l).map(|s| (l, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyCurve {
        model: ground.model,
        lattice: ground.lattice().clone(),
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    Linear,
    Log1d,
    AreaLog2d,
}

/// Abscissa substituted for `L` inside the logarithm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    #[default]
    Log,
    /// `(R/π) sin(πL/R)`, chains only.
    Chord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FitParams {
    Linear { d: f64 },
    Log1d { c0: f64, c_eff: f64 },
    AreaLog2d { constant: f64, c_eff: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub form: FitForm,
    pub params: FitParams,
    pub window: (usize, usize),
    pub samples: usize,
    /// Root-mean-square deviation in `S`.
    pub residual: f64,
}

impl ScalingFit {
    pub fn c_eff(&self) -> Option<f64> {
        match self.params {
            FitParams::Log1d { c_eff, .. } | FitParams::AreaLog2d { c_eff, .. } => Some(c_eff),
            FitParams::Linear { .. } => None,
        }
    }

    pub fn volume_coefficient(&self) -> Option<f64> {
        match self.params {
            FitParams::Linear { d } => Some(d),
            _ => None,
        }
    }
}

/// `Σxy / Σx²`.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> f64 {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    sxy / sxx
}

/// Ordinary least squares `y = slope·x + intercept`, returning
/// `(slope, intercept, r²)`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

pub fn fit(curve: &EntropyCurve, form: FitForm, window: (usize, usize)) -> Result<ScalingFit> {
    fit_with(curve, form, window, Abscissa::Log)
}

pub fn fit_with(
    curve: &EntropyCurve,
    form: FitForm,
    window: (usize, usize),
    abscissa: Abscissa,
) -> Result<ScalingFit> {
    let pts = curve.in_window(window);
    if pts.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            found: pts.len(),
        });
    }
    if pts.first().map(|p| p.0) == pts.last().map(|p| p.0) {
        return Err(Error::DegenerateWindow);
    }
    if abscissa == Abscissa::Chord && curve.lattice.dim() != 1 {
        return Err(Error::InvalidParameter("chord abscissa needs a chain".into()));
    }
    let r = curve.lattice.sites() as f64;
    let log_of = |l: usize| match abscissa {
        Abscissa::Log => (l as f64).ln(),
        Abscissa::Chord => (r / PI * (PI * l as f64 / r).sin()).ln(),
    };
    let s: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (params, predicted): (FitParams, Vec<f64>) = match form {
        FitForm::Linear => {
            let dim = curve.lattice.dim() as i32;
            let x: Vec<f64> = pts.iter().map(|p| (p.0 as f64).powi(dim)).collect();
            let d = fit_through_origin(&x, &s);
            (FitParams::Linear { d }, x.iter().map(|x| d * x).collect())
        }
        FitForm::Log1d => {
            let x: Vec<f64> = pts.iter().map(|p| log_of(p.0)).collect();
            let (slope, c0, _) = linear_regression(&x, &s);
            let pred = x.iter().map(|x| c0 + slope * x).collect();
            (FitParams::Log1d { c0, c_eff: 3.0 * slope }, pred)
        }
        FitForm::AreaLog2d => {
            let x: Vec<f64> = pts.iter().map(|p| log_of(p.0)).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1 / p.0 as f64).collect();
            let (slope, constant, _) = linear_regression(&x, &y);
            let pred = pts
                .iter()
                .zip(&x)
                .map(|(p, x)| p.0 as f64 * (constant + slope * x))
                .collect();
            (
                FitParams::AreaLog2d {
                    constant,
                    c_eff: 1.5 * slope,
                },
                pred,
            )
        }
    };
    let residual =
        (s.iter().zip(&predicted).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / s.len() as f64).sqrt();
    Ok(ScalingFit {
        form,
        params,
        window,
        samples: pts.len(),
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverReport {
    pub alpha: f64,
    pub cap: usize,
    /// Fit of `S = A L^D` below the locality scale.
    pub linear: Option<ScalingFit>,
    /// Logarithmic fit between the locality scale and the cap.
    pub log: Option<ScalingFit>,
    /// `A`.
    pub volume_coefficient: Option<f64>,
    /// `c_eff/α`.
    pub c_eff_per_alpha: Option<f64>,
    /// Set when one of the two fits had too little data.
    pub partial: bool,
}

/// Linear fit on `L < α`, log fit on `α < L`, both capped at the saturation scale.
pub fn crossover_report(curve: &EntropyCurve, alpha: f64) -> Result<CrossoverReport> {
    crossover_report_capped(curve, alpha, saturation_cap(&curve.lattice))
}

pub fn crossover_report_capped(curve: &EntropyCurve, alpha: f64, cap: usize) -> Result<CrossoverReport> {
    let below = (alpha.ceil() as usize).saturating_sub(1).min(cap);
    let above = alpha.floor() as usize + 1;
    let linear = if below >= 1 {
        optional(fit(curve, FitForm::Linear, (1, below)))?
    } else {
        None
    };
    let form = if curve.lattice.dim() == 1 {
        FitForm::Log1d
    } else {
        FitForm::AreaLog2d
    };
    let log = if above <= cap {
        optional(fit(curve, form, (above, cap)))?
    } else {
        None
    };
    let c_eff_per_alpha = match (log.and_then(|f| f.c_eff()), alpha > 0.0) {
        (Some(c), true) => Some(c / alpha),
        _ => None,
    };
    Ok(CrossoverReport {
        alpha,
        cap,
        volume_coefficient: linear.and_then(|f| f.volume_coefficient()),
        partial: linear.is_none() || log.is_none(),
        linear,
        log,
        c_eff_per_alpha,
    })
}

fn optional(fit: Result<ScalingFit>) -> Result<Option<ScalingFit>> {
    match fit {
        Ok(f) => Ok(Some(f)),
        Err(Error::InsufficientSamples { .. }) | Err(Error::DegenerateWindow) => Ok(None),
        Err(e) => Err(e),
    }
}

/// First `L` at which the increment `ΔS/ΔL` falls below half the initial
/// slope (mean of the first three increments).
pub fn saturation_onset(curve: &EntropyCurve) -> Option<usize> {
    let slopes: Vec<(usize, f64)> = curve
        .samples
        .windows(2)
        .map(|w| (w[1].0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64))
        .collect();
    if slopes.len() < 4 {
        return None;
    }
    let initial = slopes[..3].iter().map(|s| s.1).sum::<f64>() / 3.0;
    slopes[3..].iter().find(|s| s.1 < 0.5 * initial).map(|s| s.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelKind;

    fn synthetic(lattice: LatticeSpec, f: impl Fn(f64) -> f64) -> EntropyCurve {
        EntropyCurve {
            model: ModelSpec::new(ModelKind::LocalHopping, 0.0),
            lattice,
            samples: (1..=60).map(|l| (l, f(l as f64))).collect(),
        }
    }

    #[test]
    fn exact_laws_are_recovered() {
        let chain = LatticeSpec::chain(400).unwrap();
        let log = fit(&synthetic(chain.clone(), |l| 5.0 + 2.0 / 3.0 * l.ln()), FitForm::Log1d, (2, 60)).unwrap();
        assert!((log.c_eff().unwrap() - 2.0).abs() < 1e-9);
        assert!(log.residual < 1e-9);
        if let FitParams::Log1d { c0, .. } = log.params {
            assert!((c0 - 5.0).abs() < 1e-9);
        }

        let lin = fit(&synthetic(chain, |l| 0.37 * l), FitForm::Linear, (1, 60)).unwrap();
        assert!((lin.volume_coefficient().unwrap() - 0.37).abs() < 1e-12);
        assert!(lin.residual < 1e-9);

        let torus = LatticeSpec::square(61).unwrap();
        let area = fit(&synthetic(torus.clone(), |l| l * (0.2 + 2.0 / 3.0 * 7.0 * l.ln())), FitForm::AreaLog2d, (3, 29))
            .unwrap();
        assert!((area.c_eff().unwrap() - 7.0).abs() < 1e-9);
        assert!(area.residual < 1e-9);

        let vol = fit(&synthetic(torus, |l| 0.5 * l * l), FitForm::Linear, (1, 10)).unwrap();
        assert!((vol.volume_coefficient().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chord_abscissa_recovers_conformal_form() {
        let r = 200.0;
        let curve = synthetic(LatticeSpec::chain(200).unwrap(), |l| {
            0.7 + (1.0 / 3.0) * (r / PI * (PI * l / r).sin()).ln()
        });
        let f = fit_with(&curve, FitForm::Log1d, (2, 60), Abscissa::Chord).unwrap();
        assert!((f.c_eff().unwrap() - 1.0).abs() < 1e-9);
        let plain = fit(&curve, FitForm::Log1d, (2, 60)).unwrap();
        assert!(plain.c_eff().unwrap() < 1.0);
    }

    #[test]
    fn window_errors() {
        let curve = synthetic(LatticeSpec::chain(400).unwrap(), |l| l);
        assert_eq!(
            fit(&curve, FitForm::Log1d, (10, 11)),
            Err(Error::InsufficientSamples { needed: 3, found: 2 })
        );
        assert!(fit(&curve, FitForm::Log1d, (50, 10)).is_err());
        let mut flat = curve.clone();
        flat.samples = vec![(5, 1.0), (5, 1.0), (5, 1.0)];
        assert_eq!(fit(&flat, FitForm::Log1d, (1, 10)), Err(Error::DegenerateWindow));
    }

    #[test]
    fn fits_are_deterministic() {
        let curve = synthetic(LatticeSpec::chain(400).unwrap(), |l| (l.sin() + 2.0) * l.ln());
        let a = fit(&curve, FitForm::Log1d, (4, 50)).unwrap();
        let b = fit(&curve, FitForm::Log1d, (4, 50)).unwrap();
        assert_eq!(a.c_eff().unwrap().to_bits(), b.c_eff().unwrap().to_bits());
        assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    }

    #[test]
    fn single_half_filled_site() {
        let lattice = LatticeSpec::chain(42).unwrap();
        let curve = sweep(&ModelSpec::new(ModelKind::LocalHopping, 0.0), &lattice, &[1]).unwrap();
        assert_eq!(curve.samples.len(), 1);
        assert_eq!(curve.samples[0].0, 1);
        assert!((curve.samples[0].1 - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn sweep_validates_and_orders() {
        let lattice = LatticeSpec::chain(40).unwrap();
        let spec = ModelSpec::new(ModelKind::LocalHopping, 0.0);
        assert!(sweep(&spec, &lattice, &[]).is_err());
        assert!(sweep(&spec, &lattice, &[0]).is_err());
        assert!(sweep(&spec, &lattice, &[41]).is_err());
        let c = sweep(&spec, &lattice, &[9, 3, 5, 3]).unwrap();
        assert_eq!(c.lengths(), vec![3, 5, 9]);
    }

    #[test]
    fn local_chain_is_monotone_and_concave() {
        let lattice = LatticeSpec::chain(400).unwrap();
        let ls: Vec<usize> = (2..=100).collect();
        let c = sweep(&ModelSpec::new(ModelKind::LocalHopping, 0.0), &lattice, &ls).unwrap();
        let s = c.entropies();
        assert!(s.windows(2).all(|w| w[1] > w[0] - 1e-3));
        let even: Vec<f64> = s.iter().step_by(2).copied().collect();
        assert!(even.windows(3).all(|w| w[2] - w[1] <= w[1] - w[0] + 1e-3));
    }

    #[test]
    fn alpha_zero_is_log_only() {
        let lattice = LatticeSpec::chain(100).unwrap();
        let ls: Vec<usize> = (1..=25).collect();
        let c = sweep(&ModelSpec::new(ModelKind::LocalHopping, 0.0), &lattice, &ls).unwrap();
        let r = crossover_report(&c, 0.0).unwrap();
        assert!(r.linear.is_none());
        assert!(r.log.is_some());
        assert!(r.partial);
        assert!(r.c_eff_per_alpha.is_none());
    }

    #[test]
    fn crossover_windows_split_at_alpha() {
        let curve = synthetic(LatticeSpec::chain(400).unwrap(), |l| if l < 20.0 { 0.5 * l } else { 10.0 + l.ln() });
        let r = crossover_report(&curve, 20.0).unwrap();
        assert_eq!(r.linear.unwrap().window, (1, 19));
        assert_eq!(r.log.unwrap().window, (21, 100));
        assert!((r.volume_coefficient.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.c_eff_per_alpha.unwrap() - 3.0 / 20.0).abs() < 1e-9);
        assert!(!r.partial);
    }

    #[test]
    fn onset_of_saturation() {
        let curve = synthetic(LatticeSpec::chain(400).unwrap(), |l| 8.0 * (1.0 - (-l / 8.0).exp()));
        let onset = saturation_onset(&curve).unwrap();
        assert!((7..=10).contains(&onset), "{onset}");
    }
}
