//! Geodesic length in the hybrid flat/AdS slice `ds² = tanh(α_c²/z²) dz²`
//! and its comparison with lattice entropy curves.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scaling::{linear_regression, saturation_cap, EntropyCurve};

/// Absolute tolerance of [`geodesic_length`].
pub const GEODESIC_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;
const MAX_DEPTH: u32 = 60;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricParams {
    pub alpha_c: f64,
    pub a: f64,
    pub b: f64,
}

impl MetricParams {
    pub fn new(alpha_c: f64, a: f64, b: f64) -> Result<Self> {
        if !(alpha_c > 0.0 && alpha_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha_c must be positive, got {alpha_c}")));
        }
        if !(a > 0.0 && a.is_finite()) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("need a > 0 and finite b, got a = {a}, b = {b}")));
        }
        Ok(MetricParams { alpha_c, a, b })
    }

    /// `3·a·α_c`, to be compared with a lattice `c_eff`.
    pub fn implied_central_charge(&self) -> f64 {
        3.0 * self.a * self.alpha_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the Gauss/Kronrod discrepancies over accepted panels.
    pub error: f64,
}

#[inline]
fn integrand(alpha_c: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    (alpha_c * alpha_c / (z * z)).tanh().sqrt()
}

fn kronrod(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, depth: u32) -> Quadrature {
    let (value, error) = kronrod(f, lo, hi);
    if error <= tol || depth >= MAX_DEPTH {
        return Quadrature { value, error };
    }
    let mid = 0.5 * (lo + hi);
    let l = adaptive(f, lo, mid, 0.5 * tol, depth + 1);
    let r = adaptive(f, mid, hi, 0.5 * tol, depth + 1);
    Quadrature {
        value: l.value + r.value,
        error: l.error + r.error,
    }
}

pub fn geodesic_length_with_tolerance(alpha_c: f64, len: f64, tol: f64) -> Quadrature {
    if len <= 0.0 {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    adaptive(&|z| integrand(alpha_c, z), 0.0, len, tol, 0)
}

/// `∫₀^L √tanh(α_c²/z²) dz`.
pub fn geodesic_length(alpha_c: f64, len: f64) -> f64 {
    geodesic_length_with_tolerance(alpha_c, len, GEODESIC_TOL).value
}

/// Geodesic lengths at increasing `lens`, integrating panel by panel.
pub fn geodesic_lengths(alpha_c: f64, lens: &[f64]) -> Vec<f64> {
    let f = |z| integrand(alpha_c, z);
    let mut acc = 0.0;
    let mut prev = 0.0;
    lens.iter()
        .map(|&l| {
            acc += adaptive(&f, prev, l, GEODESIC_TOL / lens.len() as f64, 0).value;
            prev = l;
            acc
        })
        .collect()
}

pub fn holographic_entropy(params: &MetricParams, len: f64) -> f64 {
    params.a * geodesic_length(params.alpha_c, len) + params.b
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// `(L, S_lattice, S_holographic)`.
    pub rows: Vec<(usize, f64, f64)>,
    pub max_deviation: f64,
    pub rms: f64,
}

/// Pointwise comparison over the samples with `L` in `window`.
pub fn compare(params: &MetricParams, curve: &EntropyCurve, window: (usize, usize)) -> Comparison {
    let pts: Vec<(usize, f64)> = curve
        .samples
        .iter()
        .copied()
        .filter(|&(l, _)| l >= window.0 && l <= window.1)
        .collect();
    let lens: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
    let geo = geodesic_lengths(params.alpha_c, &lens);
    let rows: Vec<(usize, f64, f64)> = pts
        .iter()
        .zip(&geo)
        .map(|(&(l, s), &g)| (l, s, params.a * g + params.b))
        .collect();
    let max_deviation = rows.iter().fold(0.0_f64, |m, r| m.max((r.1 - r.2).abs()));
    let rms = if rows.is_empty() {
        0.0
    } else {
        (rows.iter().map(|r| (r.1 - r.2).powi(2)).sum::<f64>() / rows.len() as f64).sqrt()
    };
    Comparison {
        rows,
        max_deviation,
        rms,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricFit {
    pub params: MetricParams,
    /// Residual sum of squares.
    pub objective: f64,
    pub iterations: usize,
    pub window: (usize, usize),
}

/// Least-squares fit on samples with `L ≤ R/4`.
pub fn fit_metric(curve: &EntropyCurve) -> Result<MetricFit> {
    fit_metric_window(curve, (1, saturation_cap(&curve.lattice)))
}

/// Golden-section search over `log α_c`, starting from a logarithmic grid
/// around the lattice `α`; `(a, b)` are solved in closed form at each `α_c`.
pub fn fit_metric_window(curve: &EntropyCurve, window: (usize, usize)) -> Result<MetricFit> {
    if curve.lattice.dim() != 1 {
        return Err(Error::InvalidParameter("the metric comparison is defined for chains".into()));
    }
    let pts: Vec<(usize, f64)> = curve
        .samples
        .iter()
        .copied()
        .filter(|&(l, _)| l >= window.0 && l <= window.1)
        .collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientSamples {
            needed: 5,
            found: pts.len(),
        });
    }
    let lens: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
    let s: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let solve = |log_ac: f64| -> (f64, f64, f64) {
        let geo = geodesic_lengths(log_ac.exp(), &lens);
        let (a, b, _) = linear_regression(&geo, &s);
        let sse = geo.iter().zip(&s).map(|(g, y)| (a * g + b - y).powi(2)).sum();
        (sse, a, b)
    };

    let start = if curve.model.alpha > 0.0 { curve.model.alpha } else { 1.0 };
    let grid: Vec<f64> = (0..=40).map(|i| start.ln() + (i as f64 - 20.0) * 32f64.ln() / 20.0).collect();
    let values: Vec<f64> = grid.iter().map(|&g| solve(g).0).collect();
    let best = (0..grid.len())
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(20);
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);

    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (solve(c).0, solve(d).0);
    let mut iterations = 0;
    while hi - lo > 1e-7 || (fc - fd).abs() > 1e-8 * (1.0 + fc.min(fd)) {
        if hi - lo < 1e-13 {
            break;
        }
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NonConvergence { iterations });
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = solve(c).0;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = solve(d).0;
        }
    }
    let log_ac = 0.5 * (lo + hi);
    let (objective, a, b) = solve(log_ac);
    if !(a > 1e-9) {
        return Err(Error::DegenerateFit(format!("scale a = {a:e} vanishes")));
    }
    Ok(MetricFit {
        params: MetricParams {
            alpha_c: log_ac.exp(),
            a,
            b,
        },
        objective,
        iterations,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use crate::models::{ModelKind, ModelSpec};

    fn simpson(alpha_c: f64, len: f64, panels: usize) -> f64 {
        let h = len / panels as f64;
        let mut s = integrand(alpha_c, 0.0) + integrand(alpha_c, len);
        for i in 1..panels {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * integrand(alpha_c, i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn matches_fixed_step_simpson() {
        for &(ac, l) in &[(9.0, 4.0), (9.0, 90.0), (1.0, 37.5), (0.3, 5.0)] {
            let reference = simpson(ac, l, 200_000);
            assert!((geodesic_length(ac, l) - reference).abs() < 1e-8, "{ac} {l}");
        }
    }

    #[test]
    fn flat_and_logarithmic_regimes() {
        assert_eq!(geodesic_length(9.0, 0.0), 0.0);
        let l = 0.8;
        assert!(1.0 - geodesic_length(9.0, l) / l < 1e-6);
        let far = geodesic_length(9.0, 90.0);
        let asymptotic = 9.0 + 9.0 * (10.0f64).ln();
        assert!((far - asymptotic).abs() / asymptotic < 0.1, "{far} vs {asymptotic}");
    }

    #[test]
    fn increasing_and_concave_past_alpha_c() {
        let v: Vec<f64> = (10..60).map(|l| geodesic_length(9.0, l as f64)).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!(v.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] < 0.0));
    }

    #[test]
    fn tolerance_halving_is_within_reported_error() {
        let coarse = geodesic_length_with_tolerance(9.0, 70.0, 1e-6);
        let fine = geodesic_length_with_tolerance(9.0, 70.0, 5e-7);
        assert!((coarse.value - fine.value).abs() <= coarse.error + 1e-15);
    }

    #[test]
    fn panelwise_lengths_match_direct() {
        let lens = [1.0, 3.5, 10.0, 44.0];
        for (l, g) in lens.iter().zip(geodesic_lengths(2.0, &lens)) {
            assert!((geodesic_length(2.0, *l) - g).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_is_affine_in_a_and_b() {
        let p = MetricParams::new(9.0, 0.6, 0.7).unwrap();
        assert_eq!(holographic_entropy(&p, 0.0), 0.7);
        let q = MetricParams { a: 1.2, ..p };
        let lhs = holographic_entropy(&q, 25.0) - 0.7;
        let rhs = 2.0 * (holographic_entropy(&p, 25.0) - 0.7);
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(MetricParams::new(0.0, 1.0, 0.0).is_err());
        assert!(MetricParams::new(1.0, -1.0, 0.0).is_err());
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> EntropyCurve {
        EntropyCurve {
            model: ModelSpec::new(ModelKind::CompactCos, 10.0),
            lattice: LatticeSpec::chain(400).unwrap(),
            samples: (2..=100).map(|l| (l, f(l as f64))).collect(),
        }
    }

    #[test]
    fn recovers_synthetic_params() {
        let truth = MetricParams::new(9.0, 0.6, 0.7).unwrap();
        let fit = fit_metric(&synthetic(|l| holographic_entropy(&truth, l))).unwrap();
        assert!((fit.params.alpha_c - 9.0).abs() < 1e-4, "{:?}", fit.params);
        assert!((fit.params.a - 0.6).abs() < 1e-4);
        assert!((fit.params.b - 0.7).abs() < 1e-4);
        assert!((fit.params.implied_central_charge() - 16.2).abs() < 1e-3);
    }

    #[test]
    fn constant_curve_is_degenerate() {
        assert!(matches!(fit_metric(&synthetic(|_| 3.0)), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn too_few_samples() {
        let mut c = synthetic(|l| l);
        c.samples.truncate(3);
        assert!(matches!(fit_metric(&c), Err(Error::InsufficientSamples { needed: 5, .. })));
    }
}
