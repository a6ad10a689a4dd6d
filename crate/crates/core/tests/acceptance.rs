//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nlfermion::holography::compare;
use nlfermion::scaling::{crossover_report, fit, linear_regression, saturation_onset, sweep, FitForm};
use nlfermion::verify::{self, correlation_distance, VerifyOptions};
use nlfermion::{build_model, diagonalize, EntropyCurve, GroundState, LatticeSpec, MetricParams, ModelKind, ModelSpec};

const C1_TARGET: f64 = 0.978;
const C1_TOL: f64 = 0.03;
const C2_TARGET: f64 = 1.96;
const C2_TOL: f64 = 0.06;
const C3_TARGET: f64 = 0.5;
const C3_TOL: f64 = 0.1;
const C4_TARGET: f64 = 1.17;
const C4_TOL: f64 = 0.25;
const C4_R2: f64 = 0.95;
const C5_SPREAD: f64 = 0.05;
const C5_ENERGY_TOL: f64 = 1e-10;
const C6_GROWTH: f64 = 0.2;
const C6_IDENTITY_TOL: f64 = 1e-10;
const C7_RELATIVE_RESIDUAL: f64 = 0.10;
const C8_VOLUME_TARGET: f64 = 0.5;
const C8_VOLUME_TOL: f64 = 0.15;
const C8_AREA_TARGET: f64 = 1.26;
const C8_AREA_TOL: f64 = 0.3;
const C9_MAX_DEVIATION: f64 = 0.5;

type Outcome = (bool, String);

fn chain(r: usize) -> LatticeSpec {
    LatticeSpec::chain(r).expect("valid chain")
}

fn curve(kind: ModelKind, alpha: f64, lattice: &LatticeSpec, lens: impl IntoIterator<Item = usize>) -> EntropyCurve {
    let lens: Vec<usize> = lens.into_iter().collect();
    sweep(&ModelSpec::new(kind, alpha), lattice, &lens).expect("sweep")
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn criterion1() -> Outcome {
    let c = curve(ModelKind::LocalHopping, 0.0, &chain(400), 8..=100);
    let c_eff = fit(&c, FitForm::Log1d, (8, 100)).unwrap().c_eff().unwrap();
    (
        within(c_eff, C1_TARGET, C1_TOL),
        format!("local chain c_eff = {c_eff:.4} (target {C1_TARGET} ± {C1_TOL})"),
    )
}

fn criterion2() -> Outcome {
    let c = curve(ModelKind::CompactCos, 0.01, &chain(400), 8..=100);
    let c_eff = fit(&c, FitForm::Log1d, (8, 100)).unwrap().c_eff().unwrap();
    (
        within(c_eff, C2_TARGET, C2_TOL),
        format!("doubled fermion c_eff = {c_eff:.4} (target {C2_TARGET} ± {C2_TOL})"),
    )
}

fn criterion3() -> Outcome {
    let c = curve(ModelKind::CompactCos, 1400.0, &chain(400), 2..=60);
    let d = fit(&c, FitForm::Linear, (2, 60)).unwrap().volume_coefficient().unwrap();
    (
        within(d, C3_TARGET, C3_TOL),
        format!("volume law d = {d:.4} (target {C3_TARGET} ± {C3_TOL})"),
    )
}

fn criterion4() -> Outcome {
    let lattice = chain(400);
    let alphas = [10.0, 30.0, 50.0];
    let mut ratios = Vec::new();
    let mut c_effs = Vec::new();
    for &alpha in &alphas {
        let c = curve(ModelKind::CompactCos, alpha, &lattice, 1..=100);
        let report = crossover_report(&c, alpha).unwrap();
        let ratio = report.c_eff_per_alpha.unwrap_or(f64::NAN);
        ratios.push(ratio);
        c_effs.push(ratio * alpha);
    }
    let (_, _, r2) = linear_regression(&alphas, &c_effs);
    let ok = ratios.iter().all(|&r| within(r, C4_TARGET, C4_TOL)) && r2 > C4_R2;
    (
        ok,
        format!(
            "c_eff/α at α = 10, 30, 50: {:.3}, {:.3}, {:.3} (target {C4_TARGET} ± {C4_TOL}); r² = {r2:.4} (> {C4_R2})",
            ratios[0], ratios[1], ratios[2]
        ),
    )
}

fn criterion5() -> Outcome {
    let lattice = chain(100);
    let spec = ModelSpec::new(ModelKind::LocalPairing, 0.0);
    let sol = diagonalize(&build_model(&spec, &lattice).unwrap()).unwrap();
    let energy_dev = sol.energies().iter().fold(0.0_f64, |m, e| m.max((e - 1.0).abs()));
    let c = curve(ModelKind::LocalPairing, 0.0, &lattice, 10..=50);
    let s = c.entropies();
    let spread = s.iter().cloned().fold(f64::MIN, f64::max) - s.iter().cloned().fold(f64::MAX, f64::min);
    (
        spread < C5_SPREAD && energy_dev <= C5_ENERGY_TOL && sol.energies().len() == 100,
        format!("gapped pairing: S spread {spread:.2e} (< {C5_SPREAD}), max |E − 1| = {energy_dev:.2e} (≤ {C5_ENERGY_TOL:e})"),
    )
}

fn criterion6() -> Outcome {
    let lattice = chain(100);
    let c = curve(ModelKind::NoncompactNlPairing, 30.0, &lattice, [10, 30]);
    let growth = c.at(30).unwrap() - c.at(10).unwrap();
    let nl = GroundState::prepare(&ModelSpec::new(ModelKind::NoncompactNlHopping, 30.0), &lattice).unwrap();
    let local = GroundState::prepare(&ModelSpec::new(ModelKind::LocalHopping, 0.0), &lattice).unwrap();
    let dist = correlation_distance(&nl.correlations, &local.correlations);
    (
        growth < C6_GROWTH && dist <= C6_IDENTITY_TOL,
        format!("noncompact: S(30) − S(10) = {growth:.4} (< {C6_GROWTH}); hopping G deviation {dist:.2e} (≤ {C6_IDENTITY_TOL:e})"),
    )
}

fn criterion7() -> Outcome {
    let lattice = chain(100);
    let c = curve(ModelKind::CompactNlPairing, 30.0, &lattice, 2..=25);
    let f = fit(&c, FitForm::Linear, (2, 25)).unwrap();
    let mean = c.entropies().iter().sum::<f64>() / c.samples.len() as f64;
    let rel = f.residual / mean;
    let alpha = 5.0;
    let small = curve(ModelKind::CompactNlPairing, alpha, &lattice, 1..=25);
    let onset = saturation_onset(&small);
    let near = onset.is_some_and(|l| (l as f64) >= alpha / 2.0 && (l as f64) <= 2.0 * alpha);
    (
        rel < C7_RELATIVE_RESIDUAL && near,
        format!(
            "compact pairing: linear rms/mean = {rel:.4} (< {C7_RELATIVE_RESIDUAL}); α = 5 crossover at L = {} (in [2.5, 10])",
            onset.map_or("none".to_string(), |l| l.to_string())
        ),
    )
}

fn criterion8() -> Outcome {
    let torus = LatticeSpec::square(61).unwrap();
    let volume = curve(ModelKind::CompactSin, 1400.0, &torus, 2..=10);
    let per_area: Vec<f64> = volume.samples.iter().map(|&(l, s)| s / (l * l) as f64).collect();
    let vol_ok = per_area.iter().all(|&d| within(d, C8_VOLUME_TARGET, C8_VOLUME_TOL));
    let (lo, hi) = per_area
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &d| (a.min(d), b.max(d)));
    let mut ratios = Vec::new();
    for alpha in [5.0, 15.0] {
        let c = curve(ModelKind::CompactSin, alpha, &torus, 1..=29);
        ratios.push(crossover_report(&c, alpha).unwrap().c_eff_per_alpha.unwrap_or(f64::NAN));
    }
    let area_ok = ratios.iter().all(|&r| within(r, C8_AREA_TARGET, C8_AREA_TOL));
    (
        vol_ok && area_ok,
        format!(
            "2-d: S/L² for L ≤ 10 in [{lo:.3}, {hi:.3}] (target {C8_VOLUME_TARGET} ± {C8_VOLUME_TOL}); \
             c_eff/α at α = 5, 15: {:.3}, {:.3} (target {C8_AREA_TARGET} ± {C8_AREA_TOL})",
            ratios[0], ratios[1]
        ),
    )
}

fn criterion9() -> Outcome {
    let c = curve(ModelKind::CompactCos, 10.0, &chain(400), 4..=100);
    let params = MetricParams::new(9.0, 0.6, 0.7).unwrap();
    let cmp = compare(&params, &c, (4, 100));
    (
        cmp.max_deviation < C9_MAX_DEVIATION,
        format!(
            "holography (9, 0.6, 0.7): max |ΔS| = {:.3} on [4, 100] (< {C9_MAX_DEVIATION})",
            cmp.max_deviation
        ),
    )
}

fn criterion10() -> Outcome {
    let checks = verify::run(&VerifyOptions::default()).unwrap();
    let summary: Vec<String> = checks
        .iter()
        .map(|c| format!("{} {}={:.2e}", if c.passed { "ok" } else { "FAILED" }, c.name, c.value))
        .collect();
    (checks.iter().all(|c| c.passed), format!("property suite: {}", summary.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome, Duration); 10] = [
        (1, criterion1, Duration::from_secs(10)),
        (2, criterion2, Duration::from_secs(10)),
        (3, criterion3, Duration::from_secs(30)),
        (4, criterion4, Duration::from_secs(120)),
        (5, criterion5, Duration::from_secs(10)),
        (6, criterion6, Duration::from_secs(10)),
        (7, criterion7, Duration::from_secs(10)),
        (8, criterion8, Duration::from_secs(900)),
        (9, criterion9, Duration::from_secs(30)),
        (10, criterion10, Duration::from_secs(300)),
    ];
    let mut failures = 0;
    for (n, run, budget) in criteria {
        let start = Instant::now();
        let (ok, detail) = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = ok && in_time;
        failures += usize::from(!pass);
        println!(
            "[{}] criterion {n}: {detail}; {:.1} s (budget {} s{})",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
