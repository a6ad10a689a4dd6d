use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use nlfermion::holography::{compare, fit_metric_window};
use nlfermion::models::dispersion;
use nlfermion::scaling::{crossover_report, fit_with, saturation_cap, FitParams, ScalingFit};
use nlfermion::verify::{self, Bound, VerifyOptions};
use nlfermion::{sweep, EntropyCurve, MetricParams};

use crate::config::{Config, HoloConfig, PlotY};
use crate::plot::{Plot, Series, Style};
use crate::table::{sig12, Cell, Table};
use crate::Usage;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn preamble(command: &str, config: &Config) -> Vec<String> {
    vec![
        format!("nlfermion {VERSION}"),
        format!("command: {command}"),
        format!("seed: {}", config.seed.map_or("none".into(), |s| s.to_string())),
        "config:".into(),
        config.echo(),
    ]
}

fn emit(table: &Table, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            table.write_to(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write_to(&mut lock)?;
        }
    }
    Ok(())
}

fn write_svg(plot: &Plot, path: &Path) -> Result<()> {
    std::fs::write(path, plot.render()).with_context(|| format!("writing {}", path.display()))
}

pub fn spectrum(config: &Config) -> Result<()> {
    let model = config.single_model()?;
    let lattice = config.lattice()?;
    let rows = dispersion(&model.spec, &lattice)?;
    let pairing = model.spec.kind.is_pairing();
    let mut columns: Vec<&str> = if lattice.dim() == 1 { vec!["n", "k"] } else { vec!["n1", "n2", "k1", "k2"] };
    columns.push("E");
    if pairing {
        columns.push("E_neg");
    }
    let mut table = Table::new(&columns);
    table.preamble = preamble("spectrum", config);
    for (w, e) in &rows {
        let mut row: Vec<Cell> = (0..lattice.dim()).map(|a| Cell::from(w.n[a])).collect();
        row.extend((0..lattice.dim()).map(|a| Cell::from(w.k[a])));
        row.push(Cell::from(*e));
        if pairing {
            row.push(Cell::from(-*e));
        }
        table.push(row);
    }
    emit(&table, config.output.csv.as_deref())?;
    if let Some(svg) = &config.output.svg {
        let plot = Plot {
            x_label: "k".into(),
            y_label: "E".into(),
            log_x: false,
            series: vec![Series {
                label: model.label(),
                points: rows.iter().map(|(w, e)| (w.k[0], *e)).collect(),
                style: Style::Markers,
            }],
        };
        write_svg(&plot, svg)?;
    }
    Ok(())
}

fn describe_fit(label: &str, f: &ScalingFit) -> String {
    let params = match f.params {
        FitParams::Linear { d } => format!("d={}", sig12(d)),
        FitParams::Log1d { c0, c_eff } => format!("c0={} c_eff={}", sig12(c0), sig12(c_eff)),
        FitParams::AreaLog2d { constant, c_eff } => format!("const={} c_eff={}", sig12(constant), sig12(c_eff)),
    };
    format!(
        "fit model=\"{label}\" form={} window={}..{} samples={} {params} residual={}",
        serde_json::to_value(f.form).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(),
        f.window.0, f.window.1, f.samples, sig12(f.residual)
    )
}

fn curves(config: &Config) -> Result<Vec<(String, EntropyCurve)>> {
    let models = config.model_list();
    if models.is_empty() {
        bail!(Usage("config has no model".into()));
    }
    let lattice = config.lattice()?;
    let lengths = config.lengths()?;
    models
        .iter()
        .map(|m| Ok((m.label(), sweep(&m.spec, &lattice, &lengths)?)))
        .collect()
}

pub fn entropy_sweep(config: &Config) -> Result<()> {
    let curves = curves(config)?;
    let multi = curves.len() > 1;
    let mut table = Table::new(if multi { &["model", "L", "S"] } else { &["L", "S"] });
    table.preamble = preamble("sweep", config);
    for (label, curve) in &curves {
        for &(l, s) in &curve.samples {
            let mut row: Vec<Cell> = if multi { vec![label.as_str().into()] } else { vec![] };
            row.push(l.into());
            row.push(s.into());
            table.push(row);
        }
        for req in &config.fits {
            let f = fit_with(curve, req.form, req.window_for(&curve.lattice), req.abscissa)?;
            table.trailer.push(describe_fit(label, &f));
        }
        if config.crossover {
            let r = crossover_report(curve, curve.model.alpha)?;
            let opt = |v: Option<f64>| v.map_or("none".to_string(), sig12);
            table.trailer.push(format!(
                "crossover model=\"{label}\" alpha={} cap={} A={} c_eff_per_alpha={} partial={}",
                sig12(r.alpha),
                r.cap,
                opt(r.volume_coefficient),
                opt(r.c_eff_per_alpha),
                r.partial
            ));
            for f in r.linear.iter().chain(r.log.iter()) {
                table.trailer.push(describe_fit(label, f));
            }
        }
    }
    emit(&table, config.output.csv.as_deref())?;
    if let Some(svg) = &config.output.svg {
        let y = |l: usize, s: f64| match config.output.plot_y {
            PlotY::S => s,
            PlotY::SOverL => s / l as f64,
        };
        let plot = Plot {
            x_label: "L".into(),
            y_label: match config.output.plot_y {
                PlotY::S => "S".into(),
                PlotY::SOverL => "S/L".into(),
            },
            log_x: config.output.log_x,
            series: curves
                .iter()
                .map(|(label, c)| Series {
                    label: label.clone(),
                    points: c.samples.iter().map(|&(l, s)| (l as f64, y(l, s))).collect(),
                    style: Style::Markers,
                })
                .collect(),
        };
        write_svg(&plot, svg)?;
    }
    Ok(())
}

pub fn holo(config: &Config) -> Result<()> {
    let model = config.single_model()?;
    let lattice = config.lattice()?;
    let holo = config.holography.clone().unwrap_or_default();
    let lengths = config.lengths()?;
    let curve = sweep(&model.spec, &lattice, &lengths)?;
    let window = holo.window.unwrap_or((1, saturation_cap(&lattice)));
    let (params, source) = if holo.fit {
        let fit = fit_metric_window(&curve, window)?;
        (fit.params, format!("fit objective={} iterations={}", sig12(fit.objective), fit.iterations))
    } else {
        let HoloConfig { alpha_c, a, b, .. } = holo;
        (MetricParams::new(alpha_c, a, b).map_err(|e| Usage(e.to_string()))?, "config".to_string())
    };
    let cmp = compare(&params, &curve, window);
    if cmp.rows.is_empty() {
        bail!(Usage(format!("no sweep points inside the window {}..{}", window.0, window.1)));
    }
    let mut table = Table::new(&["L", "S_lattice", "S_holographic", "residual"]);
    table.preamble = preamble("holo", config);
    table.preamble.push(format!(
        "metric alpha_c={} a={} b={} source={source}",
        sig12(params.alpha_c),
        sig12(params.a),
        sig12(params.b)
    ));
    table.preamble.push(format!("implied_central_charge={}", sig12(params.implied_central_charge())));
    for &(l, s, h) in &cmp.rows {
        table.push(vec![l.into(), s.into(), h.into(), (s - h).into()]);
    }
    table.trailer.push(format!(
        "max_deviation={} rms={} window={}..{}",
        sig12(cmp.max_deviation),
        sig12(cmp.rms),
        window.0,
        window.1
    ));
    emit(&table, config.output.csv.as_deref())?;
    if let Some(svg) = &config.output.svg {
        let plot = Plot {
            x_label: "L".into(),
            y_label: "S".into(),
            log_x: config.output.log_x,
            series: vec![
                Series {
                    label: model.label(),
                    points: cmp.rows.iter().map(|r| (r.0 as f64, r.1)).collect(),
                    style: Style::Markers,
                },
                Series {
                    label: "geodesic".into(),
                    points: cmp.rows.iter().map(|r| (r.0 as f64, r.2)).collect(),
                    style: Style::Line,
                },
            ],
        };
        write_svg(&plot, svg)?;
    }
    Ok(())
}

/// Numerical failure raised when an oracle check misses its bound.
#[derive(Debug)]
pub struct ChecksFailed(pub Vec<&'static str>);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0.join(", "))
    }
}

impl std::error::Error for ChecksFailed {}

pub fn verify(config: &Config, corrupt: Option<String>) -> Result<()> {
    if let Some(name) = &corrupt {
        if !verify::CHECK_NAMES.contains(&name.as_str()) {
            bail!(Usage(format!("unknown check {name:?}")));
        }
    }
    let outcomes = verify::run(&VerifyOptions { seed: config.seed, corrupt })?;
    let mut table = Table::new(&["check", "value", "bound", "kind", "passed"]);
    table.preamble = preamble("verify", config);
    for o in &outcomes {
        let rel = match o.kind {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        println!(
            "[{}] {}: {} (required {rel} {})",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            sig12(o.value),
            sig12(o.bound)
        );
        table.push(vec![
            o.name.into(),
            o.value.into(),
            o.bound.into(),
            match o.kind {
                Bound::AtMost => "at_most",
                Bound::AtLeast => "at_least",
            }
            .into(),
            o.passed.to_string().into(),
        ]);
    }
    if let Some(path) = &config.output.csv {
        emit(&table, Some(path))?;
    }
    let failed: Vec<&'static str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(ChecksFailed(failed).into())
    }
}
