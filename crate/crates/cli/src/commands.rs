//! Typed plans built from a resolved configuration, and their execution.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ghostdyn_core::fixed_points::FixedPointInfo;
use ghostdyn_core::maps::{Complex, EpsilonOffset, FEpsMap, GeneralCoeffs, HMap};
use ghostdyn_core::orbit::Thresholds;
use ghostdyn_core::render::{
    bifurcation_diagram, render_dynamical_plane, render_parameter_plane, write_diagram_csv, BifurcationSpec, Control,
    ParamPlane, RenderSpec, Window,
};
use ghostdyn_core::transient::{
    channel_width, default_channel_budget, fit_scaling, holomorphic_index_numeric, measure_passage,
    predicted_iterates, ContourSpec, PassageWindow,
};
use ghostdyn_core::{critical_values, degenerate_presets, fixed_points_g, refine_fixed_point, Error};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{eps_grid, Command, RunConfig};
use crate::error::CliError;

enum FitFamily {
    F { mu: f64, gamma: f64 },
    H(GeneralCoeffs),
}

enum Plan {
    RenderDynamical { map: FEpsMap, spec: RenderSpec, png: bool },
    RenderParameter { plane: ParamPlane, spec: RenderSpec, png: bool },
    Bifurcation(BifurcationSpec),
    TransientScan { mu: f64, gamma: f64, grid: Vec<f64>, delta: f64, budget: u64 },
    ChannelWidth { mu: f64, gamma: f64, eps: Vec<f64>, budget: Option<u64> },
    IndexCheck { mu: f64, gamma: f64, eps: Vec<f64> },
    FitScaling { family: FitFamily, grid: Vec<f64>, delta: f64, budget: u64 },
    DegenerateCheck { eps: Vec<f64> },
}

fn rates(cfg: &RunConfig) -> Result<(f64, f64), CliError> {
    let mu = cfg.positive("mu")?;
    let gamma = cfg.real_where("gamma", |g| g > 0.0 && g <= 1.0, "must lie in (0, 1]")?;
    Ok((mu, gamma))
}

/// Rates that admit a fold: `gamma / mu <= 1/4`.
fn fold_rates(cfg: &RunConfig) -> Result<(f64, f64), CliError> {
    let (mu, gamma) = rates(cfg)?;
    critical_values(mu, gamma).map_err(|e| CliError::usage("gamma", e))?;
    Ok((mu, gamma))
}

fn offset(k: &str, x: f64) -> Result<EpsilonOffset, CliError> {
    EpsilonOffset::new(x).map_err(|e| CliError::usage(k, e))
}

fn small_positive_list(cfg: &RunConfig, k: &str) -> Result<Vec<f64>, CliError> {
    let xs = cfg.list(k)?;
    for &x in &xs {
        if !(x > 0.0 && x < 1.0) {
            return Err(CliError::usage(k, format!("values must lie in (0, 1), got {x}")));
        }
    }
    Ok(xs)
}

fn render_spec(cfg: &RunConfig) -> Result<RenderSpec, CliError> {
    let window = Window::new(cfg.real("re-min")?, cfg.real("re-max")?, cfg.real("im-min")?, cfg.real("im-max")?)
        .map_err(|e| CliError::usage("re-min", e))?;
    let width = cfg.count("width")? as usize;
    let height = cfg.count("height")? as usize;
    if width == 0 {
        return Err(CliError::usage("width", "must be positive"));
    }
    if height == 0 {
        return Err(CliError::usage("height", "must be positive"));
    }
    let thresholds = Thresholds {
        convergence: cfg.positive("conv-threshold")?,
        escape: cfg.positive("escape-threshold")?,
    };
    RenderSpec::with_thresholds(window, width, height, cfg.count("budget")?, thresholds)
        .map_err(|e| CliError::usage("conv-threshold", e))
}

fn plan(cfg: &RunConfig) -> Result<Plan, CliError> {
    Ok(match cfg.command {
        Command::RenderDynamical => {
            let (mu, gamma) = fold_rates(cfg)?;
            let eps = offset("eps", cfg.real("eps")?)?;
            Plan::RenderDynamical {
                map: FEpsMap::new(mu, gamma, eps).map_err(|e| CliError::usage("eps", e))?,
                spec: render_spec(cfg)?,
                png: cfg.flag("png")?,
            }
        }
        Command::RenderParameter => {
            let plane = match cfg.choice("plane", &["d", "mu"])? {
                "d" => {
                    let (mu, gamma) = rates(cfg)?;
                    ParamPlane::D { mu, gamma }
                }
                _ => {
                    let gamma = cfg.real_where("gamma", |g| g > 0.0 && g <= 1.0, "must lie in (0, 1]")?;
                    ParamPlane::Mu { gamma, d: cfg.real("d")? }
                }
            };
            Plan::RenderParameter { plane, spec: render_spec(cfg)?, png: cfg.flag("png")? }
        }
        Command::Bifurcation => {
            let gamma = cfg.real_where("gamma", |g| g > 0.0 && g <= 1.0, "must lie in (0, 1]")?;
            let (from, to) = (cfg.real("from")?, cfg.real("to")?);
            let control = match cfg.choice("control", &["d", "mu"])? {
                "d" => {
                    let mu = cfg.positive("mu")?;
                    if from < 0.0 || to > 1.0 {
                        return Err(CliError::usage("from", format!("D range [{from}, {to}] must lie within [0, 1]")));
                    }
                    Control::D { mu }
                }
                _ => {
                    if from <= 0.0 {
                        return Err(CliError::usage("from", format!("mu must be positive, got {from}")));
                    }
                    Control::Mu { d: cfg.real("d")? }
                }
            };
            if from > to {
                return Err(CliError::usage("from", format!("{from} exceeds to = {to}")));
            }
            let n_params = cfg.count("n-params")? as usize;
            if n_params < 2 {
                return Err(CliError::usage("n-params", "need at least 2"));
            }
            Plan::Bifurcation(BifurcationSpec {
                gamma,
                control,
                range: (from, to),
                n_params,
                transient_cut: cfg.count("transient-cut")?,
                n_record: cfg.count("n-record")? as usize,
                initial_conditions: cfg.list("x0")?,
            })
        }
        Command::TransientScan => {
            let (mu, gamma) = fold_rates(cfg)?;
            let grid = eps_grid(cfg)?;
            if grid.iter().any(|&e| e >= 1.0) {
                return Err(CliError::usage("eps-to", "must be below 1"));
            }
            Plan::TransientScan { mu, gamma, grid, delta: cfg.positive("delta")?, budget: cfg.count("budget")? }
        }
        Command::ChannelWidth => {
            let (mu, gamma) = fold_rates(cfg)?;
            Plan::ChannelWidth {
                mu,
                gamma,
                eps: small_positive_list(cfg, "eps")?,
                budget: cfg.auto("budget", |c, k| c.count(k))?,
            }
        }
        Command::IndexCheck => {
            let (mu, gamma) = fold_rates(cfg)?;
            Plan::IndexCheck { mu, gamma, eps: small_positive_list(cfg, "eps")? }
        }
        Command::FitScaling => {
            let (family, default_delta) = match cfg.choice("family", &["f", "h"])? {
                "f" => {
                    let (mu, gamma) = fold_rates(cfg)?;
                    (FitFamily::F { mu, gamma }, 0.05)
                }
                _ => {
                    let n = cfg.count("n")? as u32;
                    let m = cfg.count("m")? as u32;
                    let coeffs = GeneralCoeffs::new(cfg.real("a")?, cfg.real("c")?, n, m)
                        .map_err(|e| CliError::usage("n", e))?;
                    if coeffs.a * coeffs.c <= 0.0 {
                        return Err(CliError::usage("a", "a and c must share a sign"));
                    }
                    (FitFamily::H(coeffs), 0.5)
                }
            };
            let grid = eps_grid(cfg)?;
            if grid.iter().any(|&e| e >= 1.0) {
                return Err(CliError::usage("eps-to", "must be below 1"));
            }
            let delta = cfg.auto("delta", |c, k| c.positive(k))?.unwrap_or(default_delta);
            Plan::FitScaling { family, grid, delta, budget: cfg.count("budget")? }
        }
        Command::DegenerateCheck => {
            let eps = cfg.list("eps")?;
            if let Some(e) = eps.iter().find(|e| e.abs() >= 1.0) {
                return Err(CliError::usage("eps", format!("values must satisfy |eps| < 1, got {e}")));
            }
            Plan::DegenerateCheck { eps }
        }
    })
}

pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    plan(cfg).map(|_| ())
}

/// Files written so far; removed again unless the run completes.
pub struct Outputs {
    paths: Vec<PathBuf>,
    done: bool,
}

impl Outputs {
    fn new() -> Self {
        Self { paths: Vec::new(), done: false }
    }

    fn create(&mut self, path: &Path) -> Result<BufWriter<File>, CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.paths.push(path.to_path_buf());
        Ok(BufWriter::new(file))
    }

    fn register(&mut self, path: &Path) {
        self.paths.push(path.to_path_buf());
    }

    pub fn hashes(&self) -> Result<Vec<(String, String)>, CliError> {
        self.paths
            .iter()
            .map(|p| {
                let bytes = std::fs::read(p)?;
                Ok((p.display().to_string(), hex::encode(Sha256::digest(&bytes))))
            })
            .collect()
    }

    pub fn keep(&mut self) {
        self.done = true;
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.done {
            for p in &self.paths {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn finish(mut w: BufWriter<File>) -> Result<(), CliError> {
    w.flush()?;
    Ok(())
}

fn write_png(outputs: &mut Outputs, ppm: &Path, width: usize, height: usize, rgb: Vec<u8>) -> Result<(), CliError> {
    let path = ppm.with_extension("png");
    let img = image::RgbImage::from_raw(width as u32, height as u32, rgb)
        .ok_or_else(|| CliError::Io("pixel buffer does not match the image size".into()))?;
    outputs.register(&path);
    img.save_with_format(&path, image::ImageFormat::Png)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Runs the command, printing a summary to `log`, and returns the outputs
/// written. On error every output already written is removed.
pub fn run(cfg: &RunConfig, log: &mut dyn Write) -> Result<Outputs, CliError> {
    let plan = plan(cfg)?;
    let output = PathBuf::from(cfg.raw("output"));
    let mut outputs = Outputs::new();
    match plan {
        Plan::RenderDynamical { map, spec, png } => {
            let image = render_dynamical_plane(&map, &spec, None)?;
            let mut w = outputs.create(&output)?;
            image.write_ppm(&mut w)?;
            finish(w)?;
            let mut h = outputs.create(&output.with_extension("hist.csv"))?;
            image.write_histogram_csv(&mut h)?;
            finish(h)?;
            if png {
                write_png(&mut outputs, &output, spec.width, spec.height, image.rgb())?;
            }
            let (z, e, u) = image.counts();
            writeln!(log, "pixels: to_zero {z}, to_infinity {e}, undecided {u}")?;
        }
        Plan::RenderParameter { plane, spec, png } => {
            let image = render_parameter_plane(plane, &spec, None)?;
            let mut w = outputs.create(&output)?;
            image.write_ppm(&mut w)?;
            finish(w)?;
            if png {
                write_png(&mut outputs, &output, spec.width, spec.height, image.rgb())?;
            }
            let (z, e, o) = image.counts();
            writeln!(log, "pixels: both_to_zero {z}, one_to_infinity {e}, other {o}")?;
        }
        Plan::Bifurcation(spec) => {
            let rows = bifurcation_diagram(&spec)?;
            let mut w = outputs.create(&output)?;
            write_diagram_csv(&mut w, spec.control, spec.n_record, &rows)?;
            finish(w)?;
            writeln!(log, "rows: {}", rows.len())?;
        }
        Plan::TransientScan { mu, gamma, grid, delta, budget } => {
            let rows = grid
                .par_iter()
                .map(|&e| {
                    let f = FEpsMap::new(mu, gamma, EpsilonOffset::new(e)?)?;
                    let window = PassageWindow::around_fold(&f.critical(), delta)?;
                    let m = measure_passage(&f, e, window, window.upper(), budget, None)?;
                    let lambda = fixed_points_g(mu, gamma, EpsilonOffset::new(e)?)?.minus.multiplier;
                    Ok((e, m.iterates as f64, predicted_iterates(lambda)?))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let mut w = outputs.create(&output)?;
            writeln!(w, "epsilon,N_measured,N_predicted,rel_err")?;
            for (e, n, p) in &rows {
                writeln!(w, "{},{},{},{}", num(*e), n, num(*p), num((n - p).abs() / n))?;
            }
            finish(w)?;
            writeln!(log, "samples: {}", rows.len())?;
        }
        Plan::ChannelWidth { mu, gamma, eps, budget } => {
            let rows = eps
                .par_iter()
                .map(|&e| {
                    let b = match budget {
                        Some(b) => b,
                        None => default_channel_budget(mu, gamma, e)?,
                    };
                    channel_width(mu, gamma, EpsilonOffset::new(e)?, b)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let mut w = outputs.create(&output)?;
            writeln!(w, "epsilon,width,width_over_eps")?;
            for r in &rows {
                writeln!(w, "{},{},{}", num(r.eps), num(r.width), num(r.ratio()))?;
                writeln!(log, "eps {:e}: width {:.6e}, width/eps {:.4}", r.eps, r.width, r.ratio())?;
            }
            finish(w)?;
        }
        Plan::IndexCheck { mu, gamma, eps } => {
            let mut w = outputs.create(&output)?;
            writeln!(w, "eps,re_index,im_index,re_analytic,im_analytic,rel_err")?;
            for e in eps {
                let f = FEpsMap::new(mu, gamma, EpsilonOffset::new(e)?)?;
                let centred = fixed_points_g(mu, gamma, EpsilonOffset::new(e)?)?;
                let minus = refine_fixed_point(&f, centred.minus.location + f.x_c(), 1e-16, 50)?;
                let others = [centred.plus.location + f.x_c(), Complex::new(0.0, 0.0)];
                let est = holomorphic_index_numeric(&f, ContourSpec::isolating(minus.location, &others)?)?;
                let analytic = 1.0 / (1.0 - minus.multiplier);
                let rel = (est.index - analytic).norm() / analytic.norm();
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    num(e),
                    num(est.index.re),
                    num(est.index.im),
                    num(analytic.re),
                    num(analytic.im),
                    num(rel)
                )?;
                writeln!(log, "eps {e:e}: index {:.10e}{:+.10e}i, rel err {rel:.2e}", est.index.re, est.index.im)?;
            }
            finish(w)?;
        }
        Plan::FitScaling { family, grid, delta, budget } => {
            let samples = grid
                .par_iter()
                .map(|&e| {
                    let m = match &family {
                        FitFamily::F { mu, gamma } => {
                            let f = FEpsMap::new(*mu, *gamma, EpsilonOffset::new(e)?)?;
                            let window = PassageWindow::around_fold(&f.critical(), delta)?;
                            measure_passage(&f, e, window, window.upper(), budget, None)?
                        }
                        FitFamily::H(coeffs) => {
                            let h = HMap::new(coeffs.clone(), e)?;
                            let window = PassageWindow::new(0.0, delta)?;
                            measure_passage(&h, e, window, window.upper(), budget, None)?
                        }
                    };
                    Ok((e, m.iterates as f64))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let fit = fit_scaling(&samples)?;
            let mut w = outputs.create(&output)?;
            writeln!(w, "epsilon,N_measured,N_fitted")?;
            for &(e, n) in &fit.samples {
                writeln!(w, "{},{},{}", num(e), n, num(fit.predict(e)))?;
            }
            finish(w)?;
            let reference = match &family {
                FitFamily::F { mu, gamma } => {
                    let cv = critical_values(*mu, *gamma)?;
                    PI / (cv.mu * cv.x_c.powf(1.5))
                }
                FitFamily::H(c) => PI / (c.a * c.c).sqrt(),
            };
            writeln!(
                log,
                "exponent {:.5} prefactor {:.5} (leading-order {reference:.5}) offset {:.3} rms {:.2e} over {} samples",
                fit.exponent,
                fit.prefactor,
                fit.offset,
                fit.residual_rms,
                fit.samples.len()
            )?;
        }
        Plan::DegenerateCheck { eps } => {
            let presets = degenerate_presets();
            let mut w = outputs.create(&output)?;
            writeln!(w, "family,eps,re_fixed,im_fixed,re_multiplier,im_multiplier,stability")?;
            for (name, coeffs) in [("h1", &presets.h1), ("h2", &presets.h2), ("h3", &presets.h3)] {
                for &e in &eps {
                    let h = HMap::new(coeffs.clone(), e)?;
                    for info in quadratic_fixed_points(&h, coeffs, e)? {
                        writeln!(
                            w,
                            "{name},{},{},{},{},{},{}",
                            num(e),
                            num(info.location.re),
                            num(info.location.im),
                            num(info.multiplier.re),
                            num(info.multiplier.im),
                            info.stability.as_str()
                        )?;
                    }
                }
            }
            finish(w)?;
        }
    }
    Ok(outputs)
}

/// Both roots of `k2 z^2 + (k1 - 1) z + k0 = 0` for a tail-free family.
fn quadratic_fixed_points(h: &HMap, coeffs: &GeneralCoeffs, eps: f64) -> Result<[FixedPointInfo; 2], Error> {
    let (k0, k1, k2) = coeffs.low_order(eps);
    let b = Complex::new(k1 - 1.0, 0.0);
    let (bb, ac4) = (b.re * b.re, 4.0 * k2 * k0);
    // a double root is only resolved to sqrt(rounding) unless snapped
    let d = bb - ac4;
    let d = if d.abs() <= 8.0 * f64::EPSILON * bb.abs().max(ac4.abs()) { 0.0 } else { d };
    let disc = Complex::new(d, 0.0).sqrt();
    let q = if (-b + disc).norm() >= (-b - disc).norm() { -b + disc } else { -b - disc };
    let (r1, r2) = if q.norm() == 0.0 {
        (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0))
    } else {
        (q / (2.0 * k2), 2.0 * k0 / q)
    };
    let mut pts = [r1, r2];
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok([FixedPointInfo::at(h, pts[0])?, FixedPointInfo::at(h, pts[1])?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use ghostdyn_core::maps::Family;

    #[test]
    fn degenerate_roots() {
        let p = degenerate_presets();
        let h2 = HMap::new(p.h2.clone(), 0.1).unwrap();
        let [a, b] = quadratic_fixed_points(&h2, &p.h2, 0.1).unwrap();
        assert!((a.location - Complex::new(0.0, -0.1)).norm() < 1e-15);
        assert!((b.location - Complex::new(0.0, 0.1)).norm() < 1e-15);
        let h1 = HMap::new(p.h1.clone(), 0.01).unwrap();
        let [x, _] = quadratic_fixed_points(&h1, &p.h1, 0.01).unwrap();
        assert_eq!(x.multiplier, Complex::new(1.0, 0.0));
        assert!(h2.derivative(b.location).unwrap().im > 0.0);
    }

    #[test]
    fn precondition_failures_are_usage_errors() {
        for args in [
            "ghostdyn render-dynamical --eps 2",
            "ghostdyn render-dynamical --gamma 1.2",
            "ghostdyn channel-width --gamma 0.9 --mu 1",
            "ghostdyn render-dynamical --re-min 1 --re-max 0",
            "ghostdyn bifurcation --to 1.5",
            "ghostdyn fit-scaling --family h --n 2",
            "ghostdyn channel-width --eps 0",
        ] {
            let e = parse_config(args.split_whitespace()).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{args}: {e}");
        }
    }
}
