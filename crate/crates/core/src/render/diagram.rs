use std::io::Write;

use rayon::prelude::*;

use crate::error::{ensure_finite_real, Error, Result};
use crate::fixed_points::{fixed_points_f, Stability};
use crate::maps::{validate_rates, FMap, MapParams};
use crate::orbit::ESCAPE_RADIUS;

/// Parameter varied along the diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    /// Vary `D` at fixed `mu`.
    D { mu: f64 },
    /// Vary `mu` at fixed `D`.
    Mu { d: f64 },
}

impl Control {
    pub fn name(&self) -> &'static str {
        match self {
            Control::D { .. } => "D",
            Control::Mu { .. } => "mu",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationSpec {
    pub gamma: f64,
    pub control: Control,
    pub range: (f64, f64),
    pub n_params: usize,
    pub transient_cut: u64,
    pub n_record: usize,
    pub initial_conditions: Vec<f64>,
}

impl BifurcationSpec {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        ensure_finite_real(lo, "range start")?;
        ensure_finite_real(hi, "range end")?;
        if lo > hi {
            return Err(Error::InputDomain(format!("range [{lo}, {hi}] is reversed")));
        }
        match self.control {
            Control::D { mu } => {
                validate_rates(mu, self.gamma)?;
                if lo < 0.0 || hi > 1.0 {
                    return Err(Error::InputDomain(format!("D range [{lo}, {hi}] must lie within [0, 1]")));
                }
            }
            Control::Mu { d } => {
                validate_rates(1.0, self.gamma)?;
                ensure_finite_real(d, "D")?;
                if lo <= 0.0 {
                    return Err(Error::InputDomain(format!("mu range [{lo}, {hi}] must be positive")));
                }
            }
        }
        if self.n_params < 2 {
            return Err(Error::InputDomain(format!("need at least 2 parameter samples, got {}", self.n_params)));
        }
        if self.initial_conditions.is_empty() {
            return Err(Error::InputDomain("no initial conditions".into()));
        }
        for &x in &self.initial_conditions {
            ensure_finite_real(x, "initial condition")?;
        }
        Ok(())
    }

    fn params_at(&self, p: f64) -> MapParams {
        match self.control {
            Control::D { mu } => MapParams { mu, gamma: self.gamma, d: p },
            Control::Mu { d } => MapParams { mu: p, gamma: self.gamma, d },
        }
    }

    pub fn param_values(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        let last = (self.n_params - 1) as f64;
        (0..self.n_params)
            .map(|k| if k + 1 == self.n_params { hi } else { lo + (hi - lo) * k as f64 / last })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitStatus {
    Recorded,
    Escaped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramRow {
    pub param: f64,
    pub x0: f64,
    pub status: OrbitStatus,
    /// Real branches `x_-*`, `x_+*` with an attracting flag; `None` past the fold.
    pub branch_minus: Option<(f64, bool)>,
    pub branch_plus: Option<(f64, bool)>,
    /// Recorded iterates; empty for escaped orbits.
    pub values: Vec<f64>,
}

fn run_orbit(f: &FMap, x0: f64, cut: u64, n: usize) -> Option<Vec<f64>> {
    let c = f.cubic();
    let mut x = x0;
    let escaped = |x: f64| !x.is_finite() || x.abs() > ESCAPE_RADIUS;
    for _ in 0..cut {
        if escaped(x) {
            return None;
        }
        x = c.eval_real(x);
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if escaped(x) {
            return None;
        }
        out.push(x);
        x = c.eval_real(x);
    }
    Some(out)
}

/// Iterates each initial condition past `transient_cut` steps and records
/// the next `n_record` iterates at every parameter sample.
pub fn bifurcation_diagram(spec: &BifurcationSpec) -> Result<Vec<DiagramRow>> {
    spec.validate()?;
    let params = spec.param_values();
    let rows: Result<Vec<Vec<DiagramRow>>> = params
        .par_iter()
        .map(|&p| {
            let mp = spec.params_at(p);
            let f = FMap::new(mp);
            let fp = fixed_points_f(mp)?;
            let real = |info: crate::fixed_points::FixedPointInfo| {
                (info.location.im == 0.0).then_some((info.location.re, info.stability == Stability::Attracting))
            };
            let (bm, bp) = (real(fp.pair.minus), real(fp.pair.plus));
            Ok(spec
                .initial_conditions
                .iter()
                .map(|&x0| {
                    let values = run_orbit(&f, x0, spec.transient_cut, spec.n_record);
                    DiagramRow {
                        param: p,
                        x0,
                        status: if values.is_some() { OrbitStatus::Recorded } else { OrbitStatus::Escaped },
                        branch_minus: bm,
                        branch_plus: bp,
                        values: values.unwrap_or_default(),
                    }
                })
                .collect())
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header `<control>,x0,status,branch_minus,branch_minus_stable,branch_plus,branch_plus_stable,v0,...`;
/// escaped rows leave the value columns empty.
pub fn write_diagram_csv<W: Write>(out: &mut W, control: Control, n_record: usize, rows: &[DiagramRow]) -> Result<()> {
    write!(
        out,
        "{},x0,status,branch_minus,branch_minus_stable,branch_plus,branch_plus_stable",
        control.name()
    )?;
    for k in 0..n_record {
        write!(out, ",v{k}")?;
    }
    writeln!(out)?;
    let branch = |b: Option<(f64, bool)>| match b {
        Some((x, s)) => (num(x), (s as u8).to_string()),
        None => (String::new(), String::new()),
    };
    for r in rows {
        let status = match r.status {
            OrbitStatus::Recorded => "recorded",
            OrbitStatus::Escaped => "escaped",
        };
        let (bm, bms) = branch(r.branch_minus);
        let (bp, bps) = branch(r.branch_plus);
        write!(out, "{},{},{status},{bm},{bms},{bp},{bps}", num(r.param), num(r.x0))?;
        for k in 0..n_record {
            match r.values.get(k) {
                Some(v) => write!(out, ",{}", num(*v))?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
